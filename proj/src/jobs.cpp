#include "bsdlab/jobs.hpp"

#include "bsdlab/ec/local.hpp"
#include "bsdlab/ec/period.hpp"
#include "bsdlab/fitting.hpp"
#include "bsdlab/ingest.hpp"
#include "bsdlab/ml/experiment.hpp"
#include "bsdlab/ml/logistic.hpp"
#include "bsdlab/permutation.hpp"
#include "bsdlab/stats.hpp"
#include "bsdlab/tda.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace bsdlab::jobs {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ingest::ConfigError("cannot open output file: " + path);
    out << content;
}

// manifest sits next to the report; timestamps live only here so reports
// stay byte-identical across reruns
void write_manifest(const std::string& report_path, const std::string& job, const json& config,
                    const std::vector<std::string>& artifacts,
                    const std::vector<std::string>& failures = {}) {
    json m;
    m["job"] = job;
    m["schema_version"] = kSchemaVersion;
    m["config"] = config;
    m["config_hash"] = fnv1a(config.dump());
    m["artifacts"] = artifacts;
    m["failures"] = failures;
    m["timestamp"] = iso_now();
    write_text(report_path + ".manifest.json", m.dump(2) + "\n");
}

template <typename F>
int guard(F&& f) {
    try {
        return f();
    } catch (const ingest::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kConfigError;
    } catch (const tda::BudgetError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kConfigError;
    } catch (const ec::PrecisionError& ex) {
        std::cerr << "numeric error: " << ex.what() << "\n";
        return kNumericError;
    } catch (const ec::BoundError& ex) {
        std::cerr << "numeric error: " << ex.what() << "\n";
        return kNumericError;
    } catch (const stats::FitError& ex) {
        std::cerr << "numeric error: " << ex.what() << "\n";
        return kNumericError;
    } catch (const ml::MetricError& ex) {
        std::cerr << "numeric error: " << ex.what() << "\n";
        return kNumericError;
    } catch (const ml::ConvergenceError& ex) {
        std::cerr << "numeric error: " << ex.what() << "\n";
        return kNumericError;
    } catch (const std::exception& ex) {
        std::cerr << "data error: " << ex.what() << "\n";
        return kDataError;
    }
}

std::vector<ingest::CurveRecord> load(const std::string& cache) {
    return ingest::read_cache(cache);
}

std::string canonical_target(const std::string& t) {
    if (t == "r" || t == "rank") return "rank";
    if (t == "T" || t == "torsion") return "torsion";
    if (t == "N" || t == "conductor") return "conductor";
    if (t == "omega" || t == "Omega") return "omega";
    if (t == "R" || t == "regulator") return "regulator";
    if (t == "sha" || t == "Sha") return "sha";
    if (t == "c" || t == "tamagawa") return "tamagawa";
    throw ingest::ConfigError("unknown target: " + t);
}

double record_rhs(const ingest::CurveRecord& r) {
    return ec::bsd_rhs(r.sha_order, r.omega, r.regulator,
                       static_cast<double>(r.tamagawa_product),
                       static_cast<double>(r.torsion_order));
}

json histogram_json(const stats::Histogram& h) {
    json j;
    j["binning"] = h.binning == stats::Binning::linear  ? "linear"
                   : h.binning == stats::Binning::log10 ? "log10"
                                                        : "symlog";
    j["edges"] = h.edges;
    j["masses"] = h.masses;
    return j;
}

json fit_json(const stats::FitResult& r) {
    json j;
    j["family"] = stats::family_name(r.family);
    j["params"] = r.params;
    j["loglik"] = r.loglik;
    j["aic"] = r.aic;
    j["n"] = r.n;
    return j;
}

json barcode_json(const tda::Barcode& b) {
    json bars = json::array();
    for (std::size_t k = 0; k < b.dims.size(); ++k)
        for (const auto& iv : b.dims[k]) {
            json bar;
            bar["dim"] = k;
            bar["birth"] = iv.birth;
            if (std::isfinite(iv.death)) bar["death"] = iv.death;
            else bar["death"] = "inf";
            bars.push_back(bar);
        }
    return bars;
}

std::vector<ingest::CurveRecord> deterministic_subsample(
    const std::vector<ingest::CurveRecord>& records, std::size_t n, std::uint64_t seed) {
    if (n == 0 || n >= records.size()) return records;
    auto view = ingest::make_view(records, [](const ingest::CurveRecord&) { return true; },
                                  "subsample", seed);
    return ingest::sample(records, view, n);
}

json experiment_json(const ml::ModelReport& report) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["model"] = ml::model_name(report.spec.model);
    j["target"] = report.spec.target;
    j["features"] = report.feature_names;
    j["k"] = report.spec.k;
    j["seed"] = report.spec.seed;
    j["slog_a4a6"] = report.spec.slog_a4a6;
    if (report.spec.model == ml::ModelKind::gbt) {
        j["gbt"] = {{"n_trees", report.spec.gbt.n_trees},
                    {"max_depth", report.spec.gbt.max_depth},
                    {"learning_rate", report.spec.gbt.learning_rate},
                    {"min_child_weight", report.spec.gbt.min_child_weight},
                    {"subsample", report.spec.gbt.subsample},
                    {"reg_lambda", report.spec.gbt.reg_lambda}};
    }
    for (const auto& [name, ms] : report.metrics) {
        j["metrics"][name] = {{"per_fold", ms.per_fold}, {"mean", ms.mean}, {"std", ms.stddev}};
    }
    j["importances"] = report.importances;
    if (report.confusion_matrix) {
        const auto& cm = *report.confusion_matrix;
        j["confusion"] = {{"labels", cm.labels},
                          {"counts", cm.counts},
                          {"normalized", cm.normalized}};
        j["confusion_difference"] = report.confusion_difference;
    }
    return j;
}

} // namespace

int run_ingest(const std::string& input, const std::string& map_path,
               const std::string& out_cache) {
    return guard([&] {
        auto map = map_path.empty() ? ingest::default_column_map()
                                    : ingest::load_column_map(map_path);
        auto parsed = ingest::parse_table(input, map);
        if (parsed.records.empty()) {
            std::cerr << "data error: no parseable rows in " << input << "\n";
            return kDataError;
        }
        ingest::write_cache(parsed.records, out_cache);
        std::vector<std::string> failures;
        for (const auto& e : parsed.errors)
            failures.push_back("line " + std::to_string(e.line) + " [" + e.field + "]: " +
                               e.message);
        json config = {{"input", input}, {"map", map_path}, {"out", out_cache}};
        write_manifest(out_cache, "ingest", config, {out_cache}, failures);
        return kOk;
    });
}

int run_validate(const std::string& cache, const std::string& report_path, bool recompute) {
    return guard([&] {
        auto records = load(cache);
        json violations = json::array();
        for (std::size_t i = 0; i < records.size(); ++i) {
            for (const auto& v : ingest::validate(records[i]))
                violations.push_back(
                    {{"line", i}, {"field", v.field}, {"violation", v.message}});
            if (!recompute) continue;
            const auto& r = records[i];
            try {
                double omega = ec::real_period(r.curve());
                if (std::fabs(omega - r.omega) > 1e-4 * std::max(1e-12, std::fabs(r.omega)))
                    violations.push_back({{"line", i},
                                          {"field", "omega"},
                                          {"violation", "recomputed period " +
                                                            std::to_string(omega) +
                                                            " disagrees with column"}});
            } catch (const std::exception& ex) {
                violations.push_back(
                    {{"line", i}, {"field", "omega"}, {"violation", ex.what()}});
            }
            if (r.generators && static_cast<int>(r.generators->size()) == r.rank && r.rank > 0) {
                auto reg = ec::regulator(r.curve(), *r.generators);
                if (reg.precise && std::fabs(reg.value - r.regulator) > 1e-3)
                    violations.push_back({{"line", i},
                                          {"field", "regulator"},
                                          {"violation", "recomputed regulator " +
                                                            std::to_string(reg.value) +
                                                            " disagrees with column"}});
            }
        }
        json report;
        report["schema_version"] = kSchemaVersion;
        report["records"] = records.size();
        report["recompute"] = recompute;
        report["violations"] = violations;
        write_text(report_path, report.dump(2) + "\n");
        json config = {{"cache", cache}, {"recompute", recompute}};
        write_manifest(report_path, "validate", config, {report_path});
        return violations.empty() ? kOk : kDataError;
    });
}

int run_stats(const std::string& cache, const std::string& job, const std::string& out,
              std::uint64_t seed) {
    return guard([&] {
        auto records = load(cache);
        json report;
        report["schema_version"] = kSchemaVersion;
        report["job"] = job;
        report["seed"] = seed;

        if (job == "tally") {
            auto table = stats::tally_rank_by_triple(records);
            json rows = json::array();
            for (const auto& [triple, counts] : table.counts) {
                auto [a1, a2, a3] = triple;
                rows.push_back({{"a1", a1}, {"a2", a2}, {"a3", a3}, {"counts", counts}});
            }
            report["rows"] = rows;
            report["total"] = table.total;
        } else if (job == "pmf") {
            std::vector<double> a4(records.size()), a6(records.size());
            for (std::size_t i = 0; i < records.size(); ++i) {
                a4[i] = records[i].a4.get_d();
                a6[i] = records[i].a6.get_d();
            }
            report["a4"] = histogram_json(stats::histogram(a4, stats::Binning::symlog, 101));
            report["a6"] = histogram_json(stats::histogram(a6, stats::Binning::symlog, 101));
            auto joint = stats::joint_histogram(a4, a6, 101);
            report["joint"] = {{"x", histogram_json(joint.x_axis)},
                               {"y", histogram_json(joint.y_axis)},
                               {"masses", joint.masses}};
        } else if (job == "fit-d") {
            std::vector<double> d;
            for (const auto& r : records)
                if (r.a4 > 0 && r.a6 > 0) {
                    double x4 = r.a4.get_d(), x6 = r.a6.get_d();
                    d.push_back(std::log10(std::sqrt(x4 * x4 + x6 * x6)));
                }
            if (d.size() < 2) throw stats::FitError("fit-d: too few rows with a4>0 and a6>0");
            stats::FitOptions opt;
            opt.seed = seed;
            report["n"] = d.size();
            report["median"] = stats::quantile(d, 0.5);
            report["fit"] = fit_json(stats::fit_beta_scaled(d, opt));
            report["histogram"] = histogram_json(stats::histogram(d, stats::Binning::linear, 80));
        } else if (job == "fit-rhs") {
            std::vector<double> rhs;
            for (const auto& r : records) rhs.push_back(record_rhs(r));
            stats::FitOptions opt;
            opt.seed = seed;
            auto sel = stats::fit_select_aic(rhs, stats::default_registry(), opt);
            json ranked = json::array();
            for (const auto& fr : sel.ranked) ranked.push_back(fit_json(fr));
            json failures = json::array();
            for (const auto& [fam, why] : sel.failures)
                failures.push_back({{"family", stats::family_name(fam)}, {"error", why}});
            report["ranked"] = ranked;
            report["failures"] = failures;
            report["histogram"] = histogram_json(stats::histogram(rhs, stats::Binning::linear, 80));
        } else if (job == "perm") {
            std::vector<double> even, odd;
            for (const auto& r : records)
                (mpz_even_p(r.conductor.get_mpz_t()) ? even : odd).push_back(record_rhs(r));
            if (even.empty() || odd.empty())
                throw ingest::ConfigError("perm: need both even- and odd-conductor rows");
            auto res = stats::permutation_test(even, odd, 999, seed);
            report["statistic"] = res.statistic;
            report["p_value"] = res.p_value;
            report["n_perm"] = res.n_perm;
            report["warnings"] = res.warnings;
            report["groups"] = {{"even_N", even.size()}, {"odd_N", odd.size()}};
        } else if (job == "corr" || job == "groupstats") {
            if (job == "corr") {
                std::vector<std::string> names = {"slog_a4",  "slog_a6",   "conductor", "rank",
                                                  "torsion",  "tamagawa",  "omega",     "regulator",
                                                  "sha"};
                std::vector<std::vector<double>> cols(names.size(),
                                                      std::vector<double>(records.size()));
                for (std::size_t i = 0; i < records.size(); ++i) {
                    const auto& r = records[i];
                    cols[0][i] = stats::slog(r.a4.get_d());
                    cols[1][i] = stats::slog(r.a6.get_d());
                    cols[2][i] = r.conductor.get_d();
                    cols[3][i] = r.rank;
                    cols[4][i] = r.torsion_order;
                    cols[5][i] = static_cast<double>(r.tamagawa_product);
                    cols[6][i] = r.omega;
                    cols[7][i] = r.regulator;
                    cols[8][i] = r.sha_order;
                }
                report["columns"] = names;
                for (auto method : {stats::CorrMethod::pearson, stats::CorrMethod::spearman}) {
                    auto corr = stats::correlation_matrix(cols, method);
                    json rho = json::array(), defined = json::array();
                    for (std::size_t i = 0; i < corr.rho.size(); ++i) {
                        rho.push_back(corr.rho[i]);
                        defined.push_back(corr.defined[i]);
                    }
                    const char* name =
                        method == stats::CorrMethod::pearson ? "pearson" : "spearman";
                    report[name] = {{"rho", rho}, {"defined", defined}};
                }
            } else {
                for (auto col : {stats::CoeffColumn::a4, stats::CoeffColumn::a6}) {
                    json rows = json::array();
                    for (const auto& row : stats::group_stats(records, col)) {
                        auto [a1, a2, a3] = row.triple;
                        rows.push_back({{"a1", a1},
                                        {"a2", a2},
                                        {"a3", a3},
                                        {"rank", row.rank},
                                        {"size", row.size},
                                        {"mean", row.mean},
                                        {"stddev", row.stddev},
                                        {"stddev_defined", row.stddev_defined},
                                        {"median", row.median},
                                        {"zero_count", row.zero_count}});
                    }
                    report[col == stats::CoeffColumn::a4 ? "a4" : "a6"] = rows;
                }
            }
        } else {
            throw ingest::ConfigError(
                "unknown stats job: " + job +
                " (expected tally|pmf|fit-d|fit-rhs|perm|corr|groupstats)");
        }

        write_text(out, report.dump(2) + "\n");
        json config = {{"cache", cache}, {"job", job}, {"seed", seed}};
        write_manifest(out, "stats", config, {out});
        return kOk;
    });
}

int run_tda(const std::string& cache, const std::vector<std::string>& columns,
            const std::string& split, std::size_t n, std::uint64_t seed, int max_dim,
            const std::string& out) {
    return guard([&] {
        auto records = load(cache);
        tda::PipelineSpec spec;
        spec.columns = columns;
        for (const auto& c : columns)
            spec.transforms.push_back(c == "a4" || c == "a6" ? tda::ColumnTransform::slog
                                                             : tda::ColumnTransform::identity);
        spec.n_sample = n;
        spec.seed = seed;
        spec.max_dim = max_dim;

        struct Group {
            std::string key;
            std::vector<ingest::CurveRecord> rows;
        };
        std::vector<Group> groups;
        if (split == "none" || split.empty()) {
            groups.push_back({"all", records});
        } else if (split == "rank") {
            for (int r = 0; r <= 4; ++r) {
                Group g{"rank=" + std::to_string(r), {}};
                for (const auto& rec : records)
                    if (rec.rank == r) g.rows.push_back(rec);
                if (!g.rows.empty()) groups.push_back(std::move(g));
            }
        } else if (split == "parity" || split == "mod3") {
            int mod = split == "parity" ? 2 : 3;
            for (int residue = 0; residue < mod; ++residue) {
                Group g{"N%" + std::to_string(mod) + "=" + std::to_string(residue), {}};
                for (const auto& rec : records)
                    if (static_cast<int>(mpz_fdiv_ui(rec.conductor.get_mpz_t(),
                                                     static_cast<unsigned long>(mod))) == residue)
                        g.rows.push_back(rec);
                if (!g.rows.empty()) groups.push_back(std::move(g));
            }
        } else {
            throw ingest::ConfigError("unknown split: " + split);
        }

        json report;
        report["schema_version"] = kSchemaVersion;
        report["columns"] = columns;
        report["split"] = split.empty() ? "none" : split;
        report["n"] = n;
        report["seed"] = seed;
        report["max_dim"] = max_dim;
        json splits = json::array();
        for (const auto& g : groups) {
            if (n > 0 && g.rows.size() < n)
                throw ingest::ConfigError("tda: split " + g.key + " has only " +
                                          std::to_string(g.rows.size()) + " rows, need " +
                                          std::to_string(n));
            auto barcode = tda::barcode_pipeline(g.rows, spec);
            splits.push_back({{"key", g.key}, {"rows", g.rows.size()}, {"bars", barcode_json(barcode)}});
        }
        report["splits"] = splits;
        write_text(out, report.dump(2) + "\n");
        json config = {{"cache", cache}, {"columns", columns}, {"split", split},
                       {"n", n},         {"seed", seed},       {"max_dim", max_dim}};
        write_manifest(out, "tda", config, {out});
        return kOk;
    });
}

int run_ml(const std::string& cache, const std::string& target, const std::string& features,
           const std::string& model, std::size_t k, std::uint64_t seed, const std::string& out,
           std::size_t subsample) {
    return guard([&] {
        auto records = deterministic_subsample(load(cache), subsample, seed);
        ml::ExperimentSpec spec;
        spec.target = canonical_target(target);
        spec.features = ml::feature_set(features, spec.target);
        spec.model = ml::model_from_name(model);
        spec.k = k;
        spec.seed = seed;
        auto report = ml::run_experiment(records, spec);
        json j = experiment_json(report);
        j["rows"] = records.size();
        write_text(out, j.dump(2) + "\n");
        json config = {{"cache", cache},   {"target", spec.target}, {"features", features},
                       {"model", model},   {"k", k},                {"seed", seed},
                       {"subsample", subsample}};
        write_manifest(out, "ml", config, {out});
        return kOk;
    });
}

int run_ap(const std::string& cache, const std::string& label, std::uint64_t pmax,
           const std::string& out) {
    return guard([&] {
        auto records = load(cache);
        const ingest::CurveRecord* rec = nullptr;
        for (const auto& r : records)
            if (r.label == label) {
                rec = &r;
                break;
            }
        if (!rec) {
            std::cerr << "data error: label not found: " << label << "\n";
            return kDataError;
        }
        std::string csv = "# " + label + ": local data for p <= " + std::to_string(pmax) +
                          "\np,reduction,a_p\n";
        for (std::uint64_t p = 2; p <= pmax; ++p) {
            if (!ec::is_prime(p)) continue;
            auto lf = ec::local_factor(rec->curve(), p, rec->conductor,
                                       std::max<std::uint64_t>(pmax + 1, ec::kDefaultPointCountBound));
            const char* red = lf.reduction == ec::Reduction::good ? "good"
                              : lf.reduction == ec::Reduction::multiplicative ? "multiplicative"
                                                                              : "additive";
            csv += std::to_string(p) + "," + red + "," + std::to_string(lf.a_p) + "\n";
        }
        write_text(out, csv);
        json config = {{"cache", cache}, {"label", label}, {"pmax", pmax}};
        write_manifest(out, "ap", config, {out});
        return kOk;
    });
}

std::vector<std::string> reproduce_ids() {
    return {"fig1", "table-tally", "fig4", "rhs-fit", "table3"};
}

int run_reproduce(const std::string& cache, const std::string& id, const std::string& out_dir,
                  std::uint64_t seed) {
    return guard([&] {
        auto ids = reproduce_ids();
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
            std::string valid;
            for (const auto& v : ids) valid += (valid.empty() ? "" : ", ") + v;
            std::cerr << "config error: unknown id '" << id << "'; valid ids: " << valid << "\n";
            return kConfigError;
        }
        fs::create_directories(out_dir);
        const std::string base = (fs::path(out_dir) / id).string();

        if (id == "fig1") {
            auto records = load(cache);
            std::string csv = "# scatter data: sLog(a4), sLog(a6), rank\nslog_a4,slog_a6,rank\n";
            for (const auto& r : records)
                csv += std::to_string(stats::slog(r.a4.get_d())) + "," +
                       std::to_string(stats::slog(r.a6.get_d())) + "," + std::to_string(r.rank) +
                       "\n";
            write_text(base + ".csv", csv);
            write_manifest(base + ".csv", "reproduce", {{"id", id}, {"cache", cache}},
                           {base + ".csv"});
            return kOk;
        }
        if (id == "table-tally") return run_stats(cache, "tally", base + ".json", seed);
        if (id == "fig4") return run_stats(cache, "pmf", base + ".json", seed);
        if (id == "rhs-fit") return run_stats(cache, "fit-rhs", base + ".json", seed);

        // table3: coefficients-only regression, GBT vs dummy NMAE per target
        int worst = kOk;
        std::vector<std::string> artifacts;
        for (const std::string target : {"conductor", "tamagawa", "omega"}) {
            for (const std::string model : {"gbt", "dummy"}) {
                std::string out = base + "_" + target + "_" + model + ".json";
                int rc = run_ml(cache, target, "coeffs", model, 5, seed, out, 20000);
                worst = std::max(worst, rc);
                artifacts.push_back(out);
            }
        }
        write_manifest(base + ".json", "reproduce", {{"id", id}, {"cache", cache}, {"seed", seed}},
                       artifacts);
        return worst;
    });
}

int run_report(const std::string& dir, const std::string& out) {
    return guard([&] {
        json summary;
        summary["schema_version"] = kSchemaVersion;
        json jobs_list = json::array();
        std::vector<fs::path> manifests;
        for (const auto& entry : fs::recursive_directory_iterator(dir))
            if (entry.is_regular_file() &&
                entry.path().filename().string().ends_with(".manifest.json"))
                manifests.push_back(entry.path());
        std::sort(manifests.begin(), manifests.end());
        for (const auto& path : manifests) {
            std::ifstream in(path);
            json m = json::parse(in, nullptr, false);
            if (m.is_discarded()) continue;
            jobs_list.push_back({{"manifest", path.string()},
                                 {"job", m.value("job", "?")},
                                 {"artifacts", m.value("artifacts", json::array())},
                                 {"failures", m.value("failures", json::array())}});
        }
        summary["jobs"] = jobs_list;
        write_text(out, summary.dump(2) + "\n");
        return kOk;
    });
}

} // namespace bsdlab::jobs
