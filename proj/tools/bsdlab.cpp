// bsdlab: workbench over a columnar curve cache. Subcommands map 1:1 to jobs;
// exit codes: 0 ok, 2 config error, 3 data error, 4 numeric error.

#include "bsdlab/jobs.hpp"
#include "bsdlab/kernels.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"bsdlab: elliptic-curve database statistics workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("bsdlab 1.0 (") +
                                          std::string(bsdlab::kernels::active_name()) + " kernels)");

    std::string input, map_path, cache, out, report_path;
    std::uint64_t seed = 0;

    auto* ingest = app.add_subcommand("ingest", "parse a curve table into a cache");
    ingest->add_option("--input", input, "input table (csv/whitespace)")->required();
    ingest->add_option("--map", map_path, "column mapping file (field = index lines)");
    ingest->add_option("--out", out, "output cache path")->required();

    bool recompute = false;
    auto* validate = app.add_subcommand("validate", "check record invariants");
    validate->add_option("--cache", cache, "cache path")->required();
    validate->add_option("--report", report_path, "violation report (json)")->required();
    validate->add_flag("--recompute", recompute, "recompute period/regulator and compare");

    std::string stats_job;
    auto* stats = app.add_subcommand("stats", "descriptive statistics and fits");
    stats->add_option("--cache", cache)->required();
    stats->add_option("--job", stats_job, "tally|pmf|fit-d|fit-rhs|perm|corr|groupstats")
        ->required();
    stats->add_option("--out", out)->required();
    stats->add_option("--seed", seed);

    std::vector<std::string> columns;
    std::string split = "none";
    std::size_t n_sample = 0;
    int max_dim = 1;
    auto* tda = app.add_subcommand("tda", "Vietoris-Rips barcodes");
    tda->add_option("--cache", cache)->required();
    tda->add_option("--columns", columns, "point-cloud columns")->required()->expected(-1);
    tda->add_option("--split", split, "none|rank|parity|mod3");
    tda->add_option("--n", n_sample, "sample size per split (0 = all rows)");
    tda->add_option("--seed", seed);
    tda->add_option("--maxdim", max_dim, "top homology dimension");
    tda->add_option("--out", out)->required();

    std::string target, features = "coeffs", model = "gbt";
    std::size_t k = 5, subsample = 0;
    auto* ml = app.add_subcommand("ml", "cross-validated model experiments");
    ml->add_option("--cache", cache)->required();
    ml->add_option("--target", target, "r|T|N|omega|R|sha|c (or full names)")->required();
    ml->add_option("--features", features, "coeffs|mixed");
    ml->add_option("--model", model, "gbt|linear|logistic|dummy");
    ml->add_option("--k", k, "folds");
    ml->add_option("--seed", seed);
    ml->add_option("--subsample", subsample, "row subsample (0 = all rows)");
    ml->add_option("--out", out)->required();

    std::string label;
    std::uint64_t pmax = 100;
    auto* ap = app.add_subcommand("ap", "local reduction data per prime");
    ap->add_option("--cache", cache)->required();
    ap->add_option("--curve", label, "curve label")->required();
    ap->add_option("--pmax", pmax, "largest prime");
    ap->add_option("--out", out)->required();

    std::string repro_id, out_dir = ".";
    auto* repro = app.add_subcommand("reproduce", "emit plot-ready data for a figure/table id");
    repro->add_option("--cache", cache)->required();
    repro->add_option("--id", repro_id, "figure/table id (see --list)")->required();
    repro->add_option("--outdir", out_dir);
    repro->add_option("--seed", seed);

    std::string report_dir;
    auto* report = app.add_subcommand("report", "aggregate manifests into a summary");
    report->add_option("--dir", report_dir)->required();
    report->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : bsdlab::jobs::kConfigError;
    }

    using namespace bsdlab::jobs;
    if (ingest->parsed()) return run_ingest(input, map_path, out);
    if (validate->parsed()) return run_validate(cache, report_path, recompute);
    if (stats->parsed()) return run_stats(cache, stats_job, out, seed);
    if (tda->parsed()) return run_tda(cache, columns, split, n_sample, seed, max_dim, out);
    if (ml->parsed()) return run_ml(cache, target, features, model, k, seed, out, subsample);
    if (ap->parsed()) return run_ap(cache, label, pmax, out);
    if (repro->parsed()) return run_reproduce(cache, repro_id, out_dir, seed);
    if (report->parsed()) return run_report(report_dir, out);
    std::cerr << "no subcommand\n";
    return kConfigError;
}
