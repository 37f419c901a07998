#include "bsdlab/ml/experiment.hpp"

#include "bsdlab/ml/linear.hpp"
#include "bsdlab/ml/logistic.hpp"
#include "bsdlab/parallel.hpp"
#include "bsdlab/rng.hpp"
#include "bsdlab/stats.hpp"
#include "bsdlab/tda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bsdlab::ml {

namespace {

const std::vector<std::string> kAllColumns = {"a1",      "a2",        "a3",      "a4",
                                              "a6",      "conductor", "rank",    "torsion",
                                              "tamagawa", "omega",    "regulator", "sha"};

MetricSummary summarize(std::vector<double> per_fold) {
    MetricSummary s;
    s.per_fold = std::move(per_fold);
    const std::size_t k = s.per_fold.size();
    for (double v : s.per_fold) s.mean += v / static_cast<double>(k);
    if (k > 1) {
        double ss = 0.0;
        for (double v : s.per_fold) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(k - 1));
    }
    return s;
}

int majority_class(std::span<const int> y) {
    std::map<int, std::size_t> counts;
    for (int v : y) ++counts[v];
    int best = y[0];
    std::size_t best_n = 0;
    for (const auto& [label, cnt] : counts)
        if (cnt > best_n) { // map order: ties resolve to the smallest label
            best = label;
            best_n = cnt;
        }
    return best;
}

std::vector<double> feature_stddevs(const FeatureMatrix& fm, std::span<const std::size_t> rows) {
    std::vector<double> sd(fm.m, 0.0);
    for (std::size_t j = 0; j < fm.m; ++j) {
        double mean = 0.0;
        for (std::size_t i : rows) mean += fm.X[i * fm.m + j] / static_cast<double>(rows.size());
        double ss = 0.0;
        for (std::size_t i : rows) {
            double d = fm.X[i * fm.m + j] - mean;
            ss += d * d;
        }
        sd[j] = std::sqrt(ss / static_cast<double>(rows.size()));
    }
    return sd;
}

struct FoldOutcome {
    std::map<std::string, double> metrics;
    std::vector<double> ledger;       // raw importance mass per feature
    std::vector<int> y_true, y_pred, y_dummy;
    std::string error;
};

} // namespace

std::vector<Fold> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold: k must be >= 2");
    if (n < k) throw std::invalid_argument("kfold: n < k");
    Rng rng = Rng::stream(seed, 0);
    auto perm = rng.permutation(n);
    std::vector<Fold> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::size_t lo = f * n / k, hi = (f + 1) * n / k;
        folds[f].test.assign(perm.begin() + lo, perm.begin() + hi);
        folds[f].train.reserve(n - (hi - lo));
        folds[f].train.insert(folds[f].train.end(), perm.begin(), perm.begin() + lo);
        folds[f].train.insert(folds[f].train.end(), perm.begin() + hi, perm.end());
    }
    return folds;
}

std::vector<std::string> feature_set(const std::string& kind, const std::string& target) {
    if (kind == "coeffs") return {"a1", "a2", "a3", "a4", "a6"};
    if (kind == "mixed") {
        std::vector<std::string> out;
        for (const auto& c : kAllColumns)
            if (c != target) out.push_back(c);
        return out;
    }
    throw ingest::ConfigError("unknown feature set: " + kind);
}

ModelKind model_from_name(const std::string& name) {
    if (name == "dummy") return ModelKind::dummy;
    if (name == "linear") return ModelKind::linear;
    if (name == "logistic") return ModelKind::logistic;
    if (name == "gbt") return ModelKind::gbt;
    throw ingest::ConfigError("unknown model: " + name);
}

const char* model_name(ModelKind k) {
    switch (k) {
        case ModelKind::dummy: return "dummy";
        case ModelKind::linear: return "linear";
        case ModelKind::logistic: return "logistic";
        case ModelKind::gbt: return "gbt";
    }
    return "?";
}

FeatureMatrix build_matrix(const std::vector<ingest::CurveRecord>& records,
                           const std::vector<std::string>& features, const std::string& target,
                           bool slog_a4a6) {
    for (const auto& f : features)
        if (f == target) throw ingest::ConfigError("target appears among features: " + target);
    FeatureMatrix fm;
    fm.n = records.size();
    fm.m = features.size();
    fm.feature_names = features;
    fm.target_name = target;
    fm.class_target = target == "rank" || target == "torsion";
    fm.X.resize(fm.n * fm.m);
    for (std::size_t i = 0; i < fm.n; ++i)
        for (std::size_t j = 0; j < fm.m; ++j) {
            double v = tda::column_value(records[i], features[j]);
            if (slog_a4a6 && (features[j] == "a4" || features[j] == "a6")) v = stats::slog(v);
            fm.X[i * fm.m + j] = v;
        }
    if (fm.class_target) {
        fm.y_class.resize(fm.n);
        for (std::size_t i = 0; i < fm.n; ++i)
            fm.y_class[i] = static_cast<int>(tda::column_value(records[i], target));
    } else {
        fm.y.resize(fm.n);
        for (std::size_t i = 0; i < fm.n; ++i) fm.y[i] = tda::column_value(records[i], target);
    }
    return fm;
}

ModelReport run_experiment_matrix(const FeatureMatrix& fm, const ExperimentSpec& spec) {
    const bool classify = fm.class_target;
    if (spec.model == ModelKind::linear && classify)
        throw ingest::ConfigError("linear model requires a real target");
    if (spec.model == ModelKind::logistic && !classify)
        throw ingest::ConfigError("logistic model requires a class target");

    auto folds = kfold(fm.n, spec.k, spec.seed);
    std::vector<FoldOutcome> outcomes(folds.size());

    parallel_chunks(folds.size(), folds.size(), [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t f = lo; f < hi; ++f) {
            FoldOutcome& out = outcomes[f];
            try {
                const Fold& fold = folds[f];
                std::vector<double> Xtr(fold.train.size() * fm.m);
                for (std::size_t i = 0; i < fold.train.size(); ++i)
                    std::copy_n(fm.X.data() + fold.train[i] * fm.m, fm.m, Xtr.data() + i * fm.m);
                out.ledger.assign(fm.m, 0.0);

                if (!classify) {
                    std::vector<double> ytr(fold.train.size());
                    for (std::size_t i = 0; i < fold.train.size(); ++i) ytr[i] = fm.y[fold.train[i]];
                    std::vector<double> yte(fold.test.size()), pred(fold.test.size());
                    for (std::size_t i = 0; i < fold.test.size(); ++i) yte[i] = fm.y[fold.test[i]];

                    if (spec.model == ModelKind::dummy) {
                        double mean = std::accumulate(ytr.begin(), ytr.end(), 0.0) /
                                      static_cast<double>(ytr.size());
                        std::fill(pred.begin(), pred.end(), mean);
                    } else if (spec.model == ModelKind::linear) {
                        auto model = ols_fit(Xtr, fold.train.size(), fm.m, ytr, fm.feature_names);
                        for (std::size_t i = 0; i < fold.test.size(); ++i)
                            pred[i] = model.predict(fm.row(fold.test[i]));
                        auto sd = feature_stddevs(fm, fold.train);
                        for (std::size_t j = 0; j < fm.m; ++j)
                            out.ledger[j] = std::fabs(model.coefs[j + 1].value) * sd[j];
                    } else {
                        GbtParams prm = spec.gbt;
                        prm.seed = spec.seed ^ (0x9e3779b97f4a7c15ULL * (f + 1));
                        auto model = gbt_fit_regression(Xtr, fold.train.size(), fm.m, ytr, prm);
                        for (std::size_t i = 0; i < fold.test.size(); ++i)
                            pred[i] = model.predict_value(fm.row(fold.test[i]));
                        out.ledger = model.gain_ledger;
                    }
                    out.metrics["nmae"] = nmae(yte, pred);
                    out.metrics["rmse"] = rmse(yte, pred);
                } else {
                    std::vector<int> ytr(fold.train.size());
                    for (std::size_t i = 0; i < fold.train.size(); ++i)
                        ytr[i] = fm.y_class[fold.train[i]];
                    std::vector<int> yte(fold.test.size()), pred(fold.test.size());
                    for (std::size_t i = 0; i < fold.test.size(); ++i)
                        yte[i] = fm.y_class[fold.test[i]];

                    int dummy_label = majority_class(ytr);
                    if (spec.model == ModelKind::dummy) {
                        std::fill(pred.begin(), pred.end(), dummy_label);
                    } else if (spec.model == ModelKind::logistic) {
                        auto model = logistic_fit(Xtr, fold.train.size(), fm.m, ytr);
                        for (std::size_t i = 0; i < fold.test.size(); ++i)
                            pred[i] = model.predict(fm.row(fold.test[i]));
                        auto sd = feature_stddevs(fm, fold.train);
                        const std::size_t p = fm.m + 1;
                        for (std::size_t j = 0; j < fm.m; ++j) {
                            double mass = 0.0;
                            for (std::size_t k = 0; k < model.classes.size(); ++k)
                                mass += std::fabs(model.W[k * p + j + 1]);
                            out.ledger[j] = mass * sd[j];
                        }
                    } else {
                        GbtParams prm = spec.gbt;
                        prm.seed = spec.seed ^ (0x9e3779b97f4a7c15ULL * (f + 1));
                        auto model = gbt_fit_classification(Xtr, fold.train.size(), fm.m, ytr, prm);
                        for (std::size_t i = 0; i < fold.test.size(); ++i)
                            pred[i] = model.predict_class(fm.row(fold.test[i]));
                        out.ledger = model.gain_ledger;
                    }
                    out.metrics["f1micro"] = f1(yte, pred, F1Average::micro);
                    out.metrics["f1macro"] = f1(yte, pred, F1Average::macro);
                    out.metrics["mcc"] = mcc(yte, pred);
                    out.y_true = yte;
                    out.y_pred = std::move(pred);
                    out.y_dummy.assign(yte.size(), dummy_label);
                }
            } catch (const std::exception& ex) {
                out.error = ex.what();
            }
        }
    });

    for (const auto& out : outcomes)
        if (!out.error.empty()) throw std::runtime_error("fold failed: " + out.error);

    ModelReport report;
    report.spec = spec;
    report.classification = classify;
    report.feature_names = fm.feature_names;

    for (const auto& [name, _] : outcomes[0].metrics) {
        std::vector<double> per_fold;
        for (const auto& out : outcomes) per_fold.push_back(out.metrics.at(name));
        report.metrics[name] = summarize(std::move(per_fold));
    }

    report.importances.assign(fm.m, 0.0);
    for (const auto& out : outcomes)
        for (std::size_t j = 0; j < fm.m; ++j) report.importances[j] += out.ledger[j];
    double total = std::accumulate(report.importances.begin(), report.importances.end(), 0.0);
    if (total > 0)
        for (auto& v : report.importances) v /= total;

    if (classify) {
        std::vector<int> yt, yp, yd;
        for (const auto& out : outcomes) {
            yt.insert(yt.end(), out.y_true.begin(), out.y_true.end());
            yp.insert(yp.end(), out.y_pred.begin(), out.y_pred.end());
            yd.insert(yd.end(), out.y_dummy.begin(), out.y_dummy.end());
        }
        report.confusion_matrix = confusion(yt, yp);
        report.dummy_confusion = confusion(yt, yd);
        // align on the model confusion's label set
        const auto& cm = *report.confusion_matrix;
        const auto& dm = *report.dummy_confusion;
        report.confusion_difference.assign(cm.k * cm.k, 0.0);
        for (std::size_t i = 0; i < cm.k; ++i)
            for (std::size_t j = 0; j < cm.k; ++j) {
                double d = 0.0;
                auto it_i = std::find(dm.labels.begin(), dm.labels.end(), cm.labels[i]);
                auto it_j = std::find(dm.labels.begin(), dm.labels.end(), cm.labels[j]);
                if (it_i != dm.labels.end() && it_j != dm.labels.end())
                    d = dm.norm_at(static_cast<std::size_t>(it_i - dm.labels.begin()),
                                   static_cast<std::size_t>(it_j - dm.labels.begin()));
                report.confusion_difference[i * cm.k + j] = cm.norm_at(i, j) - d;
            }
    }
    return report;
}

ModelReport run_experiment(const std::vector<ingest::CurveRecord>& records,
                           const ExperimentSpec& spec) {
    FeatureMatrix fm = build_matrix(records, spec.features, spec.target, spec.slog_a4a6);
    return run_experiment_matrix(fm, spec);
}

std::vector<LearningCurvePoint> learning_curve(const FeatureMatrix& fm, const ExperimentSpec& spec,
                                               const std::vector<double>& fractions) {
    for (double f : fractions)
        if (!(f > 0.0 && f < 1.0))
            throw ingest::ConfigError("learning_curve: fractions must lie in (0,1)");
    auto folds = kfold(fm.n, spec.k, spec.seed);
    std::vector<LearningCurvePoint> points;
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
        LearningCurvePoint point;
        point.fraction = fractions[fi];
        try {
            std::vector<double> per_fold;
            for (std::size_t f = 0; f < folds.size(); ++f) {
                Fold sub = folds[f];
                Rng rng = Rng::stream(spec.seed ^ 0xfeedULL, fi * folds.size() + f);
                auto perm = rng.permutation(sub.train.size());
                std::size_t keep = std::max<std::size_t>(
                    1, static_cast<std::size_t>(point.fraction *
                                                static_cast<double>(sub.train.size())));
                std::vector<std::size_t> train;
                train.reserve(keep);
                for (std::size_t i = 0; i < keep; ++i) train.push_back(sub.train[perm[i]]);
                sub.train = std::move(train);

                // single-fold experiment on the reduced training set
                FeatureMatrix sfm;
                sfm.m = fm.m;
                sfm.feature_names = fm.feature_names;
                sfm.target_name = fm.target_name;
                sfm.class_target = fm.class_target;
                auto add_row = [&](std::size_t i) {
                    sfm.X.insert(sfm.X.end(), fm.X.begin() + i * fm.m,
                                 fm.X.begin() + (i + 1) * fm.m);
                    if (fm.class_target) sfm.y_class.push_back(fm.y_class[i]);
                    else sfm.y.push_back(fm.y[i]);
                };
                for (std::size_t i : sub.train) add_row(i);
                for (std::size_t i : sub.test) add_row(i);
                sfm.n = sub.train.size() + sub.test.size();

                // fixed train/test boundary in the concatenated matrix
                const ExperimentSpec& sspec = spec;
                std::vector<Fold> one(1);
                one[0].train.resize(sub.train.size());
                std::iota(one[0].train.begin(), one[0].train.end(), 0);
                one[0].test.resize(sub.test.size());
                std::iota(one[0].test.begin(), one[0].test.end(), sub.train.size());

                std::vector<double> Xtr(one[0].train.size() * sfm.m);
                for (std::size_t i = 0; i < one[0].train.size(); ++i)
                    std::copy_n(sfm.X.data() + one[0].train[i] * sfm.m, sfm.m,
                                Xtr.data() + i * sfm.m);
                if (!sfm.class_target) {
                    std::vector<double> ytr, yte, pred;
                    for (std::size_t i : one[0].train) ytr.push_back(sfm.y[i]);
                    for (std::size_t i : one[0].test) yte.push_back(sfm.y[i]);
                    pred.resize(yte.size());
                    if (sspec.model == ModelKind::dummy) {
                        double mean = std::accumulate(ytr.begin(), ytr.end(), 0.0) /
                                      static_cast<double>(ytr.size());
                        std::fill(pred.begin(), pred.end(), mean);
                    } else if (sspec.model == ModelKind::linear) {
                        auto model = ols_fit(Xtr, ytr.size(), sfm.m, ytr, sfm.feature_names);
                        for (std::size_t i = 0; i < yte.size(); ++i)
                            pred[i] = model.predict(sfm.row(one[0].test[i]));
                    } else {
                        GbtParams prm = sspec.gbt;
                        prm.seed = sspec.seed ^ (f + 1);
                        auto model = gbt_fit_regression(Xtr, ytr.size(), sfm.m, ytr, prm);
                        for (std::size_t i = 0; i < yte.size(); ++i)
                            pred[i] = model.predict_value(sfm.row(one[0].test[i]));
                    }
                    per_fold.push_back(nmae(yte, pred));
                } else {
                    std::vector<int> ytr, yte, pred;
                    for (std::size_t i : one[0].train) ytr.push_back(sfm.y_class[i]);
                    for (std::size_t i : one[0].test) yte.push_back(sfm.y_class[i]);
                    pred.resize(yte.size());
                    if (sspec.model == ModelKind::dummy) {
                        std::fill(pred.begin(), pred.end(), majority_class(ytr));
                    } else if (sspec.model == ModelKind::logistic) {
                        auto model = logistic_fit(Xtr, ytr.size(), sfm.m, ytr);
                        for (std::size_t i = 0; i < yte.size(); ++i)
                            pred[i] = model.predict(sfm.row(one[0].test[i]));
                    } else {
                        GbtParams prm = sspec.gbt;
                        prm.seed = sspec.seed ^ (f + 1);
                        auto model = gbt_fit_classification(Xtr, ytr.size(), sfm.m, ytr, prm);
                        for (std::size_t i = 0; i < yte.size(); ++i)
                            pred[i] = model.predict_class(sfm.row(one[0].test[i]));
                    }
                    per_fold.push_back(mcc(yte, pred));
                }
            }
            point.metric = summarize(std::move(per_fold));
        } catch (const std::exception& ex) {
            point.error = ex.what();
        }
        points.push_back(std::move(point));
    }
    return points;
}

} // namespace bsdlab::ml
