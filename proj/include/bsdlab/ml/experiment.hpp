#pragma once
// Cross-validated experiments over curve records: dummy/linear/logistic/GBT
// models, the paper-style metric suite, importances, confusion matrices.

#include "bsdlab/ingest.hpp"
#include "bsdlab/ml/gbt.hpp"
#include "bsdlab/ml/metrics.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bsdlab::ml {

struct Fold {
    std::vector<std::size_t> train, test;
};
// disjoint test folds covering [0, n); deterministic in seed
std::vector<Fold> kfold(std::size_t n, std::size_t k, std::uint64_t seed);

struct FeatureMatrix {
    std::size_t n = 0, m = 0;
    std::vector<double> X; // row-major
    std::vector<std::string> feature_names;
    std::string target_name;
    bool class_target = false;
    std::vector<double> y;      // regression targets
    std::vector<int> y_class;   // class targets (when class_target)

    std::span<const double> row(std::size_t i) const { return {X.data() + i * m, m}; }
};

// feature sets: "coeffs" = a1,a2,a3,a4,a6; "mixed" = everything except the
// target; a4/a6 are sLog-transformed when slog_a4a6 is set
FeatureMatrix build_matrix(const std::vector<ingest::CurveRecord>& records,
                           const std::vector<std::string>& features, const std::string& target,
                           bool slog_a4a6 = true);
std::vector<std::string> feature_set(const std::string& kind, const std::string& target);

enum class ModelKind { dummy, linear, logistic, gbt };
ModelKind model_from_name(const std::string& name);
const char* model_name(ModelKind k);

struct ExperimentSpec {
    std::vector<std::string> features;
    std::string target;
    ModelKind model = ModelKind::gbt;
    GbtParams gbt;
    std::size_t k = 5;
    std::uint64_t seed = 0;
    bool slog_a4a6 = true;
};

struct MetricSummary {
    std::vector<double> per_fold;
    double mean = 0.0;
    double stddev = 0.0; // sample std over folds
};

struct ModelReport {
    ExperimentSpec spec;
    bool classification = false;
    std::map<std::string, MetricSummary> metrics; // nmae/rmse or f1micro/f1macro/mcc
    std::vector<double> importances;              // per feature, sum 1 (or all zero)
    std::vector<std::string> feature_names;
    std::optional<Confusion> confusion_matrix;          // pooled over folds
    std::optional<Confusion> dummy_confusion;           // same folds, dummy model
    std::vector<double> confusion_difference;           // normalized model - dummy
};

ModelReport run_experiment(const std::vector<ingest::CurveRecord>& records,
                           const ExperimentSpec& spec);
ModelReport run_experiment_matrix(const FeatureMatrix& fm, const ExperimentSpec& spec);

struct LearningCurvePoint {
    double fraction = 0.0;
    MetricSummary metric; // NMAE (regression) or MCC (classification)
    std::string error;    // non-empty when this point failed
};
std::vector<LearningCurvePoint> learning_curve(const FeatureMatrix& fm, const ExperimentSpec& spec,
                                               const std::vector<double>& fractions);

} // namespace bsdlab::ml
