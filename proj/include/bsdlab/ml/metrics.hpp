#pragma once
// Regression and classification metrics (NMAE, RMSE, F1, MCC, confusion).

#include <span>
#include <stdexcept>
#include <vector>

namespace bsdlab::ml {

struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// median(|y - yhat|) / (max(y) - min(y)); undefined-range error when the
// test targets are constant
double nmae(std::span<const double> y, std::span<const double> yhat);
double rmse(std::span<const double> y, std::span<const double> yhat);

enum class F1Average { micro, macro };
double f1(std::span<const int> y, std::span<const int> yhat, F1Average avg);

// generalized multiclass MCC; reduces to the binary formula for 2 classes
double mcc(std::span<const int> y, std::span<const int> yhat);

struct Confusion {
    std::vector<int> labels;            // sorted class labels in y or yhat
    std::vector<std::size_t> counts;    // row = truth, col = prediction
    std::vector<double> normalized;     // column-normalized counts
    std::size_t k = 0;

    std::size_t count_at(std::size_t truth, std::size_t pred) const {
        return counts[truth * k + pred];
    }
    double norm_at(std::size_t truth, std::size_t pred) const {
        return normalized[truth * k + pred];
    }
};
Confusion confusion(std::span<const int> y, std::span<const int> yhat);

} // namespace bsdlab::ml
