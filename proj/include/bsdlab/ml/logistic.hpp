#pragma once
// Multinomial logistic regression: softmax + ridge, Newton iterations.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsdlab::ml {

struct ConvergenceError : std::runtime_error {
    double grad_norm;
    ConvergenceError(const std::string& what, double g) : std::runtime_error(what), grad_norm(g) {}
};

struct LogisticOptions {
    int max_iters = 200;
    double tol = 1e-8;    // gradient norm target
    double ridge = 1e-6;  // L2 on all weights including intercepts
};

struct LogisticModel {
    std::vector<int> classes;   // sorted distinct labels
    std::size_t m = 0;          // feature count
    std::vector<double> W;      // K x (m+1), row k = [intercept, weights...]
    int iterations = 0;
    double grad_norm = 0.0;

    std::vector<double> predict_proba(std::span<const double> row) const;
    int predict(std::span<const double> row) const;
};

LogisticModel logistic_fit(std::span<const double> X, std::size_t n, std::size_t m,
                           std::span<const int> y, const LogisticOptions& opt = {});

} // namespace bsdlab::ml
