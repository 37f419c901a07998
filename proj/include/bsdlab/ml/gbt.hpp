#pragma once
// Gradient boosted trees from scratch: exact greedy split search, XGBoost-style
// gain, squared and softmax losses, deterministic for a given seed.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsdlab::ml {

struct GbtParams {
    int n_trees = 200;
    int max_depth = 6;
    double learning_rate = 0.1;
    double min_child_weight = 1.0; // minimum hessian mass per child
    double subsample = 1.0;        // row fraction per boosting round
    double reg_lambda = 1.0;       // L2 on leaf weights
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1; // -1: leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double weight = 0.0; // leaf value
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(std::span<const double> row) const {
        int idx = 0;
        while (nodes[idx].feature >= 0)
            idx = row[nodes[idx].feature] < nodes[idx].threshold ? nodes[idx].left
                                                                 : nodes[idx].right;
        return nodes[idx].weight;
    }
};

enum class GbtLoss { squared, softmax };

struct GBTModel {
    GbtParams params;
    GbtLoss loss = GbtLoss::squared;
    std::size_t m = 0;
    std::vector<int> classes;          // softmax only
    double base_score = 0.0;           // squared loss: mean of y
    std::vector<Tree> trees;           // round-major; softmax: K trees per round
    std::vector<double> gain_ledger;   // per-feature accumulated split gain
    std::vector<double> train_loss;    // per boosting round

    double predict_value(std::span<const double> row) const;        // regression
    std::vector<double> predict_scores(std::span<const double> row) const; // raw class scores
    int predict_class(std::span<const double> row) const;
    // gain ledger normalized to sum 1; all-zero when no split occurred
    std::vector<double> importances() const;
};

GBTModel gbt_fit_regression(std::span<const double> X, std::size_t n, std::size_t m,
                            std::span<const double> y, const GbtParams& params = {});
GBTModel gbt_fit_classification(std::span<const double> X, std::size_t n, std::size_t m,
                                std::span<const int> y, const GbtParams& params = {});

} // namespace bsdlab::ml
