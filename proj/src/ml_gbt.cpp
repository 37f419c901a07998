#include "bsdlab/ml/gbt.hpp"

#include "bsdlab/parallel.hpp"
#include "bsdlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace bsdlab::ml {

namespace {

struct SplitCandidate {
    double gain = -1.0;
    double threshold = 0.0;
    double g_left = 0.0, h_left = 0.0;
};

struct NodeStats {
    double g = 0.0, h = 0.0;
    int depth = 0;
};

double leaf_objective(double g, double h, double lam) { return g * g / (h + lam); }

// one boosted tree, level-wise exact greedy search over presorted features
Tree build_tree(std::span<const double> X, std::size_t n, std::size_t m,
                const std::vector<std::vector<std::uint32_t>>& order,
                std::span<const double> grad, std::span<const double> hess,
                const std::vector<char>& in_sample, const GbtParams& prm,
                std::vector<double>& ledger) {
    const double lam = prm.reg_lambda;
    Tree tree;
    std::vector<NodeStats> stats;

    std::vector<int> node_of(n, -1);
    NodeStats root;
    for (std::size_t i = 0; i < n; ++i)
        if (in_sample[i]) {
            node_of[i] = 0;
            root.g += grad[i];
            root.h += hess[i];
        }
    tree.nodes.push_back({-1, 0.0, -1, -1, -prm.learning_rate * root.g / (root.h + lam)});
    stats.push_back(root);

    std::vector<int> frontier{0};
    for (int depth = 0; depth < prm.max_depth && !frontier.empty(); ++depth) {
        std::vector<int> active;
        for (int nd : frontier)
            if (stats[nd].h >= 2.0 * prm.min_child_weight) active.push_back(nd);
        if (active.empty()) break;

        std::vector<int> active_idx(tree.nodes.size(), -1);
        for (std::size_t a = 0; a < active.size(); ++a) active_idx[active[a]] = static_cast<int>(a);

        const std::size_t na = active.size();
        std::vector<SplitCandidate> cand(m * na);
        parallel_chunks(m, worker_count(), [&](std::size_t, std::size_t lo, std::size_t hi) {
            std::vector<double> gl(na), hl(na), last(na);
            std::vector<char> has(na);
            for (std::size_t f = lo; f < hi; ++f) {
                std::fill(gl.begin(), gl.end(), 0.0);
                std::fill(hl.begin(), hl.end(), 0.0);
                std::fill(has.begin(), has.end(), 0);
                SplitCandidate* best = cand.data() + f * na;
                for (std::uint32_t r : order[f]) {
                    int nd = node_of[r];
                    if (nd < 0 || nd >= static_cast<int>(active_idx.size())) continue;
                    int a = active_idx[nd];
                    if (a < 0) continue;
                    double v = X[r * m + f];
                    if (has[a] && v > last[a]) {
                        double thr = 0.5 * (last[a] + v);
                        if (last[a] < thr && thr <= v) {
                            double hr = stats[nd].h - hl[a];
                            if (hl[a] >= prm.min_child_weight && hr >= prm.min_child_weight) {
                                double gr = stats[nd].g - gl[a];
                                double gain = 0.5 * (leaf_objective(gl[a], hl[a], lam) +
                                                     leaf_objective(gr, hr, lam) -
                                                     leaf_objective(stats[nd].g, stats[nd].h, lam));
                                if (gain > best[a].gain) best[a] = {gain, thr, gl[a], hl[a]};
                            }
                        }
                    }
                    gl[a] += grad[r];
                    hl[a] += hess[r];
                    last[a] = v;
                    has[a] = 1;
                }
            }
        });

        // deterministic merge: highest gain, then lowest feature index
        struct Chosen {
            int feature = -1;
            SplitCandidate c;
        };
        std::vector<Chosen> chosen(na);
        for (std::size_t f = 0; f < m; ++f)
            for (std::size_t a = 0; a < na; ++a)
                if (cand[f * na + a].gain > chosen[a].c.gain) {
                    chosen[a].feature = static_cast<int>(f);
                    chosen[a].c = cand[f * na + a];
                }

        std::vector<int> next_frontier;
        bool any_split = false;
        for (std::size_t a = 0; a < na; ++a) {
            if (chosen[a].c.gain <= 1e-12) continue;
            int nd = active[a];
            const SplitCandidate& c = chosen[a].c;
            double gr = stats[nd].g - c.g_left, hr = stats[nd].h - c.h_left;
            int left = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back({-1, 0.0, -1, -1, -prm.learning_rate * c.g_left / (c.h_left + lam)});
            stats.push_back({c.g_left, c.h_left, depth + 1});
            int right = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back({-1, 0.0, -1, -1, -prm.learning_rate * gr / (hr + lam)});
            stats.push_back({gr, hr, depth + 1});
            tree.nodes[nd].feature = chosen[a].feature;
            tree.nodes[nd].threshold = c.threshold;
            tree.nodes[nd].left = left;
            tree.nodes[nd].right = right;
            ledger[static_cast<std::size_t>(chosen[a].feature)] += c.gain;
            next_frontier.push_back(left);
            next_frontier.push_back(right);
            any_split = true;
        }
        if (!any_split) break;

        for (std::size_t r = 0; r < n; ++r) {
            int nd = node_of[r];
            if (nd < 0) continue;
            const TreeNode& node = tree.nodes[nd];
            if (node.feature >= 0)
                node_of[r] = X[r * m + node.feature] < node.threshold ? node.left : node.right;
        }
        frontier = std::move(next_frontier);
    }
    return tree;
}

std::vector<std::vector<std::uint32_t>> presort(std::span<const double> X, std::size_t n,
                                                std::size_t m) {
    std::vector<std::vector<std::uint32_t>> order(m);
    parallel_chunks(m, worker_count(), [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t f = lo; f < hi; ++f) {
            auto& o = order[f];
            o.resize(n);
            std::iota(o.begin(), o.end(), 0u);
            std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) {
                return X[a * m + f] < X[b * m + f];
            });
        }
    });
    return order;
}

std::vector<char> draw_sample(std::size_t n, double fraction, Rng& rng) {
    std::vector<char> mask(n, 1);
    if (fraction >= 1.0) return mask;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        mask[i] = rng.uniform() < fraction ? 1 : 0;
        any = any || mask[i];
    }
    if (!any) std::fill(mask.begin(), mask.end(), 1);
    return mask;
}

} // namespace

double GBTModel::predict_value(std::span<const double> row) const {
    double v = base_score;
    for (const Tree& t : trees) v += t.predict(row);
    return v;
}

std::vector<double> GBTModel::predict_scores(std::span<const double> row) const {
    const std::size_t K = classes.size();
    std::vector<double> scores(K, 0.0);
    for (std::size_t t = 0; t < trees.size(); ++t) scores[t % K] += trees[t].predict(row);
    return scores;
}

int GBTModel::predict_class(std::span<const double> row) const {
    auto scores = predict_scores(row);
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k)
        if (scores[k] > scores[best]) best = k;
    return classes[best];
}

std::vector<double> GBTModel::importances() const {
    std::vector<double> imp = gain_ledger;
    double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total > 0)
        for (auto& v : imp) v /= total;
    return imp;
}

GBTModel gbt_fit_regression(std::span<const double> X, std::size_t n, std::size_t m,
                            std::span<const double> y, const GbtParams& params) {
    if (y.size() != n || n == 0) throw std::invalid_argument("gbt_fit: size mismatch");
    GBTModel model;
    model.params = params;
    model.loss = GbtLoss::squared;
    model.m = m;
    model.gain_ledger.assign(m, 0.0);
    model.base_score = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

    auto order = presort(X, n, m);
    std::vector<double> pred(n, model.base_score), grad(n), hess(n, 1.0);
    for (int round = 0; round < params.n_trees; ++round) {
        Rng rng = Rng::stream(params.seed, static_cast<std::uint64_t>(round));
        auto mask = draw_sample(n, params.subsample, rng);
        for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - y[i];
        Tree tree = build_tree(X, n, m, order, grad, hess, mask, params, model.gain_ledger);
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] += tree.predict({X.data() + i * m, m});
            double e = y[i] - pred[i];
            loss += e * e;
        }
        model.train_loss.push_back(loss / static_cast<double>(n));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

GBTModel gbt_fit_classification(std::span<const double> X, std::size_t n, std::size_t m,
                                std::span<const int> y, const GbtParams& params) {
    if (y.size() != n || n == 0) throw std::invalid_argument("gbt_fit: size mismatch");
    GBTModel model;
    model.params = params;
    model.loss = GbtLoss::softmax;
    model.m = m;
    model.gain_ledger.assign(m, 0.0);
    model.classes.assign(y.begin(), y.end());
    std::sort(model.classes.begin(), model.classes.end());
    model.classes.erase(std::unique(model.classes.begin(), model.classes.end()),
                        model.classes.end());
    const std::size_t K = model.classes.size();
    if (K < 2) throw std::invalid_argument("gbt_fit: need at least 2 classes");
    std::map<int, std::size_t> pos;
    for (std::size_t k = 0; k < K; ++k) pos[model.classes[k]] = k;

    auto order = presort(X, n, m);
    std::vector<double> scores(n * K, 0.0), probs(n * K), grad(n), hess(n);
    for (int round = 0; round < params.n_trees; ++round) {
        Rng rng = Rng::stream(params.seed, static_cast<std::uint64_t>(round));
        auto mask = draw_sample(n, params.subsample, rng);

        double ce = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double mx = scores[i * K];
            for (std::size_t k = 1; k < K; ++k) mx = std::max(mx, scores[i * K + k]);
            double total = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                probs[i * K + k] = std::exp(scores[i * K + k] - mx);
                total += probs[i * K + k];
            }
            for (std::size_t k = 0; k < K; ++k) probs[i * K + k] /= total;
            ce -= std::log(std::max(probs[i * K + pos[y[i]]], 1e-300));
        }
        model.train_loss.push_back(ce / static_cast<double>(n));

        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                double p = probs[i * K + k];
                grad[i] = p - (pos[y[i]] == k ? 1.0 : 0.0);
                hess[i] = std::max(p * (1.0 - p), 1e-16);
            }
            Tree tree = build_tree(X, n, m, order, grad, hess, mask, params, model.gain_ledger);
            for (std::size_t i = 0; i < n; ++i)
                scores[i * K + k] += tree.predict({X.data() + i * m, m});
            model.trees.push_back(std::move(tree));
        }
    }
    return model;
}

} // namespace bsdlab::ml
