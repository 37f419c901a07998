#include "bsdlab/permutation.hpp"

#include "bsdlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bsdlab::stats {

namespace {

// mean absolute pairwise difference between two index sets on a pooled
// sample, using a shared |x_i - x_j| lookup to keep permutations cheap
double mean_cross(const std::vector<double>& dist, std::size_t n,
                  std::span<const std::size_t> a, std::span<const std::size_t> b) {
    double total = 0.0;
    for (std::size_t i : a)
        for (std::size_t j : b) {
            if (i == j) continue;
            std::size_t lo = std::min(i, j), hi = std::max(i, j);
            total += dist[lo * n + hi];
        }
    return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double mean_within(const std::vector<double>& dist, std::size_t n,
                   std::span<const std::size_t> a) {
    if (a.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t u = 0; u < a.size(); ++u)
        for (std::size_t v = u + 1; v < a.size(); ++v) {
            std::size_t lo = std::min(a[u], a[v]), hi = std::max(a[u], a[v]);
            total += dist[lo * n + hi];
        }
    return 2.0 * total / (static_cast<double>(a.size()) * static_cast<double>(a.size()));
}

double energy_from_indices(const std::vector<double>& dist, std::size_t n,
                           std::span<const std::size_t> idx, std::size_t n_x) {
    auto a = idx.subspan(0, n_x);
    auto b = idx.subspan(n_x);
    return 2.0 * mean_cross(dist, n, a, b) - mean_within(dist, n, a) - mean_within(dist, n, b);
}

std::vector<double> abs_diff_table(std::span<const double> pooled) {
    const std::size_t n = pooled.size();
    std::vector<double> dist(n * n, 0.0);
    parallel_chunks(n, worker_count(), [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                dist[i * n + j] = std::fabs(pooled[i] - pooled[j]);
    });
    return dist;
}

} // namespace

double energy_distance(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("energy_distance: empty sample");
    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    auto dist = abs_diff_table(pooled);
    std::vector<std::size_t> idx(pooled.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return energy_from_indices(dist, pooled.size(), idx, x.size());
}

PermutationResult permutation_test(std::span<const double> x, std::span<const double> y,
                                   int n_perm, std::uint64_t seed,
                                   const TwoSampleStatistic& stat) {
    if (x.empty() || y.empty()) throw std::invalid_argument("permutation_test: empty sample");
    if (n_perm < 1) throw std::invalid_argument("permutation_test: n_perm must be positive");

    PermutationResult out;
    out.n_perm = n_perm;
    if (n_perm < 99)
        out.warnings.push_back("n_perm < 99: p-value resolution is coarser than 0.01");

    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const std::size_t n = pooled.size();
    const std::size_t n_x = x.size();

    if (stat) {
        out.statistic = stat(pooled, n_x);
        std::size_t exceed = 0;
        std::vector<double> shuffled = pooled;
        Rng rng = Rng::stream(seed, 0);
        for (int p = 0; p < n_perm; ++p) {
            auto perm = rng.permutation(n);
            for (std::size_t i = 0; i < n; ++i) shuffled[i] = pooled[perm[i]];
            if (stat(shuffled, n_x) >= out.statistic) ++exceed;
        }
        out.p_value = (1.0 + static_cast<double>(exceed)) / (1.0 + n_perm);
        return out;
    }

    // energy distance: reuse one |x_i - x_j| table across all permutations
    auto dist = abs_diff_table(pooled);
    std::vector<std::size_t> identity(n);
    for (std::size_t i = 0; i < n; ++i) identity[i] = i;
    out.statistic = energy_from_indices(dist, n, identity, n_x);

    const std::size_t n_chunks = std::min<std::size_t>(worker_count(), n_perm);
    std::vector<std::size_t> exceed_per(n_chunks, 0);
    parallel_chunks(static_cast<std::size_t>(n_perm), n_chunks,
                    [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
                        std::size_t exceed = 0;
                        for (std::size_t p = lo; p < hi; ++p) {
                            Rng rng = Rng::stream(seed, p + 1); // one stream per permutation
                            auto perm = rng.permutation(n);
                            if (energy_from_indices(dist, n, perm, n_x) >= out.statistic) ++exceed;
                        }
                        exceed_per[chunk] += exceed;
                    });
    std::size_t exceed = 0;
    for (std::size_t e : exceed_per) exceed += e;
    out.p_value = (1.0 + static_cast<double>(exceed)) / (1.0 + n_perm);
    return out;
}

} // namespace bsdlab::stats
