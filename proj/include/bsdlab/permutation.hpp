#pragma once
// Two-sample permutation tests. The default statistic is the energy
// distance; a custom statistic over (pooled, n_x) can be supplied.

#include "bsdlab/rng.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bsdlab::stats {

// E = 2*mean|X-Y| - mean|X-X'| - mean|Y-Y'| on scalar samples
double energy_distance(std::span<const double> x, std::span<const double> y);

struct PermutationResult {
    double statistic = 0.0;   // observed value
    double p_value = 1.0;     // (1 + #{perm >= obs}) / (1 + n_perm)
    int n_perm = 0;
    std::vector<std::string> warnings;
};

using TwoSampleStatistic =
    std::function<double(std::span<const double> pooled, std::size_t n_x)>;

// Permutes labels on the pooled sample; deterministic for a given seed.
// Emits a warning when n_perm < 99 (p-value resolution is too coarse).
PermutationResult permutation_test(std::span<const double> x, std::span<const double> y,
                                   int n_perm, std::uint64_t seed,
                                   const TwoSampleStatistic& stat = {});

} // namespace bsdlab::stats
