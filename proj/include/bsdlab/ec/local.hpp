#pragma once
// Point counts over F_p and the local L-factor data (reduction type, a_p).

#include "bsdlab/ec/curve.hpp"

#include <cstdint>

namespace bsdlab::ec {

enum class Reduction { good, multiplicative, additive };

struct PointCount {
    std::uint64_t count = 0;        // projective points including infinity
    Reduction reduction = Reduction::good;
    std::uint64_t smooth_count = 0; // = count for good reduction
};

struct LocalFactor {
    std::uint64_t p = 0;
    Reduction reduction = Reduction::good;
    long a_p = 0;
};

struct BoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataInconsistency : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultPointCountBound = 10000;

bool is_prime(std::uint64_t n);

// Exhaustive count of the reduced curve over F_p via a quadratic-residue
// table (O(p)); classifies bad reduction from the smooth-locus count.
PointCount count_points_mod_p(const WeierstrassCurve& c, std::uint64_t p,
                              std::uint64_t bound = kDefaultPointCountBound);

// Conductor-aware local factor per the three-case Euler-product display.
LocalFactor local_factor(const WeierstrassCurve& c, std::uint64_t p, const Int& conductor,
                         std::uint64_t bound = kDefaultPointCountBound);

} // namespace bsdlab::ec
