#pragma once
// Group law, naive and canonical heights, height pairing and regulator,
// all over exact rationals.

#include "bsdlab/ec/curve.hpp"

#include <vector>

namespace bsdlab::ec {

struct RationalPoint {
    bool infinity = true;
    Rat x, y;

    static RationalPoint at_infinity() { return {}; }
    static RationalPoint affine(Rat x, Rat y) {
        RationalPoint p;
        p.infinity = false;
        p.x = std::move(x);
        p.y = std::move(y);
        p.x.canonicalize();
        p.y.canonicalize();
        return p;
    }
    bool operator==(const RationalPoint&) const = default;
};

bool on_curve(const WeierstrassCurve& c, const RationalPoint& p);

RationalPoint negate(const WeierstrassCurve& c, const RationalPoint& p);
RationalPoint add(const WeierstrassCurve& c, const RationalPoint& p, const RationalPoint& q);
// double-and-add; n may be negative or zero
RationalPoint multiply(const WeierstrassCurve& c, long n, const RationalPoint& p);

// map a point on the transformed curve back to the original curve's model
RationalPoint transform_point(const RationalPoint& p, const CoordChange& ch);

// log max(|num|, den) of x in lowest terms; 0 for the point at infinity
double naive_height(const RationalPoint& p);

struct HeightResult {
    double value = 0.0;
    bool precise = true; // false if the digit budget stopped the iteration early
};

struct HeightOptions {
    double tol = 1e-6;
    std::size_t digit_budget = 100000; // decimal digits allowed in x numerators
    int max_doublings = 24;
};

HeightResult canonical_height(const WeierstrassCurve& c, const RationalPoint& p,
                              const HeightOptions& opt = {});
HeightResult height_pairing(const WeierstrassCurve& c, const RationalPoint& p,
                            const RationalPoint& q, const HeightOptions& opt = {});
// det of the canonical-height Gram matrix; 1 exactly for an empty list
HeightResult regulator(const WeierstrassCurve& c, const std::vector<RationalPoint>& generators,
                       const HeightOptions& opt = {});

} // namespace bsdlab::ec
