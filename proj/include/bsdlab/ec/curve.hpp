#pragma once
// Exact arithmetic on long Weierstrass models: invariants, Tate-Laska
// coordinate changes, normalization.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace bsdlab::ec {

using Int = mpz_class;
using Rat = mpq_class;

struct SingularCurveError : std::runtime_error {
    SingularCurveError() : std::runtime_error("curve is singular (discriminant = 0)") {}
};

struct WeierstrassCurve {
    Int a1, a2, a3, a4, a6;

    bool operator==(const WeierstrassCurve&) const = default;

    bool is_normalized() const {
        return (a1 == 0 || a1 == 1) && (a3 == 0 || a3 == 1) && (a2 >= -1 && a2 <= 1);
    }
};

// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with rational coefficients;
// produced by coordinate changes whose result is not integral.
struct RationalCurve {
    Rat a1, a2, a3, a4, a6;
};

struct CurveInvariants {
    Int b2, b4, b6, b8, c4, c6;
    Int delta;

    bool smooth() const { return delta != 0; }
    // c4^3 / delta in lowest terms; throws on a singular curve.
    Rat j() const {
        if (delta == 0) throw SingularCurveError();
        Rat r(c4 * c4 * c4, delta);
        r.canonicalize();
        return r;
    }
};

CurveInvariants invariants(const WeierstrassCurve& c);

// (u; r, s, t) coordinate change. u != 0. Composition and inversion are exact.
struct CoordChange {
    Rat u{1};
    Rat r{0}, s{0}, t{0};

    static CoordChange identity() { return {}; }
    bool is_identity() const { return u == 1 && r == 0 && s == 0 && t == 0; }

    // this after `first`: apply `first`, then this.
    CoordChange compose(const CoordChange& first) const;
    CoordChange inverse() const;
};

struct TransformResult {
    RationalCurve curve;
    bool integral;                        // all five coefficients integral
    std::optional<WeierstrassCurve> as_integral() const;
};

TransformResult transform(const WeierstrassCurve& c, const CoordChange& ch);
RationalCurve transform(const RationalCurve& c, const CoordChange& ch);

// u = 1, integer (r,s,t) change bringing a1,a3 into {0,1} and a2 into
// {-1,0,1}; identity on already-normalized input.
struct Normalized {
    WeierstrassCurve curve;
    CoordChange change;
};
Normalized normalize(const WeierstrassCurve& c);

std::string to_string(const WeierstrassCurve& c);

} // namespace bsdlab::ec
