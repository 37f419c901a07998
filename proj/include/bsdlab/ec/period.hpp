#pragma once
// Real period: measure of the invariant differential over the real locus,
// by branch-point quadrature on the completed-square cubic.

#include "bsdlab/ec/curve.hpp"

namespace bsdlab::ec {

struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// relative error <= tol; throws SingularCurveError / PrecisionError
double real_period(const WeierstrassCurve& c, double tol = 1e-10);

// Strong-BSD right-hand side |Sha| * Omega * R * prod c_p / |T|^2.
double bsd_rhs(double sha_order, double omega, double regulator, double tamagawa_product,
               double torsion_order);

} // namespace bsdlab::ec
