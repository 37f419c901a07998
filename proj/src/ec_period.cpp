#include "bsdlab/ec/period.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace bsdlab::ec {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Adaptive Simpson on a smooth integrand.
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double diff = left + right - whole;
    if (depth <= 0) throw PrecisionError("period quadrature did not converge");
    if (std::fabs(diff) <= 15.0 * eps) return left + right + diff / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, eps * 0.5, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, eps * 0.5, depth - 1);
}

// `rel` is a relative tolerance; the absolute budget comes from a first-pass
// Simpson estimate of the integral's magnitude.
double integrate(const std::function<double(double)>& f, double a, double b, double rel) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double eps = rel * std::max(std::fabs(whole), 1e-300);
    return simpson_rec(f, a, b, fa, fm, fb, whole, eps, 48);
}

double newton_polish(double x, double c3, double c2, double c1, double c0) {
    for (int i = 0; i < 60; ++i) {
        double g = ((c3 * x + c2) * x + c1) * x + c0;
        double dg = (3.0 * c3 * x + 2.0 * c2) * x + c1;
        if (dg == 0.0) break;
        double step = g / dg;
        x -= step;
        if (std::fabs(step) <= 1e-15 * std::max(1.0, std::fabs(x))) break;
    }
    return x;
}

} // namespace

double real_period(const WeierstrassCurve& c, double tol) {
    auto inv = invariants(c);
    if (inv.delta == 0) throw SingularCurveError();

    // completed square: w^2 = g(x) = 4x^3 + b2 x^2 + 2 b4 x + b6
    const double b2 = inv.b2.get_d();
    const double b4 = inv.b4.get_d();
    const double b6 = inv.b6.get_d();
    const bool three_real = inv.delta > 0; // disc(g) = 16 * delta

    // depressed cubic t^3 + pt + q with x = t - b2/12 (monic form of g/4)
    const double A = b2 / 4.0, B = b4 / 2.0, C = b6 / 4.0;
    const double p = B - A * A / 3.0;
    const double q = 2.0 * A * A * A / 27.0 - A * B / 3.0 + C;
    const double shift = -A / 3.0;

    std::vector<double> roots;
    if (three_real) {
        double mp3 = std::sqrt(std::max(0.0, -p / 3.0));
        double arg = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(std::max(0.0, -3.0 / p)), -1.0, 1.0);
        double phi = std::acos(arg);
        for (int k = 0; k < 3; ++k)
            roots.push_back(2.0 * mp3 * std::cos((phi - 2.0 * kPi * k) / 3.0) + shift);
        std::sort(roots.begin(), roots.end());
    } else {
        double disc = q * q / 4.0 + p * p * p / 27.0;
        double s = std::sqrt(std::max(0.0, disc));
        roots.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s) + shift);
    }
    for (double& r : roots) r = newton_polish(r, 4.0, b2, 2.0 * b4, b6);

    if (three_real) {
        double span = roots[2] - roots[0];
        if (roots[1] - roots[0] < 1e-12 * std::max(1.0, span) ||
            roots[2] - roots[1] < 1e-12 * std::max(1.0, span))
            throw SingularCurveError();
    }

    const double eps = tol / 8.0;
    double total = 0.0;

    if (three_real) {
        const double e1 = roots[0], e2 = roots[1], e3 = roots[2];
        const double M = e3 + std::max(1.0, e3 - e1);

        // unbounded component, near part: x = e3 + (M-e3) sin^2(theta)
        auto near_f = [&](double th) {
            double s2 = std::sin(th) * std::sin(th);
            double x = e3 + (M - e3) * s2;
            return std::sqrt(M - e3) * std::cos(th) / std::sqrt((x - e1) * (x - e2));
        };
        double i_unb = integrate(near_f, 0.0, kPi / 2.0, eps);

        // tail: v = 1/sqrt(x - e3)
        double v0 = 1.0 / std::sqrt(M - e3);
        auto tail_f = [&](double v) {
            if (v == 0.0) return 1.0;
            double x = e3 + 1.0 / (v * v);
            return 1.0 / (v * v * std::sqrt((x - e1) * (x - e2)));
        };
        i_unb += integrate(tail_f, 0.0, v0, eps);

        // bounded component ("egg"): x = e1 + (e2-e1) sin^2(theta)
        auto egg_f = [&](double th) {
            double s2 = std::sin(th) * std::sin(th);
            double x = e1 + (e2 - e1) * s2;
            return 1.0 / std::sqrt(e3 - x);
        };
        double i_egg = integrate(egg_f, 0.0, kPi / 2.0, eps);

        total = 2.0 * (i_unb + i_egg);
    } else {
        const double e1 = roots[0];
        // g(x) = 4 (x - e1)(x^2 + Bq x + Cq)
        const double Bq = b2 / 4.0 + e1;
        const double Cq = b4 / 2.0 + e1 * Bq;
        auto quad = [&](double x) { return (x + Bq) * x + Cq; };

        const double M = e1 + std::max(1.0, std::sqrt(std::fabs(Cq)) + std::fabs(Bq));
        auto near_f = [&](double th) {
            double s2 = std::sin(th) * std::sin(th);
            double x = e1 + (M - e1) * s2;
            return std::sqrt(M - e1) * std::cos(th) / std::sqrt(quad(x));
        };
        double i = integrate(near_f, 0.0, kPi / 2.0, eps);

        double v0 = 1.0 / std::sqrt(M - e1);
        auto tail_f = [&](double v) {
            if (v == 0.0) return 1.0;
            double x = e1 + 1.0 / (v * v);
            return 1.0 / (v * v * std::sqrt(quad(x)));
        };
        i += integrate(tail_f, 0.0, v0, eps);

        total = 2.0 * i;
    }
    return total;
}

double bsd_rhs(double sha_order, double omega, double regulator, double tamagawa_product,
               double torsion_order) {
    return sha_order * omega * regulator * tamagawa_product / (torsion_order * torsion_order);
}

} // namespace bsdlab::ec
