#include "bsdlab/ec/local.hpp"

#include <vector>

namespace bsdlab::ec {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

namespace {

std::uint64_t mod_p(const Int& a, std::uint64_t p) {
    return mpz_fdiv_ui(a.get_mpz_t(), p);
}

} // namespace

PointCount count_points_mod_p(const WeierstrassCurve& c, std::uint64_t p, std::uint64_t bound) {
    if (!is_prime(p)) throw std::invalid_argument("p is not prime");
    if (p > bound) throw BoundError("prime exceeds enumeration bound");

    const std::uint64_t a1 = mod_p(c.a1, p), a2 = mod_p(c.a2, p), a3 = mod_p(c.a3, p),
                        a4 = mod_p(c.a4, p), a6 = mod_p(c.a6, p);

    PointCount out;
    std::uint64_t singular_on = 0; // 1 if the singular point is on the curve (it always is)

    if (p == 2) {
        std::uint64_t n = 1; // infinity
        for (std::uint64_t x = 0; x < 2; ++x)
            for (std::uint64_t y = 0; y < 2; ++y) {
                std::uint64_t lhs = (y * y + a1 * x * y + a3 * y) % 2;
                std::uint64_t rhs = (x * x * x + a2 * x * x + a4 * x + a6) % 2;
                if (lhs == rhs) ++n;
            }
        out.count = n;
    } else {
        // y^2 + (a1 x + a3) y = f(x); roots in y count 1 + chi(discriminant)
        std::vector<char> is_square(p, 0);
        for (std::uint64_t i = 0; i < p; ++i) is_square[(i * i) % p] = 1;

        std::uint64_t n = 1;
        for (std::uint64_t x = 0; x < p; ++x) {
            std::uint64_t f = (((x + a2) % p * x + a4) % p * x + a6) % p;
            std::uint64_t h = (a1 * x + a3) % p;
            std::uint64_t disc = (h * h + 4 * f) % p;
            if (disc == 0)
                n += 1;
            else if (is_square[disc])
                n += 2;
        }
        out.count = n;
    }

    auto inv = invariants(c);
    if (mod_p(inv.delta, p) != 0) {
        out.reduction = Reduction::good;
        out.smooth_count = out.count;
        return out;
    }

    // Bad reduction: exactly one singular point, always F_p-rational and on
    // the curve; classify from the smooth-locus count (a_p = p - #E_ns).
    singular_on = 1;
    out.smooth_count = out.count - singular_on;
    long ap = static_cast<long>(p) - static_cast<long>(out.smooth_count);
    out.reduction = (ap == 0) ? Reduction::additive : Reduction::multiplicative;
    return out;
}

LocalFactor local_factor(const WeierstrassCurve& c, std::uint64_t p, const Int& conductor,
                         std::uint64_t bound) {
    if (!is_prime(p)) throw std::invalid_argument("p is not prime");
    auto inv = invariants(c);
    const bool p_divides_N = mod_p(conductor, p) == 0;
    const bool p2_divides_N = p_divides_N && mpz_fdiv_ui(Int(conductor / p).get_mpz_t(), p) == 0;
    const bool p_divides_delta = mod_p(inv.delta, p) == 0;

    if (!p_divides_N && p_divides_delta)
        throw DataInconsistency("p does not divide the conductor but divides the discriminant, p=" +
                                std::to_string(p));
    if (p_divides_N && !p_divides_delta)
        throw DataInconsistency("p divides the conductor but not the discriminant, p=" +
                                std::to_string(p));

    auto pc = count_points_mod_p(c, p, bound);
    LocalFactor lf;
    lf.p = p;
    if (!p_divides_N) {
        lf.reduction = Reduction::good;
        lf.a_p = static_cast<long>(p) + 1 - static_cast<long>(pc.count);
    } else if (!p2_divides_N) {
        lf.reduction = Reduction::multiplicative;
        lf.a_p = static_cast<long>(p) - static_cast<long>(pc.smooth_count);
        if (lf.a_p != 1 && lf.a_p != -1)
            throw DataInconsistency("smooth-locus count inconsistent with multiplicative reduction, p=" +
                                    std::to_string(p));
    } else {
        lf.reduction = Reduction::additive;
        lf.a_p = 0;
    }
    return lf;
}

} // namespace bsdlab::ec
