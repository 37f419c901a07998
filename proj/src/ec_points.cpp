#include "bsdlab/ec/points.hpp"

#include <cmath>

namespace bsdlab::ec {

bool on_curve(const WeierstrassCurve& c, const RationalPoint& p) {
    if (p.infinity) return true;
    const Rat &x = p.x, &y = p.y;
    Rat lhs = y * y + c.a1 * x * y + c.a3 * y;
    Rat rhs = x * x * x + c.a2 * x * x + c.a4 * x + c.a6;
    return lhs == rhs;
}

RationalPoint negate(const WeierstrassCurve& c, const RationalPoint& p) {
    if (p.infinity) return p;
    return RationalPoint::affine(p.x, -p.y - c.a1 * p.x - c.a3);
}

RationalPoint add(const WeierstrassCurve& c, const RationalPoint& p, const RationalPoint& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;

    const Rat &x1 = p.x, &y1 = p.y, &x2 = q.x, &y2 = q.y;
    Rat lambda;
    if (x1 == x2) {
        // P + (-P) = O
        if (y2 == -y1 - c.a1 * x1 - c.a3) return RationalPoint::at_infinity();
        // tangent slope
        lambda = (3 * x1 * x1 + 2 * c.a2 * x1 + c.a4 - c.a1 * y1) /
                 (2 * y1 + c.a1 * x1 + c.a3);
    } else {
        lambda = (y2 - y1) / (x2 - x1);
    }
    lambda.canonicalize();
    Rat nu = y1 - lambda * x1;
    Rat x3 = lambda * lambda + c.a1 * lambda - c.a2 - x1 - x2;
    Rat y3 = -(lambda + c.a1) * x3 - nu - c.a3;
    return RationalPoint::affine(x3, y3);
}

RationalPoint multiply(const WeierstrassCurve& c, long n, const RationalPoint& p) {
    if (n == 0 || p.infinity) return RationalPoint::at_infinity();
    RationalPoint base = n < 0 ? negate(c, p) : p;
    unsigned long k = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    RationalPoint acc = RationalPoint::at_infinity();
    while (k) {
        if (k & 1) acc = add(c, acc, base);
        k >>= 1;
        if (k) base = add(c, base, base);
    }
    return acc;
}

RationalPoint transform_point(const RationalPoint& p, const CoordChange& ch) {
    if (p.infinity) return p;
    Rat u2 = ch.u * ch.u;
    Rat x = u2 * p.x + ch.r;
    Rat y = u2 * ch.u * p.y + ch.s * u2 * p.x + ch.t;
    return RationalPoint::affine(x, y);
}

double naive_height(const RationalPoint& p) {
    if (p.infinity) return 0.0;
    // mpq_class keeps lowest terms with positive denominator
    Int num = abs(p.x.get_num());
    const Int& den = p.x.get_den();
    const Int& m = num > den ? num : den;
    signed long exp = 0;
    double d = mpz_get_d_2exp(&exp, m.get_mpz_t());
    return std::log(d) + static_cast<double>(exp) * std::log(2.0);
}

HeightResult canonical_height(const WeierstrassCurve& c, const RationalPoint& p,
                              const HeightOptions& opt) {
    if (p.infinity) return {0.0, true};
    RationalPoint q = p;      // 2^k P
    double scale = 1.0;       // 4^{-k}
    double prev = naive_height(q);
    for (int k = 0; k < opt.max_doublings; ++k) {
        // doubling quadruples coordinate sizes; stop before an add that
        // would blow the digit budget
        std::size_t digits = mpz_sizeinbase(q.x.get_num().get_mpz_t(), 10) +
                             mpz_sizeinbase(q.x.get_den().get_mpz_t(), 10);
        if (digits * 4 > opt.digit_budget) return {prev, false};
        q = add(c, q, q);
        if (q.infinity) return {0.0, true}; // torsion point
        scale *= 0.25;
        double cur = scale * naive_height(q);
        // early multiples of small points can have naive height 0; do not
        // accept convergence before the tail behaviour is visible
        if (k >= 6 && std::fabs(cur - prev) < opt.tol) return {cur, true};
        prev = cur;
    }
    return {prev, false};
}

HeightResult height_pairing(const WeierstrassCurve& c, const RationalPoint& p,
                            const RationalPoint& q, const HeightOptions& opt) {
    auto hpq = canonical_height(c, add(c, p, q), opt);
    auto hp = canonical_height(c, p, opt);
    auto hq = canonical_height(c, q, opt);
    return {(hpq.value - hp.value - hq.value) / 2.0, hpq.precise && hp.precise && hq.precise};
}

HeightResult regulator(const WeierstrassCurve& c, const std::vector<RationalPoint>& generators,
                       const HeightOptions& opt) {
    const std::size_t r = generators.size();
    if (r == 0) return {1.0, true};

    bool precise = true;
    std::vector<double> gram(r * r);
    for (std::size_t i = 0; i < r; ++i) {
        auto hi = canonical_height(c, generators[i], opt);
        precise = precise && hi.precise;
        gram[i * r + i] = hi.value;
        for (std::size_t j = i + 1; j < r; ++j) {
            auto hij = height_pairing(c, generators[i], generators[j], opt);
            precise = precise && hij.precise;
            gram[i * r + j] = gram[j * r + i] = hij.value;
        }
    }

    // Gaussian elimination with partial pivoting; r <= 4 in this database
    double det = 1.0;
    for (std::size_t col = 0; col < r; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < r; ++i)
            if (std::fabs(gram[i * r + col]) > std::fabs(gram[piv * r + col])) piv = i;
        if (piv != col) {
            for (std::size_t j = 0; j < r; ++j) std::swap(gram[col * r + j], gram[piv * r + j]);
            det = -det;
        }
        double d = gram[col * r + col];
        if (d == 0.0) return {0.0, precise};
        det *= d;
        for (std::size_t i = col + 1; i < r; ++i) {
            double f = gram[i * r + col] / d;
            for (std::size_t j = col; j < r; ++j) gram[i * r + j] -= f * gram[col * r + j];
        }
    }
    return {det, precise};
}

} // namespace bsdlab::ec
