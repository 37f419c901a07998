#include "fixtures.hpp"

#include "bsdlab/ec/points.hpp"
#include "bsdlab/rng.hpp"
#include "bsdlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

namespace bsdlab::testsupport {

namespace {

ingest::CurveRecord make_record(std::string label, long a1, long a2, long a3, long a4, long a6,
                                const char* conductor, int rank, int torsion, long tamagawa,
                                double omega, double regulator, double sha) {
    ingest::CurveRecord r;
    r.label = std::move(label);
    r.a1 = a1;
    r.a2 = a2;
    r.a3 = a3;
    r.a4 = a4;
    r.a6 = a6;
    r.conductor = ec::Int(conductor);
    r.rank = rank;
    r.torsion_order = torsion;
    r.tamagawa_product = tamagawa;
    r.omega = omega;
    r.regulator = regulator;
    r.sha_order = sha;
    return r;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

ingest::CurveRecord worked_example() {
    // paper-worked example: Delta = 2*3^3*11*23^8, Omega ~ 0.5626, RHS ~ 0.1875
    auto r = make_record("314226b1", 1, -1, 0, -453981, 117847851, "314226", 0, 3, 3,
                         0.5626239771066, 1.0, 1.0);
    return r;
}

std::vector<ingest::CurveRecord> anchor_records() {
    std::vector<ingest::CurveRecord> out;

    auto c11 = make_record("11a1", 0, -1, 1, -10, -20, "11", 0, 5, 5, 1.2692093042795534, 1.0, 1.0);
    out.push_back(c11);

    auto c37 = make_record("37a1", 0, 0, 1, -1, 0, "37", 1, 1, 1, 5.98691729246392,
                           0.0511114082399688, 1.0);
    c37.generators = {ec::RationalPoint::affine(ec::Rat(0), ec::Rat(0))};
    out.push_back(c37);

    auto c389 = make_record("389a1", 0, 1, 1, -2, 0, "389", 2, 1, 1, 0.0, 0.15246017794, 1.0);
    c389.omega = agm_period(c389.curve());
    out.push_back(c389);

    auto c5077 = make_record("5077a1", 0, 0, 1, -7, 6, "5077", 3, 1, 1, 0.0, 0.41714355876, 1.0);
    c5077.omega = agm_period(c5077.curve());
    out.push_back(c5077);

    auto c32 = make_record("32a1", 0, 0, 0, 4, 0, "32", 0, 4, 4, 2.62205755429212, 1.0, 1.0);
    out.push_back(c32);

    out.push_back(worked_example());

    // the rank-asymmetry pair from the coefficient-sign discussion
    for (auto [a4, rank, label] : {std::tuple{-10L, 3, "ec-m10"}, std::tuple{10L, 1, "ec-p10"}}) {
        ingest::CurveRecord r;
        r.label = label;
        r.a1 = 0;
        r.a2 = 1;
        r.a3 = 1;
        r.a4 = a4;
        r.a6 = 20;
        ec::CurveInvariants inv = ec::invariants(r.curve());
        r.conductor = abs(inv.delta);
        r.rank = rank;
        r.torsion_order = 1;
        r.tamagawa_product = 1;
        r.omega = agm_period(r.curve());
        r.regulator = 1.0;
        r.sha_order = 1.0;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ingest::CurveRecord> rank1_family(std::size_t count) {
    constexpr double kBaseHeight = 0.0511114082399688; // published 37a1 regulator
    ec::WeierstrassCurve curve{0, 0, 1, -1, 0};
    auto P = ec::RationalPoint::affine(ec::Rat(0), ec::Rat(0));
    std::vector<ingest::CurveRecord> out;
    for (std::size_t k = 1; k <= count; ++k) {
        auto r = make_record("37a1m" + std::to_string(k), 0, 0, 1, -1, 0, "37", 1, 1, 1,
                             5.98691729246392, static_cast<double>(k) * static_cast<double>(k) *
                                                    kBaseHeight,
                             1.0);
        r.generators = {ec::multiply(curve, static_cast<long>(k), P)};
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ingest::CurveRecord> synthetic_db(std::size_t n, std::uint64_t seed) {
    std::vector<ingest::CurveRecord> out;
    out.reserve(n);
    Rng rng = Rng::stream(seed, 1);
    std::size_t idx = 0;
    while (out.size() < n) {
        ++idx;
        long a1 = static_cast<long>(rng.below(2));
        long a2 = static_cast<long>(rng.below(3)) - 1;
        long a3 = static_cast<long>(rng.below(2));
        auto draw_coeff = [&rng]() {
            long mag = static_cast<long>(std::floor(std::exp(rng.uniform() * std::log(300.0))));
            return rng.below(2) ? mag : -mag;
        };
        long a4 = draw_coeff();
        long a6 = draw_coeff();
        ec::WeierstrassCurve curve{a1, a2, a3, a4, a6};
        ec::CurveInvariants inv = ec::invariants(curve);
        double noise = rng.normal(); // drawn unconditionally to keep the stream aligned
        if (inv.delta == 0) continue;

        ingest::CurveRecord r;
        r.label = "syn" + std::to_string(idx);
        r.a1 = a1;
        r.a2 = a2;
        r.a3 = a3;
        r.a4 = a4;
        r.a6 = a6;
        r.conductor = abs(inv.delta);

        double s4 = stats::slog(static_cast<double>(a4)), s6 = stats::slog(static_cast<double>(a6));
        double z = s4 + s6 + 2.0 * static_cast<double>(a2) + static_cast<double>(a1 + a3) +
                   1.5 * noise;
        r.rank = z < 6.0 ? 0 : z < 8.5 ? 1 : z < 10.5 ? 2 : z < 12.0 ? 3 : 4;
        r.torsion_order = a6 % 3 == 0 ? (a4 % 2 != 0 ? 2 : 3) : 1;
        r.tamagawa_product = 1 + std::labs(a4) % 4 + (a6 > 0 ? 2 : 0);
        r.omega = agm_period(curve);
        r.regulator = r.rank == 0
                          ? 1.0
                          : std::exp(0.25 * rng.normal() + 1.2 * static_cast<double>(r.rank - 1));
        double score = 0.5 * s4 + 0.3 * static_cast<double>(r.tamagawa_product) +
                       0.8 * static_cast<double>(r.rank) + 0.15 * rng.normal();
        long root = std::clamp(std::lround(std::fabs(score) / 2.0) + 1, 1L, 4L);
        r.sha_order = static_cast<double>(root * root);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ingest::CurveRecord> fixture_1000() {
    std::vector<ingest::CurveRecord> out = anchor_records();
    auto fam = rank1_family(53);
    out.insert(out.end(), fam.begin(), fam.end());
    auto syn = synthetic_db(1000 - out.size(), 0xf1c7u);
    out.insert(out.end(), syn.begin(), syn.end());
    return out;
}

namespace {
double agm(double a, double b) {
    for (int i = 0; i < 80 && std::fabs(a - b) > 1e-15 * std::max(a, b); ++i) {
        double m = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = m;
    }
    return 0.5 * (a + b);
}
} // namespace

double agm_period(const ec::WeierstrassCurve& c) {
    ec::CurveInvariants inv = ec::invariants(c);
    if (inv.delta == 0) throw std::invalid_argument("agm_period: singular curve");
    double b2 = inv.b2.get_d(), b4 = inv.b4.get_d(), b6 = inv.b6.get_d();

    // depressed form: x = u - b2/12 turns 4x^3+b2x^2+2b4x+b6 into 4u^3 - g2 u - g3
    double shift = b2 / 12.0;
    double g2 = b2 * b2 / 12.0 - 2.0 * b4;
    double g3 = -b2 * b2 * b2 / 216.0 + b2 * b4 / 6.0 - b6;

    // roots of 4u^3 - g2 u - g3 by Cardano over the complex numbers
    std::complex<double> p(-g2 / 4.0, 0.0), q(-g3 / 4.0, 0.0);
    std::complex<double> disc = q * q / 4.0 + p * p * p / 27.0;
    std::complex<double> cr = std::pow(-q / 2.0 + std::sqrt(disc), 1.0 / 3.0);
    std::vector<std::complex<double>> roots;
    const std::complex<double> w(-0.5, std::sqrt(3.0) / 2.0);
    std::complex<double> cur = cr;
    for (int k = 0; k < 3; ++k) {
        roots.push_back(cur - p / (3.0 * cur));
        cur *= w;
    }
    // Newton polish on 4u^3 - g2 u - g3
    for (auto& r : roots)
        for (int it = 0; it < 40; ++it) {
            std::complex<double> f = 4.0 * r * r * r - g2 * r - g3;
            std::complex<double> df = 12.0 * r * r - g2;
            if (std::abs(df) == 0.0) break;
            r -= f / df;
        }
    (void)shift;

    if (inv.delta > 0) {
        std::vector<double> e = {roots[0].real(), roots[1].real(), roots[2].real()};
        std::sort(e.begin(), e.end());
        return 2.0 * M_PI / agm(std::sqrt(e[2] - e[0]), std::sqrt(e[2] - e[1]));
    }
    // one real root: pick the root with the smallest imaginary part
    std::size_t ri = 0;
    for (std::size_t k = 1; k < 3; ++k)
        if (std::fabs(roots[k].imag()) < std::fabs(roots[ri].imag())) ri = k;
    double e = roots[ri].real();
    double beta = std::fabs(roots[(ri + 1) % 3].imag());
    double alpha = roots[(ri + 1) % 3].real();
    double A = std::sqrt((e - alpha) * (e - alpha) + beta * beta);
    return 2.0 * M_PI / agm(2.0 * std::sqrt(A), std::sqrt(2.0 * A + 3.0 * e));
}

std::uint64_t naive_point_count(const ec::WeierstrassCurve& c, std::uint64_t p) {
    auto red = [&](const ec::Int& v) {
        unsigned long m = mpz_fdiv_ui(v.get_mpz_t(), static_cast<unsigned long>(p));
        return static_cast<std::uint64_t>(m);
    };
    std::uint64_t a1 = red(c.a1), a2 = red(c.a2), a3 = red(c.a3), a4 = red(c.a4), a6 = red(c.a6);
    std::uint64_t count = 1; // infinity
    for (std::uint64_t x = 0; x < p; ++x)
        for (std::uint64_t y = 0; y < p; ++y) {
            std::uint64_t lhs = (y * y + a1 * x % p * y + a3 * y) % p;
            std::uint64_t rhs = (((x * x % p * x) % p + a2 * x % p * x) % p + a4 * x + a6) % p;
            if (lhs == rhs) ++count;
        }
    return count;
}

std::vector<std::string> to_csv_lines(const std::vector<ingest::CurveRecord>& records,
                                      bool header) {
    std::vector<std::string> lines;
    if (header)
        lines.push_back(
            "label,a1,a2,a3,a4,a6,conductor,rank,torsion,tamagawa,omega,regulator,sha,generators");
    for (const auto& r : records) {
        std::string gens = r.generators ? ingest::generators_to_string(*r.generators) : "-";
        lines.push_back(r.label + "," + r.a1.get_str() + "," + r.a2.get_str() + "," +
                        r.a3.get_str() + "," + r.a4.get_str() + "," + r.a6.get_str() + "," +
                        r.conductor.get_str() + "," + std::to_string(r.rank) + "," +
                        std::to_string(r.torsion_order) + "," + std::to_string(r.tamagawa_product) +
                        "," + fmt(r.omega) + "," + fmt(r.regulator) + "," + fmt(r.sha_order) + "," +
                        gens);
    }
    return lines;
}

} // namespace bsdlab::testsupport
