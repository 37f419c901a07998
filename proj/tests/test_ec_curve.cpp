#include <doctest.h>

#include "bsdlab/ec/curve.hpp"
#include "support/fixtures.hpp"

using namespace bsdlab;
using ec::CoordChange;
using ec::Rat;
using ec::WeierstrassCurve;

TEST_CASE("invariants of 37a1 match hand computation") {
    // y^2 + y = x^3 - x: b2=0, b4=-2, b6=1, b8=-1, c4=48, c6=-216, delta=37
    WeierstrassCurve c{0, 0, 1, -1, 0};
    auto inv = ec::invariants(c);
    CHECK(inv.b2 == 0);
    CHECK(inv.b4 == -2);
    CHECK(inv.b6 == 1);
    CHECK(inv.b8 == -1);
    CHECK(inv.c4 == 48);
    CHECK(inv.c6 == -216);
    CHECK(inv.delta == 37);
    CHECK(inv.j() == Rat(110592, 37));
}

TEST_CASE("invariants of 11a1 and 32a1") {
    auto i11 = ec::invariants({0, -1, 1, -10, -20});
    CHECK(i11.delta == -161051); // -11^5
    auto i32 = ec::invariants({0, 0, 0, 4, 0});
    CHECK(i32.delta == -4096); // -64 * 4^3
    CHECK(i32.c4 == -192);
    CHECK(i32.j() == Rat(1728)); // c4^3/delta = -192^3 / -4096
}

TEST_CASE("b8 and discriminant identities on a curve sweep") {
    for (long a1 = 0; a1 <= 1; ++a1)
        for (long a2 = -1; a2 <= 1; ++a2)
            for (long a3 = 0; a3 <= 1; ++a3)
                for (long a4 = -5; a4 <= 5; a4 += 3)
                    for (long a6 = -7; a6 <= 7; a6 += 5) {
                        auto inv = ec::invariants({a1, a2, a3, a4, a6});
                        CHECK(4 * inv.b8 == inv.b2 * inv.b6 - inv.b4 * inv.b4);
                        CHECK(inv.c4 * inv.c4 * inv.c4 - inv.c6 * inv.c6 == 1728 * inv.delta);
                    }
}

TEST_CASE("singular curve rejects j-invariant") {
    auto inv = ec::invariants({0, 0, 0, 0, 0});
    CHECK(inv.delta == 0);
    CHECK(!inv.smooth());
    CHECK_THROWS_AS(inv.j(), ec::SingularCurveError);
}

TEST_CASE("coordinate change round trip and composition") {
    WeierstrassCurve c{1, -1, 1, -453981, 117847851};
    CoordChange ch{Rat(1), Rat(3), Rat(-2), Rat(5)};
    auto moved = ec::transform(c, ch);
    REQUIRE(moved.integral);
    auto back = ec::transform(*moved.as_integral(), ch.inverse());
    REQUIRE(back.integral);
    CHECK(*back.as_integral() == c);

    CoordChange ch2{Rat(1, 2), Rat(-1), Rat(0), Rat(7)};
    auto composed = ch2.compose(ch);
    auto step = ec::transform(ec::transform(c, ch).curve, ch2);
    auto direct = ec::transform(c, composed);
    CHECK(step.a1 == direct.curve.a1);
    CHECK(step.a2 == direct.curve.a2);
    CHECK(step.a3 == direct.curve.a3);
    CHECK(step.a4 == direct.curve.a4);
    CHECK(step.a6 == direct.curve.a6);

    CHECK(composed.compose(composed.inverse()).is_identity());
}

TEST_CASE("u-scaling law: delta scales by u^-12, j is invariant") {
    WeierstrassCurve c{0, 0, 1, -1, 0};
    auto inv = ec::invariants(c);
    // u = 1/2 scales a_i by 2^i, keeping everything integral
    auto scaled = ec::transform(c, CoordChange{Rat(1, 2)});
    REQUIRE(scaled.integral);
    auto inv2 = ec::invariants(*scaled.as_integral());
    CHECK(inv2.delta == inv.delta * 4096); // (1/u)^12 = 2^12
    CHECK(inv2.j() == inv.j());
}

TEST_CASE("normalize lands in the reduced-coefficient window") {
    WeierstrassCurve messy{5, 17, -9, 123, -4567};
    auto norm = ec::normalize(messy);
    CHECK(norm.curve.is_normalized());
    CHECK(norm.change.u == 1);
    auto via = ec::transform(messy, norm.change);
    REQUIRE(via.integral);
    CHECK(*via.as_integral() == norm.curve);
    CHECK(ec::invariants(norm.curve).delta == ec::invariants(messy).delta);

    // idempotent on already-normalized input
    auto again = ec::normalize(norm.curve);
    CHECK(again.change.is_identity());
    CHECK(again.curve == norm.curve);
}
