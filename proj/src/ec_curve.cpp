#include "bsdlab/ec/curve.hpp"

#include <sstream>

namespace bsdlab::ec {

CurveInvariants invariants(const WeierstrassCurve& c) {
    CurveInvariants inv;
    inv.b2 = c.a1 * c.a1 + 4 * c.a2;
    inv.b4 = 2 * c.a4 + c.a1 * c.a3;
    inv.b6 = c.a3 * c.a3 + 4 * c.a6;
    inv.b8 = c.a1 * c.a1 * c.a6 + 4 * c.a2 * c.a6 - c.a1 * c.a3 * c.a4 + c.a2 * c.a3 * c.a3 -
             c.a4 * c.a4;
    inv.c4 = inv.b2 * inv.b2 - 24 * inv.b4;
    inv.c6 = -inv.b2 * inv.b2 * inv.b2 + 36 * inv.b2 * inv.b4 - 216 * inv.b6;
    inv.delta = -inv.b2 * inv.b2 * inv.b8 - 8 * inv.b4 * inv.b4 * inv.b4 -
                27 * inv.b6 * inv.b6 + 9 * inv.b2 * inv.b4 * inv.b6;
    return inv;
}

CoordChange CoordChange::compose(const CoordChange& first) const {
    CoordChange out;
    out.u = first.u * u;
    out.r = first.u * first.u * r + first.r;
    out.s = first.u * s + first.s;
    out.t = first.u * first.u * first.u * t + first.s * first.u * first.u * r + first.t;
    out.u.canonicalize();
    out.r.canonicalize();
    out.s.canonicalize();
    out.t.canonicalize();
    return out;
}

CoordChange CoordChange::inverse() const {
    if (u == 0) throw std::invalid_argument("coordinate change with u = 0");
    CoordChange out;
    out.u = 1 / u;
    out.r = -r / (u * u);
    out.s = -s / u;
    out.t = (r * s - t) / (u * u * u);
    out.u.canonicalize();
    out.r.canonicalize();
    out.s.canonicalize();
    out.t.canonicalize();
    return out;
}

namespace {

RationalCurve apply_change(const Rat& a1, const Rat& a2, const Rat& a3, const Rat& a4,
                           const Rat& a6, const CoordChange& ch) {
    const Rat &u = ch.u, &r = ch.r, &s = ch.s, &t = ch.t;
    Rat u2 = u * u, u3 = u2 * u, u4 = u2 * u2, u6 = u3 * u3;
    RationalCurve out;
    out.a1 = (a1 + 2 * s) / u;
    out.a2 = (a2 - s * a1 + 3 * r - s * s) / u2;
    out.a3 = (a3 + r * a1 + 2 * t) / u3;
    out.a4 = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u4;
    out.a6 = (a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1) / u6;
    out.a1.canonicalize();
    out.a2.canonicalize();
    out.a3.canonicalize();
    out.a4.canonicalize();
    out.a6.canonicalize();
    return out;
}

bool integral(const Rat& q) { return q.get_den() == 1; }

} // namespace

TransformResult transform(const WeierstrassCurve& c, const CoordChange& ch) {
    if (ch.u == 0) throw std::invalid_argument("coordinate change with u = 0");
    TransformResult out;
    out.curve = apply_change(Rat(c.a1), Rat(c.a2), Rat(c.a3), Rat(c.a4), Rat(c.a6), ch);
    out.integral = integral(out.curve.a1) && integral(out.curve.a2) && integral(out.curve.a3) &&
                   integral(out.curve.a4) && integral(out.curve.a6);
    return out;
}

RationalCurve transform(const RationalCurve& c, const CoordChange& ch) {
    if (ch.u == 0) throw std::invalid_argument("coordinate change with u = 0");
    return apply_change(c.a1, c.a2, c.a3, c.a4, c.a6, ch);
}

std::optional<WeierstrassCurve> TransformResult::as_integral() const {
    if (!integral) return std::nullopt;
    return WeierstrassCurve{curve.a1.get_num(), curve.a2.get_num(), curve.a3.get_num(),
                            curve.a4.get_num(), curve.a6.get_num()};
}

namespace {

// representative of x mod m in {0,..,m-1}
Int mod_pos(const Int& x, long m) {
    Int r = x % m;
    if (r < 0) r += m;
    return r;
}

} // namespace

Normalized normalize(const WeierstrassCurve& c) {
    CoordChange ch;
    // s: a1' = a1 + 2s in {0,1}
    Int s = (mod_pos(c.a1, 2) - c.a1) / 2;
    // r: a2' = a2 - s*a1 + 3r - s^2 in {-1,0,1}
    Int v = c.a2 - s * c.a1 - s * s;
    Int m = mod_pos(v, 3);
    if (m == 2) m = -1;
    Int r = (m - v) / 3;
    // t: a3' = a3 + r*a1 + 2t in {0,1}
    Int w = c.a3 + r * c.a1;
    Int t = (mod_pos(w, 2) - w) / 2;

    ch.r = Rat(r);
    ch.s = Rat(s);
    ch.t = Rat(t);
    auto res = transform(c, ch);
    // u=1 with integer (r,s,t) keeps everything integral
    return Normalized{*res.as_integral(), ch};
}

std::string to_string(const WeierstrassCurve& c) {
    std::ostringstream os;
    os << "[" << c.a1 << "," << c.a2 << "," << c.a3 << "," << c.a4 << "," << c.a6 << "]";
    return os.str();
}

} // namespace bsdlab::ec
