#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <vector>

#include "bitreal/dyadic.hpp"
#include "bitreal/error.hpp"
#include "bitreal/fractal.hpp"
#include "bitreal/oracle.hpp"
#include "bitreal/set_comp.hpp"
#include "support.hpp"

using namespace bitreal;
using testsup::pow2q;

namespace {

Rt3 edge_len_sq(const KochApprox& K, std::size_t j) {
    const Rt3Point& A = K.vertices[j];
    const Rt3Point& B = K.vertices[(j + 1) % K.vertices.size()];
    Rt3 dx = B[0] - A[0], dy = B[1] - A[1];
    return dx * dx + dy * dy;
}

// Twice the signed area by the shoelace formula, exact in Q(sqrt3).
Rt3 shoelace2(const KochApprox& K) {
    Rt3 s;
    const std::size_t m = K.vertices.size();
    for (std::size_t j = 0; j < m; ++j) {
        const Rt3Point& A = K.vertices[j];
        const Rt3Point& B = K.vertices[(j + 1) % m];
        s = s + (A[0] * B[1] - B[0] * A[1]);
    }
    return s;
}

Rt3Point rt3_point(const Dyadic& x, const Dyadic& y) {
    return Rt3Point{Rt3::rational(x.to_mpq()), Rt3::rational(y.to_mpq())};
}

Dyadic random_dyadic(std::mt19937_64& rng, int span_pow2, int frac_bits) {
    std::uniform_int_distribution<std::int64_t> d(
        -(std::int64_t(span_pow2) << frac_bits),
        (std::int64_t(span_pow2) << frac_bits));
    return Dyadic(d(rng), -frac_bits);
}

} // namespace

TEST_CASE("snowflake polygons are exact closed curves") {
    mpq_class len2(1);
    for (int i = 0; i <= 3; ++i) {
        KochApprox K = koch_polygon(i);
        CHECK(K.level == i);
        std::size_t expect = 3;
        for (int j = 0; j < i; ++j) expect *= 4;
        CHECK(K.vertices.size() == expect);
        for (std::size_t j = 0; j < K.vertices.size(); ++j) {
            Rt3 l2 = edge_len_sq(K, j);
            CHECK(sgn(l2.b) == 0);
            CHECK(l2.a == len2);
        }
        len2 /= 9;
    }
}

TEST_CASE("refinement keeps previous vertices and stays counterclockwise") {
    for (int i = 0; i <= 3; ++i) {
        KochApprox K = koch_polygon(i);
        KochApprox K1 = koch_polygon(i + 1);
        for (std::size_t j = 0; j < K.vertices.size(); ++j) {
            CHECK(K1.vertices[4 * j][0] == K.vertices[j][0]);
            CHECK(K1.vertices[4 * j][1] == K.vertices[j][1]);
        }
        CHECK(shoelace2(K).sign() > 0);
    }
    // Exact areas: 2A_0 = sqrt3/2 and 2A_1 = 2*sqrt3/3 (each bump adds an
    // equilateral triangle of side 1/3).
    CHECK(shoelace2(koch_polygon(0)) == Rt3(0, mpq_class(1, 2)));
    CHECK(shoelace2(koch_polygon(1)) == Rt3(0, mpq_class(2, 3)));
}

TEST_CASE("bumps point outward onto the circumcircle") {
    KochApprox K1 = koch_polygon(1);
    // Edge 1 of the triangle runs bottom-left -> bottom-right; its peak is
    // vertex 4*1 + 2 and must be (0, -sqrt3/3), below the base.
    CHECK(K1.vertices[6][0] == Rt3());
    CHECK(K1.vertices[6][1] == Rt3(0, mpq_class(-1, 3)));
    // All three peaks lie on the circumcircle x^2 + y^2 = 1/3.
    for (std::size_t j : {2u, 6u, 10u}) {
        const Rt3Point& p = K1.vertices[j];
        Rt3 r2 = p[0] * p[0] + p[1] * p[1];
        CHECK(sgn(r2.b) == 0);
        CHECK(r2.a == mpq_class(1, 3));
    }
}

TEST_CASE("exact point-to-polygon distances") {
    KochApprox K0 = koch_polygon(0);
    // Centroid to the unit triangle: inradius sqrt3/6, squared 1/12.
    Rt3 d0 = polygon_point_dist_sq(rt3_point(Dyadic(), Dyadic()), K0);
    CHECK(sgn(d0.b) == 0);
    CHECK(d0.a == mpq_class(1, 12));
    // Far point (0, 10): nearest feature is the apex (0, sqrt3/3), so the
    // squared distance is 100 - 20*sqrt3/3 + 1/3.
    Rt3 dfar = polygon_point_dist_sq(rt3_point(Dyadic(), Dyadic(10)), K0);
    CHECK(dfar == Rt3(mpq_class(301, 3), mpq_class(-20, 3)));
    // The apex survives every refinement, so its distance is exactly zero.
    for (int i = 0; i <= 3; ++i) {
        Rt3Point apex{Rt3(), Rt3(0, mpq_class(1, 3))};
        CHECK(polygon_point_dist_sq(apex, koch_polygon(i)) == Rt3());
    }
    // Centroid distance stabilizes at 1/3 once the first bumps exist.
    for (int i = 2; i <= 5; ++i) {
        Rt3 d = polygon_point_dist_sq(rt3_point(Dyadic(), Dyadic()),
                                      koch_polygon(i));
        CHECK(sgn(d.b) == 0);
        CHECK(d.a == mpq_class(1, 9));
    }
}

TEST_CASE("hausdorff distance between consecutive levels is exactly "
          "sqrt(1/12) * 3^-i") {
    mpq_class expect(1, 12);
    for (int i = 0; i <= 4; ++i) {
        Rt3 h2 = polygon_hausdorff_sq(koch_polygon(i), koch_polygon(i + 1));
        CHECK(sgn(h2.b) == 0);
        CHECK(h2.a == expect);
        expect /= 9;
    }
}

TEST_CASE("snowflake oracle certifies the centroid distance") {
    DistOracle kd = koch_distance();
    // d(0, K_i) = 1/3 exactly for i >= 2 (checked above through level 5) and
    // the level tail vanishes, so d(0, K) = 1/3 up to tail(5) < 0.0018.
    for (std::int64_t n : {4, 6, 8}) {
        Dyadic got = kd.eval(Point2{Dyadic(), Dyadic()}, n);
        mpq_class err = abs(got.to_mpq() - mpq_class(1, 3));
        CHECK(err < pow2q(-n) + mpq_class(18, 10000));
    }
    // The apex is on the curve at every level.
    Dyadic apex_y = dyadic_from_mpq_nearest(mpq_class(1, 3) * 173205 /
                                                mpq_class(100000),
                                            30);
    Dyadic near_apex = kd.eval(Point2{Dyadic(), apex_y}, 8);
    CHECK(near_apex.to_mpq() < pow2q(-8) + pow2q(-18));
}

TEST_CASE("fixed-level snowflake oracle matches exact polygon distance") {
    KochApprox K2 = koch_polygon(2);
    DistOracle kd2 = koch_distance(false, 2);
    std::mt19937_64 rng(0x5eedf00dULL);
    for (int it = 0; it < 15; ++it) {
        Dyadic px = random_dyadic(rng, 2, 20);
        Dyadic py = random_dyadic(rng, 2, 20);
        Rt3 d2 = polygon_point_dist_sq(rt3_point(px, py), K2);
        for (std::int64_t n : {4, 10, 16}) {
            Dyadic got = kd2.eval(Point2{px, py}, n);
            Dyadic lo = got - Dyadic::pow2(-n);
            if (lo < Dyadic()) lo = Dyadic();
            Dyadic hi = got + Dyadic::pow2(-n);
            CHECK(d2.cmp(Rt3::rational(lo.to_mpq() * lo.to_mpq())) >= 0);
            CHECK(d2.cmp(Rt3::rational(hi.to_mpq() * hi.to_mpq())) <= 0);
        }
    }
}

TEST_CASE("snowflake oracle is consistent across precisions and runs") {
    DistOracle kd = koch_distance();
    std::mt19937_64 rng(0xabcdefULL);
    for (int it = 0; it < 8; ++it) {
        Point2 p{random_dyadic(rng, 1, 16), random_dyadic(rng, 1, 16)};
        for (std::int64_t n : {3, 5, 7}) {
            Dyadic a = kd.eval(p, n);
            Dyadic b = kd.eval(p, n + 2);
            Dyadic gap = a - b;
            if (gap < Dyadic()) gap = -gap;
            CHECK(gap < Dyadic::pow2(-n) + Dyadic::pow2(-(n + 2)));
            CHECK(kd.eval(p, n) == a); // deterministic
        }
    }
}

TEST_CASE("snowflake level caps surface as errors") {
    CHECK_THROWS_AS(koch_polygon(10), DomainError);
    CHECK_THROWS_AS(koch_polygon(-1), DomainError);
    DistOracle kd = koch_distance();
    CHECK_THROWS_AS(kd.eval(Point2{Dyadic(), Dyadic()}, 15), BudgetError);
}

TEST_CASE("parameter-plane escape iteration matches hand orbits") {
    // c = 1: orbit 1 -> 2 -> 5 escapes at step 2 (|2| is not above radius).
    OrbitOutcome o = mandel_escape(ComplexBox(Dyadic(1), Dyadic()), 3, 30);
    CHECK(o.escaped());
    CHECK(o.index == 2);
    CHECK_FALSE(o.width_blowup);
    // Larger budgets report the same first escape step.
    OrbitOutcome o2 = mandel_escape(ComplexBox(Dyadic(1), Dyadic()), 500, 30);
    CHECK(o2.escaped());
    CHECK(o2.index == 2);
    // |c| > 2 escapes immediately.
    OrbitOutcome big = mandel_escape(ComplexBox(Dyadic(3), Dyadic()), 5, 30);
    CHECK(big.escaped());
    CHECK(big.index == 0);
    // c = 0 and c = -2 stay bounded forever: iteration budget exhausts.
    CHECK(mandel_escape(ComplexBox(Dyadic(), Dyadic()), 60, 40).kind ==
          OrbitOutcome::Kind::unknown);
    CHECK(mandel_escape(ComplexBox(Dyadic(-2), Dyadic()), 60, 80).kind ==
          OrbitOutcome::Kind::unknown);
    // c = i cycles {-1+i, -i}: bounded, never certified out.
    CHECK(mandel_escape(ComplexBox(Dyadic(), Dyadic(1)), 40, 60).kind ==
          OrbitOutcome::Kind::unknown);
    // c = 1/2 eventually escapes.
    CHECK(mandel_escape(ComplexBox(Dyadic(1, -1), Dyadic()), 20, 40).escaped());
    CHECK_THROWS_AS(mandel_escape(ComplexBox(Dyadic(), Dyadic()), 0, 30),
                    DomainError);
    CHECK_THROWS_AS(mandel_escape(ComplexBox(Dyadic(), Dyadic()), 10, 0),
                    DomainError);
}

TEST_CASE("wide boxes at low precision report width blow-up") {
    ComplexBox c(DyInterval(Dyadic(-17, -3), Dyadic(-15, -3)), // -2 +- 1/8
                 DyInterval(Dyadic(), Dyadic()));
    OrbitOutcome o = mandel_escape(c, 100, 6);
    CHECK(o.kind == OrbitOutcome::Kind::unknown);
    CHECK(o.width_blowup);
}

TEST_CASE("parameter-plane pixels certify only the outside") {
    PixelDecision mp = mandel_pixel({});
    Point2 origin{Dyadic(), Dyadic()};
    Point2 one{Dyadic(1), Dyadic()};
    Point2 minus1{Dyadic(-1), Dyadic()};
    for (std::int64_t n : {2, 4}) {
        CHECK(mp.decide(origin, n) == 1);
        CHECK(mp.diagnose(origin, n) == Diag::undetermined);
    }
    CHECK(mp.decide(one, 3) == 0);
    CHECK(mp.diagnose(one, 3) == Diag::certified_out);
    CHECK(mp.decide(minus1, 5) == 1); // -1 is in the set: never certified out
    // Budget semantics: a too-small iteration cap cannot certify, a larger
    // one can, and certification is monotone in the budget.
    EscapeParams tiny;
    tiny.T_max = 1;
    CHECK(mandel_pixel(tiny).decide(one, 3) == 1);
    EscapeParams enough;
    enough.T_max = 8;
    CHECK(mandel_pixel(enough).decide(one, 3) == 0);
    EscapeParams plenty;
    plenty.T_max = 4000;
    CHECK(mandel_pixel(plenty).decide(one, 3) == 0);
}

TEST_CASE("julia orbit classification matches hand dynamics") {
    RealOracle zero = oracle_from_dyadic(Dyadic());
    RealOracle mone = oracle_from_dyadic(Dyadic(-1));
    // c = 0, x = 1/2: contracts into the basin of 0.
    OrbitOutcome a = julia_classify(zero, zero,
                                    ComplexBox(Dyadic(1, -1), Dyadic()), {});
    CHECK(a.attracted());
    CHECK(a.index == 1);
    // c = 0, x = 3: first step lands at 9 > 2.
    OrbitOutcome e = julia_classify(zero, zero, ComplexBox(Dyadic(3), Dyadic()),
                                    {});
    CHECK(e.escaped());
    CHECK(e.index == 1);
    // c = 0, x = 1 and x = i: on the unit circle (the Julia set): unknown.
    CHECK(julia_classify(zero, zero, ComplexBox(Dyadic(1), Dyadic()), {}).kind ==
          OrbitOutcome::Kind::unknown);
    CHECK(julia_classify(zero, zero, ComplexBox(Dyadic(), Dyadic(1)), {}).kind ==
          OrbitOutcome::Kind::unknown);
    // c = -1: superattracting 2-cycle {0, -1}.
    OrbitOutcome two = julia_classify(mone, zero,
                                      ComplexBox(Dyadic(), Dyadic()), {});
    CHECK(two.attracted());
    CHECK(two.index == 2);
    OrbitOutcome half = julia_classify(mone, zero,
                                       ComplexBox(Dyadic(1, -1), Dyadic()), {});
    CHECK(half.attracted());
    CHECK(half.index == 2);
    // Large parameter pushes the escape radius up: |x| > 2 is not enough.
    RealOracle three = oracle_from_dyadic(Dyadic(3));
    OrbitOutcome lg = julia_classify(three, zero,
                                     ComplexBox(Dyadic(5, -1), Dyadic()), {});
    CHECK(lg.escaped());
}

TEST_CASE("julia pixels: boundary vs filled certificates") {
    RealOracle zero = oracle_from_dyadic(Dyadic());
    PixelDecision boundary = julia_pixel(zero, zero, false, {});
    PixelDecision filled = julia_pixel(zero, zero, true, {});
    Point2 origin{Dyadic(), Dyadic()};
    Point2 one{Dyadic(1), Dyadic()};
    Point2 far2{Dyadic(2), Dyadic()};
    // The center is deep inside K_0: far from J_0, inside K_0.
    CHECK(boundary.decide(origin, 3) == 0);
    CHECK(boundary.diagnose(origin, 3) == Diag::certified_out);
    CHECK(filled.decide(origin, 3) == 1);
    CHECK(filled.diagnose(origin, 3) == Diag::certified_in);
    // A point of J_0 itself is never certified away.
    CHECK(boundary.decide(one, 3) == 1);
    CHECK(filled.decide(one, 3) == 1);
    CHECK(filled.diagnose(one, 3) == Diag::undetermined);
    // Far outside: escape certifies both variants.
    CHECK(boundary.decide(far2, 3) == 0);
    CHECK(filled.decide(far2, 3) == 0);
    CHECK(filled.diagnose(far2, 3) == Diag::certified_out);
    // Determinism.
    CHECK(boundary.decide(origin, 3) == 0);
    CHECK(filled.diagnose(origin, 3) == Diag::certified_in);
}

TEST_CASE("julia zero-parameter pixels agree with the exact unit circle") {
    RealOracle zero = oracle_from_dyadic(Dyadic());
    PixelDecision jp = julia_pixel(zero, zero, false, {});
    DistOracle circ = circle_distance_oracle(
        oracle_from_dyadic(Dyadic()), oracle_from_dyadic(Dyadic()),
        oracle_from_dyadic(Dyadic(1)));
    PixelDecision cp = pixel_from_distance(circ);
    const std::int64_t n = 4;
    int certified = 0;
    for (int ix = -24; ix <= 24; ++ix) {
        for (int iy = -24; iy <= 24; ++iy) {
            Point2 d{Dyadic(ix, -4), Dyadic(iy, -4)};
            if (jp.decide(d, n) == 0) {
                ++certified;
                // Certified-out pixel boxes keep the full inflated box off
                // J_0, which forces the exact-circle pixel to agree.
                CHECK(cp.decide(d, n) == 0);
            }
        }
    }
    // Sanity: a healthy majority of this window is certified away.
    CHECK(certified > 1500);
}

TEST_CASE("filled julia certificates respect the exact unit disk") {
    RealOracle zero = oracle_from_dyadic(Dyadic());
    PixelDecision fp = julia_pixel(zero, zero, true, {});
    const std::int64_t n = 4;
    const Dyadic r = Dyadic(1, 1 - n); // half-width of the certified box
    const Dyadic one(1);
    int ins = 0;
    int outs = 0;
    for (int ix = -24; ix <= 24; ++ix) {
        for (int iy = -24; iy <= 24; ++iy) {
            Point2 d{Dyadic(ix, -4), Dyadic(iy, -4)};
            Diag g = fp.diagnose(d, n);
            Dyadic ax = ix < 0 ? -d.x : d.x;
            Dyadic ay = iy < 0 ? -d.y : d.y;
            if (g == Diag::certified_in) {
                ++ins;
                // The whole inflated pixel box must lie in K_0, the closed
                // unit disk: its farthest corner stays inside.
                Dyadic fx = ax + r;
                Dyadic fy = ay + r;
                CHECK((fx * fx + fy * fy).cmp(one) <= 0);
            } else if (g == Diag::certified_out) {
                ++outs;
                // The whole box must miss K_0: its nearest point to the
                // origin is outside the closed unit disk.
                Dyadic cx = max(ax - r, Dyadic());
                Dyadic cy = max(ay - r, Dyadic());
                CHECK((cx * cx + cy * cy).cmp(one) > 0);
            }
        }
    }
    CHECK(ins > 50);
    CHECK(outs > 1000);
}
