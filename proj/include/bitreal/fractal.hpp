#pragma once

#include <gmpxx.h>

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "bitreal/dyadic.hpp"
#include "bitreal/interval.hpp"
#include "bitreal/oracle.hpp"
#include "bitreal/set_comp.hpp"

namespace bitreal {

// ---------------------------------------------------------------------------
// Exact arithmetic in the field Q(sqrt 3)
// ---------------------------------------------------------------------------

// Value a + b*sqrt(3) with exact rational components. Snowflake polygon
// vertices live in this field, so every construction step, comparison and
// squared distance below is exact; approximation enters only at the final
// certified enclosure.
struct Rt3 {
    mpq_class a, b;

    Rt3() : a(0), b(0) {}
    Rt3(mpq_class a_, mpq_class b_) : a(std::move(a_)), b(std::move(b_)) {}
    static Rt3 rational(const mpq_class& q) { return Rt3(q, 0); }

    Rt3 operator+(const Rt3& o) const { return Rt3(a + o.a, b + o.b); }
    Rt3 operator-(const Rt3& o) const { return Rt3(a - o.a, b - o.b); }
    Rt3 operator-() const { return Rt3(-a, -b); }
    // (a + b s)(c + d s) = ac + 3bd + (ad + bc) s  with s^2 = 3.
    Rt3 operator*(const Rt3& o) const {
        return Rt3(a * o.a + 3 * b * o.b, a * o.b + b * o.a);
    }
    bool operator==(const Rt3& o) const { return a == o.a && b == o.b; }

    // Exact sign of a + b*sqrt(3): resolved by comparing a^2 against 3 b^2
    // in the mixed-sign case.
    int sign() const;
    int cmp(const Rt3& o) const { return (*this - o).sign(); }

    // Multiplicative inverse (value must be nonzero): conjugate over norm.
    Rt3 inv() const;
    Rt3 operator/(const Rt3& o) const { return *this * o.inv(); }

    // Certified dyadic enclosure of the value, width <= 2^-t.
    DyInterval enclosure(std::int64_t t) const;
};

using Rt3Point = std::array<Rt3, 2>;

// ---------------------------------------------------------------------------
// Snowflake polygons
// ---------------------------------------------------------------------------

// Level-i polygon of the middle-third bump construction started from the
// unit-side equilateral triangle centered at the origin, apex up, vertices
// counterclockwise. Closed curve: edge j runs vertices[j] ->
// vertices[(j+1) mod size], giving 3 * 4^i edges of exact length 3^-i.
struct KochApprox {
    int level = 0;
    std::vector<Rt3Point> vertices;
};

// Levels 0..9 (vertex count 3*4^i; the cap keeps desk-scale memory).
KochApprox koch_polygon(int level);

// Exact squared distance from a Q(sqrt3) point to the closed polygon curve.
Rt3 polygon_point_dist_sq(const Rt3Point& p, const KochApprox& K);

// Exact squared Hausdorff distance between two polygon curves. Candidate
// maxima are taken over vertices and edge midpoints and then certified by a
// subdivision argument (max of a point-to-segment distance over a segment is
// attained at its endpoints); throws Error if certification does not close,
// which would mean the candidate set missed the true maximizer.
Rt3 polygon_hausdorff_sq(const KochApprox& P, const KochApprox& Q);

// Distance oracle for the snowflake limit curve. With i_auto (default) each
// evaluation picks the level whose geometric tail bound (3/2)*h_1*3^-i, with
// h_1 = sqrt(3)/6 the first bump height, is below 2^-(n+1), then returns the
// exact polygon distance within 2^-(n+1). With i_auto = false the oracle is
// the exact distance to the fixed level-`fixed_level` polygon itself (useful
// as an audit reference).
DistOracle koch_distance(bool i_auto = true, int fixed_level = 5);

// ---------------------------------------------------------------------------
// Escape-time sets
// ---------------------------------------------------------------------------

struct EscapeParams {
    std::int64_t T_max = 0; // iteration cap; 0 = auto (64 * max(n,1))
    std::int64_t p = 0;     // working precision; 0 = auto (n + 20)
    std::int64_t A = 8;     // Julia iteration budget T(n) = A*n + B
    std::int64_t B = 32;
    int subdiv = 2;         // pixel subdivision depth budget
    // Optional shared tally: each quadrant split performed while certifying
    // a pixel adds one (render statistics plumbing; null = not recorded).
    std::shared_ptr<std::atomic<std::int64_t>> subdiv_counter;
};

struct OrbitOutcome {
    enum class Kind { escaped, attracted, unknown };
    Kind kind = Kind::unknown;
    // escaped: first step t whose magnitude lower bound clears the radius;
    // attracted: certified cycle length.
    std::int64_t index = 0;
    // unknown only: enclosure width blew up (subdividing the start box can
    // help) as opposed to running out of iterations.
    bool width_blowup = false;

    bool escaped() const { return kind == Kind::escaped; }
    bool attracted() const { return kind == Kind::attracted; }
};

// Interval iteration of z <- z^2 + c from z = c for at most T steps at
// working precision p. escaped(t) certifies that every parameter in the box
// has an orbit leaving B(0,2), hence lies outside the Mandelbrot set.
OrbitOutcome mandel_escape(const ComplexBox& c, std::int64_t T,
                           std::int64_t p);

// Pixel decisions for the Mandelbrot set. decide(d, n) == 0 only when the
// whole inflated pixel box [d +- 2*2^-n]^2 certifies escape (after at most
// `subdiv` levels of quadrant subdivision when enclosures blow up); that
// direction is certified. decide == 1 is heuristic: no bound on the number
// of iterations needed to certify membership is available, so 1-pixels are
// diagnosed undetermined.
PixelDecision mandel_pixel(const EscapeParams& params = {});

// Interval iteration of z <- z^2 + c from the box x, where the parameter c
// is known only through coordinate oracles. escaped(t): magnitude lower
// bound clears R = max(2, |c|+1). attracted(l): the orbit box re-enters
// itself after l steps with an interval derivative-product magnitude below
// one, certifying convergence to an attracting cycle (cycle search window
// l <= min(32, t)). unknown otherwise.
OrbitOutcome julia_classify(const RealOracle& c_re, const RealOracle& c_im,
                            const ComplexBox& x,
                            const EscapeParams& params = {});

// Pixel decisions for the filled Julia set K_c (filled = true) or the Julia
// set J_c = boundary of K_c (filled = false), iterating T(n) = A*n + B
// steps. filled: 0 iff the inflated pixel box certifies escape; a box whose
// every leaf certifies attraction lies inside the basin interior and is
// diagnosed certified_in (decide 1). boundary: 0 iff every leaf certifies
// escape or attraction (both keep its piece away from the boundary). The
// certified diagnoses are sound; everything else is undetermined.
PixelDecision julia_pixel(const RealOracle& c_re, const RealOracle& c_im,
                          bool filled, const EscapeParams& params = {});

} // namespace bitreal
