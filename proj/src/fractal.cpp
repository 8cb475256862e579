#include "bitreal/fractal.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include "bitreal/error.hpp"
#include "bitreal/roots.hpp"

namespace bitreal {

// ---------------------------------------------------------------------------
// Q(sqrt 3) arithmetic
// ---------------------------------------------------------------------------

int Rt3::sign() const {
    int sa = sgn(a), sb = sgn(b);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Mixed signs: a + b*sqrt3 has the sign of the larger magnitude; compare
    // a^2 against 3 b^2 exactly. If a^2 > 3 b^2 the rational part wins.
    int big = ::cmp(mpq_class(a * a), mpq_class(3 * b * b));
    if (big == 0) return 0; // impossible for nonzero b (sqrt3 irrational)
    return big > 0 ? sa : sb;
}

Rt3 Rt3::inv() const {
    mpq_class norm = a * a - 3 * b * b;
    if (sgn(norm) == 0)
        throw Error("Rt3: inverse of zero");
    return Rt3(a / norm, -b / norm);
}

namespace {

// Shared high-precision sqrt(3) bracket: S3_LO <= sqrt3 < S3_LO + 2^-129.
const Dyadic& sqrt3_lo() {
    static const Dyadic v = sqrt_lower(mpq_class(3), 128);
    return v;
}

// Bits needed to bound |q| from above: smallest L with |q| <= 2^L.
std::int64_t mag_bits(const mpq_class& q) {
    if (sgn(q) == 0) return 0;
    std::int64_t nb = static_cast<std::int64_t>(
        mpz_sizeinbase(q.get_num().get_mpz_t(), 2));
    std::int64_t db = static_cast<std::int64_t>(
        mpz_sizeinbase(q.get_den().get_mpz_t(), 2));
    return nb - db + 1;
}

// Dyadic bracket [floor, ceil] of a rational on the 2^-t grid.
DyInterval rational_bracket(const mpq_class& q, std::int64_t t) {
    Dyadic num(mpz_class(q.get_num()), 0);
    Dyadic den(mpz_class(q.get_den()), 0);
    return DyInterval(div_floor(num, den, t), div_ceil(num, den, t));
}

} // namespace

DyInterval Rt3::enclosure(std::int64_t t) const {
    if (sgn(b) == 0) return rational_bracket(a, t + 1);
    std::int64_t bb = mag_bits(b);
    mpq_class lo_q, hi_q;
    if (t + bb <= 120) {
        // Reuse the shared 128-bit sqrt(3) bracket.
        mpq_class s_lo = sqrt3_lo().to_mpq();
        mpq_class s_hi = s_lo + mpq_class(mpz_class(1), mpz_class(1) << 129);
        if (sgn(b) > 0) {
            lo_q = a + b * s_lo;
            hi_q = a + b * s_hi;
        } else {
            lo_q = a + b * s_hi;
            hi_q = a + b * s_lo;
        }
    } else {
        std::int64_t m = t + 2 + std::max<std::int64_t>(bb, 0);
        mpq_class s_lo = sqrt_lower(mpq_class(3), m).to_mpq();
        mpq_class s_hi =
            s_lo + mpq_class(mpz_class(1),
                             mpz_class(1) << static_cast<unsigned>(m + 1));
        if (sgn(b) > 0) {
            lo_q = a + b * s_lo;
            hi_q = a + b * s_hi;
        } else {
            lo_q = a + b * s_hi;
            hi_q = a + b * s_lo;
        }
    }
    Dyadic lo = rational_bracket(lo_q, t + 2).lo;
    Dyadic hi = rational_bracket(hi_q, t + 2).hi;
    return DyInterval(lo, hi);
}

// ---------------------------------------------------------------------------
// Snowflake polygons
// ---------------------------------------------------------------------------

namespace {

Rt3 dot2(const Rt3& ax, const Rt3& ay, const Rt3& bx, const Rt3& by) {
    return ax * bx + ay * by;
}

// Exact squared distance from p to segment [A, B] in Q(sqrt3).
Rt3 seg_dist_sq_rt3(const Rt3Point& p, const Rt3Point& A, const Rt3Point& B) {
    Rt3 vx = B[0] - A[0], vy = B[1] - A[1];
    Rt3 wx = p[0] - A[0], wy = p[1] - A[1];
    Rt3 vv = dot2(vx, vy, vx, vy);
    Rt3 wv = dot2(wx, wy, vx, vy);
    if (wv.sign() <= 0) return dot2(wx, wy, wx, wy);
    if ((wv - vv).sign() >= 0) {
        Rt3 ux = p[0] - B[0], uy = p[1] - B[1];
        return dot2(ux, uy, ux, uy);
    }
    return dot2(wx, wy, wx, wy) - wv * wv / vv;
}

const Rt3 HALF(mpq_class(1, 2), 0);       // 1/2
const Rt3 HALF_S3(0, mpq_class(1, 2));    // sqrt(3)/2
const Rt3 THIRD(mpq_class(1, 3), 0);      // 1/3

// Rotation by -60 degrees: (x, y) -> (x/2 + y*sqrt3/2, -x*sqrt3/2 + y/2).
Rt3Point rot_m60(const Rt3& x, const Rt3& y) {
    return {x * HALF + y * HALF_S3, -(x * HALF_S3) + y * HALF};
}

} // namespace

KochApprox koch_polygon(int level) {
    if (level < 0 || level > 9)
        throw DomainError("koch_polygon: level must be in 0..9, got " +
                          std::to_string(level));
    KochApprox K;
    K.level = 0;
    // Unit-side equilateral triangle, centroid at the origin, apex up, CCW:
    // apex (0, sqrt3/3), bottom-left (-1/2, -sqrt3/6), bottom-right
    // (1/2, -sqrt3/6).
    K.vertices = {
        {Rt3(0, 0), Rt3(0, mpq_class(1, 3))},
        {Rt3(mpq_class(-1, 2), 0), Rt3(0, mpq_class(-1, 6))},
        {Rt3(mpq_class(1, 2), 0), Rt3(0, mpq_class(-1, 6))},
    };
    for (int i = 0; i < level; ++i) {
        std::vector<Rt3Point> next;
        next.reserve(K.vertices.size() * 4);
        std::size_t m = K.vertices.size();
        for (std::size_t j = 0; j < m; ++j) {
            const Rt3Point& A = K.vertices[j];
            const Rt3Point& B = K.vertices[(j + 1) % m];
            Rt3 dx = (B[0] - A[0]) * THIRD;
            Rt3 dy = (B[1] - A[1]) * THIRD;
            Rt3Point M1{A[0] + dx, A[1] + dy};
            Rt3Point M2{A[0] + dx + dx, A[1] + dy + dy};
            Rt3Point bump = rot_m60(dx, dy);
            Rt3Point peak{M1[0] + bump[0], M1[1] + bump[1]};
            next.push_back(A);
            next.push_back(M1);
            next.push_back(peak);
            next.push_back(M2);
        }
        K.vertices = std::move(next);
        K.level = i + 1;
    }
    return K;
}

Rt3 polygon_point_dist_sq(const Rt3Point& p, const KochApprox& K) {
    if (K.vertices.empty()) throw Error("polygon_point_dist_sq: empty");
    const std::size_t m = K.vertices.size();
    Rt3 best = seg_dist_sq_rt3(p, K.vertices[0], K.vertices[1 % m]);
    for (std::size_t j = 1; j < m; ++j) {
        Rt3 d = seg_dist_sq_rt3(p, K.vertices[j], K.vertices[(j + 1) % m]);
        if (d.cmp(best) < 0) best = d;
    }
    return best;
}

// ---------------------------------------------------------------------------
// x-sorted edge index for fast exact nearest-edge queries
// ---------------------------------------------------------------------------

namespace {

struct IndexedEdge {
    Box2 bbox;          // dyadic outer enclosure of the edge
    std::uint32_t j;    // edge index: vertices[j] -> vertices[(j+1) % m]
};

struct EdgeIndex {
    KochApprox poly;
    std::vector<IndexedEdge> edges; // sorted by bbox.x.lo
    Dyadic max_len;                 // upper bound on edge length

    explicit EdgeIndex(KochApprox K) : poly(std::move(K)) {
        const std::size_t m = poly.vertices.size();
        edges.reserve(m);
        for (std::size_t j = 0; j < m; ++j) {
            const Rt3Point& A = poly.vertices[j];
            const Rt3Point& B = poly.vertices[(j + 1) % m];
            DyInterval ax = A[0].enclosure(48), bx = B[0].enclosure(48);
            DyInterval ay = A[1].enclosure(48), by = B[1].enclosure(48);
            edges.push_back(IndexedEdge{
                Box2{DyInterval::hull(ax, bx), DyInterval::hull(ay, by)},
                static_cast<std::uint32_t>(j)});
        }
        std::sort(edges.begin(), edges.end(),
                  [](const IndexedEdge& a, const IndexedEdge& b) {
                      return a.bbox.x.lo < b.bbox.x.lo;
                  });
        // Edge length 3^-level, rounded up, plus enclosure slack.
        mpz_class p3 = 1;
        for (int i = 0; i < poly.level; ++i) p3 *= 3;
        max_len = div_ceil(Dyadic(1), Dyadic(p3, 0), 40) + Dyadic(1, -40);
    }

    const Rt3Point& va(const IndexedEdge& e) const {
        return poly.vertices[e.j];
    }
    const Rt3Point& vb(const IndexedEdge& e) const {
        return poly.vertices[(e.j + 1) % poly.vertices.size()];
    }

    Box2 hull_bbox() const {
        Box2 h = edges.front().bbox;
        for (const IndexedEdge& e : edges) {
            h.x = DyInterval::hull(h.x, e.bbox.x);
            h.y = DyInterval::hull(h.y, e.bbox.y);
        }
        return h;
    }

    // Iterate edges whose x-enclosure can intersect [cx - r, cx + r]; the
    // sort on bbox.x.lo plus the uniform length bound turn this into one
    // contiguous window. fn returns the current dyadic search radius (it
    // may shrink as better candidates are found).
    template <typename Fn>
    void window_scan(const Dyadic& cx, Dyadic r, Fn&& fn) const {
        Dyadic lo_key = cx - r - max_len;
        auto it = std::lower_bound(
            edges.begin(), edges.end(), lo_key,
            [](const IndexedEdge& e, const Dyadic& v) {
                return e.bbox.x.lo < v;
            });
        for (; it != edges.end(); ++it) {
            if (it->bbox.x.lo > cx + r) break;
            r = fn(*it);
        }
    }

    // Pick a spatially close seed edge: among a bracket of x-neighbors of
    // the anchor, minimize the cheap dyadic bbox distance. Seed quality only
    // affects speed (it sets the initial search radius), never soundness.
    const IndexedEdge& seed_edge(const Point2& anchor) const {
        auto mid = std::lower_bound(
            edges.begin(), edges.end(), anchor.x,
            [](const IndexedEdge& e, const Dyadic& v) {
                return e.bbox.x.lo < v;
            });
        std::ptrdiff_t i = mid - edges.begin();
        std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - 48);
        std::ptrdiff_t hi = std::min<std::ptrdiff_t>(
            static_cast<std::ptrdiff_t>(edges.size()), i + 48);
        std::ptrdiff_t pick = lo;
        Dyadic best = box_dist_sq(anchor, edges[lo].bbox);
        for (std::ptrdiff_t j = lo + 1; j < hi; ++j) {
            Dyadic d = box_dist_sq(anchor, edges[j].bbox);
            if (d < best) {
                best = d;
                pick = j;
            }
        }
        return edges[pick];
    }

    // Exact squared distance from an exact point to the nearest edge.
    // anchor is a dyadic point within `slack` of p (used only to steer the
    // window; correctness never depends on it).
    Rt3 nearest_sq(const Rt3Point& p, const Point2& anchor,
                   const Dyadic& slack) const {
        const IndexedEdge& seed = seed_edge(anchor);
        Rt3 best = seg_dist_sq_rt3(p, va(seed), vb(seed));
        // Dyadic upper bound on sqrt(best), padded by the anchor slack.
        auto radius = [&]() {
            Dyadic up = best.enclosure(40).hi;
            if (up < Dyadic()) up = Dyadic();
            return sqrt_upper(up.to_mpq(), 20) + slack + Dyadic(1, -18);
        };
        Dyadic r = radius();
        window_scan(anchor.x, r, [&](const IndexedEdge& e) {
            // Cheap reject against the current radius via the dyadic bbox.
            Dyadic lb = box_dist_sq(anchor, e.bbox);
            if (lb > r * r) return r;
            Rt3 d = seg_dist_sq_rt3(p, va(e), vb(e));
            if (d.cmp(best) < 0) {
                best = d;
                r = radius();
            }
            return r;
        });
        return best;
    }

    // min over edges e of max(d^2(u, e), d^2(v, e)): a certified upper
    // bound for max over the subsegment [u, v] of the distance to the
    // polygon (point-to-segment distance is convex along a segment, so its
    // max sits at an endpoint). anchor approximates u.
    Rt3 minmax_sq(const Rt3Point& u, const Rt3Point& v, const Point2& anchor,
                  const Dyadic& slack) const {
        auto eval = [&](const IndexedEdge& e) {
            Rt3 du = seg_dist_sq_rt3(u, va(e), vb(e));
            Rt3 dv = seg_dist_sq_rt3(v, va(e), vb(e));
            return du.cmp(dv) >= 0 ? du : dv;
        };
        Rt3 best = eval(seed_edge(anchor));
        // Any edge farther than sqrt(best) from u has max >= d(u,e) > best,
        // so the u-window bounds the search.
        auto radius = [&]() {
            Dyadic up = best.enclosure(40).hi;
            if (up < Dyadic()) up = Dyadic();
            return sqrt_upper(up.to_mpq(), 20) + slack + Dyadic(1, -18);
        };
        Dyadic r = radius();
        window_scan(anchor.x, r, [&](const IndexedEdge& e) {
            Dyadic lb = box_dist_sq(anchor, e.bbox);
            if (lb > r * r) return r;
            Rt3 d = eval(e);
            if (d.cmp(best) < 0) {
                best = d;
                r = radius();
            }
            return r;
        });
        return best;
    }
};

Point2 rt3_anchor(const Rt3Point& p) {
    return Point2{p[0].enclosure(30).mid(), p[1].enclosure(30).mid()};
}

Rt3 directed_hausdorff_sq(const EdgeIndex& from, const EdgeIndex& to) {
    const Dyadic slack = Dyadic(1, -28); // anchor enclosure slop
    // Candidate maximizers: vertices and edge midpoints of `from`.
    Rt3 target(-1, 0);
    const std::size_t m = from.poly.vertices.size();
    for (std::size_t j = 0; j < m; ++j) {
        const Rt3Point& A = from.poly.vertices[j];
        const Rt3Point& B = from.poly.vertices[(j + 1) % m];
        Rt3Point mid{(A[0] + B[0]) * HALF, (A[1] + B[1]) * HALF};
        for (const Rt3Point& cand : {A, mid}) {
            Rt3 d = to.nearest_sq(cand, rt3_anchor(cand), slack);
            if (d.cmp(target) > 0) target = d;
        }
    }
    // Certify: every point of `from` is within sqrt(target) of `to`.
    // Subdivide each edge (seeded at its midpoint, where the symmetric
    // maximizers of the construction live) until the endpoint bound closes.
    for (std::size_t j = 0; j < m; ++j) {
        const Rt3Point& A = from.poly.vertices[j];
        const Rt3Point& B = from.poly.vertices[(j + 1) % m];
        auto at = [&](const mpq_class& lam) {
            Rt3 l = Rt3::rational(lam);
            return Rt3Point{A[0] + (B[0] - A[0]) * l,
                            A[1] + (B[1] - A[1]) * l};
        };
        struct Piece {
            mpq_class lo, hi;
            int depth;
        };
        std::vector<Piece> stack{{mpq_class(0), mpq_class(1, 2), 0},
                                 {mpq_class(1, 2), mpq_class(1), 0}};
        while (!stack.empty()) {
            Piece pc = stack.back();
            stack.pop_back();
            Rt3Point u = at(pc.lo), v = at(pc.hi);
            Rt3 bound = to.minmax_sq(u, v, rt3_anchor(u), slack);
            if (bound.cmp(target) <= 0) continue;
            if (pc.depth >= 48)
                throw Error("polygon_hausdorff_sq: certification did not "
                            "close; candidate set missed a maximizer");
            mpq_class midl = (pc.lo + pc.hi) / 2;
            stack.push_back({pc.lo, midl, pc.depth + 1});
            stack.push_back({midl, pc.hi, pc.depth + 1});
        }
    }
    return target;
}

} // namespace

Rt3 polygon_hausdorff_sq(const KochApprox& P, const KochApprox& Q) {
    if (P.vertices.empty() || Q.vertices.empty())
        throw Error("polygon_hausdorff_sq: empty polygon");
    EdgeIndex ip(P), iq(Q);
    Rt3 a = directed_hausdorff_sq(ip, iq);
    Rt3 b = directed_hausdorff_sq(iq, ip);
    return a.cmp(b) >= 0 ? a : b;
}

// ---------------------------------------------------------------------------
// Snowflake distance oracle
// ---------------------------------------------------------------------------

namespace {

// Smallest level whose geometric tail (sqrt3/4) * 3^-i is below 2^-(n+1),
// i.e. 3 * 4^(n+1) < 16 * 9^i.
int koch_level_for(std::int64_t n) {
    if (n < 0) n = 0;
    mpz_class lhs = mpz_class(3) << static_cast<unsigned>(2 * (n + 1));
    mpz_class p9 = 16;
    for (int i = 0; i <= 9; ++i) {
        if (p9 > lhs) return i;
        p9 *= 9;
    }
    throw BudgetError(
        "koch_distance: precision " + std::to_string(n) +
        " needs a polygon level beyond the supported cap of 9");
}

struct KochCache {
    std::mutex mu;
    std::map<int, std::shared_ptr<const EdgeIndex>> levels;

    std::shared_ptr<const EdgeIndex> get(int level) {
        std::lock_guard<std::mutex> lk(mu);
        auto it = levels.find(level);
        if (it != levels.end()) return it->second;
        auto idx = std::make_shared<const EdgeIndex>(koch_polygon(level));
        levels.emplace(level, idx);
        return idx;
    }
};

} // namespace

DistOracle koch_distance(bool i_auto, int fixed_level) {
    auto cache = std::make_shared<KochCache>();
    // Certified bound box: hull of the level-2 polygon inflated by its tail
    // bound (sqrt3/36 < 1/16) when tracking the limit curve.
    Box2 bound = cache->get(i_auto ? 2 : fixed_level)->hull_bbox();
    if (i_auto) bound = bound.inflate(Dyadic(1, -4));
    bound = Box2{bound.x.outward_round(6), bound.y.outward_round(6)};
    std::string desc = i_auto ? "koch-snowflake"
                              : "koch-polygon(level " +
                                    std::to_string(fixed_level) + ")";
    return DistOracle::make(
        desc, bound, [cache, i_auto, fixed_level](const Point2& p,
                                                  std::int64_t n) {
            if (n < 0) n = 0;
            int level = i_auto ? koch_level_for(n) : fixed_level;
            std::shared_ptr<const EdgeIndex> idx = cache->get(level);
            Rt3Point pe{Rt3::rational(p.x.to_mpq()),
                        Rt3::rational(p.y.to_mpq())};
            Rt3 d2 = idx->nearest_sq(pe, p, Dyadic());
            // Certified square root: bracket d^2 tightly enough that the
            // root bracket has width ~2^-(n+6), return the midpoint.
            DyInterval e = d2.enclosure(2 * n + 12);
            mpq_class lo = e.lo.to_mpq();
            if (lo < 0) lo = 0;
            Dyadic L = sqrt_lower(lo, n + 6);
            Dyadic U = sqrt_upper(e.hi.to_mpq(), n + 6);
            return (L + U).mul_pow2(-1).round_to(n + 3);
        });
}

// ---------------------------------------------------------------------------
// Mandelbrot escape iteration
// ---------------------------------------------------------------------------

OrbitOutcome mandel_escape(const ComplexBox& c, std::int64_t T,
                           std::int64_t p) {
    if (T < 1) throw DomainError("mandel_escape: T must be >= 1");
    if (p < 1) throw DomainError("mandel_escape: precision must be >= 1");
    const Dyadic four(4);
    ComplexBox z = c;
    for (std::int64_t t = 0;; ++t) {
        if (mag_sq_bounds(z).lo > four)
            return OrbitOutcome{OrbitOutcome::Kind::escaped, t, false};
        if (z.width() > four)
            return OrbitOutcome{OrbitOutcome::Kind::unknown, t, true};
        if (t == T)
            return OrbitOutcome{OrbitOutcome::Kind::unknown, t, false};
        z = box_step(z, c, p);
    }
}

namespace {

ComplexBox pixel_box(const Point2& d, std::int64_t n) {
    Dyadic r = Dyadic(1, 1 - n); // 2 * 2^-n
    return ComplexBox(DyInterval(d.x - r, d.x + r),
                      DyInterval(d.y - r, d.y + r));
}

std::array<ComplexBox, 4> quadrants(const ComplexBox& b) {
    Dyadic mx = b.re.mid(), my = b.im.mid();
    DyInterval rl(b.re.lo, mx), rr(mx, b.re.hi);
    DyInterval il(b.im.lo, my), ih(my, b.im.hi);
    return {ComplexBox(rl, il), ComplexBox(rr, il), ComplexBox(rl, ih),
            ComplexBox(rr, ih)};
}

// Which certificate kinds the leaves of the subdivision tree produced.
struct LeafKinds {
    bool escaped = false;
    bool attracted = false;
    bool unknown = false;
};

// Adaptive quadrant subdivision: leaves are classified by `leaf`; a leaf
// whose interval widths blew up is split (while depth remains) since
// smaller start boxes iterate tighter. Splits are tallied into `tally`.
template <typename Leaf>
void classify_tree(const ComplexBox& b, int depth_left, Leaf&& leaf,
                   LeafKinds& kinds, std::atomic<std::int64_t>* tally) {
    OrbitOutcome o = leaf(b);
    if (o.escaped()) {
        kinds.escaped = true;
        return;
    }
    if (o.attracted()) {
        kinds.attracted = true;
        return;
    }
    if (o.width_blowup && depth_left > 0) {
        if (tally) tally->fetch_add(1, std::memory_order_relaxed);
        for (const ComplexBox& q : quadrants(b)) {
            classify_tree(q, depth_left - 1, leaf, kinds, tally);
            if (kinds.unknown) return; // verdict settled: no certificate
        }
        return;
    }
    kinds.unknown = true;
}

} // namespace

PixelDecision mandel_pixel(const EscapeParams& params) {
    EscapeParams ps = params;
    Box2 bound{DyInterval(Dyadic(-2), Dyadic(2)),
               DyInterval(Dyadic(-2), Dyadic(2))};
    return PixelDecision::make(
        "mandelbrot", bound,
        [ps](const Point2& d, std::int64_t n) -> std::pair<int, Diag> {
            std::int64_t T =
                ps.T_max > 0 ? ps.T_max : 64 * std::max<std::int64_t>(n, 1);
            std::int64_t p = ps.p > 0 ? ps.p : n + 20;
            LeafKinds kinds;
            classify_tree(
                pixel_box(d, n), ps.subdiv,
                [&](const ComplexBox& b) { return mandel_escape(b, T, p); },
                kinds, ps.subdiv_counter.get());
            if (!kinds.unknown) return {0, Diag::certified_out};
            return {1, Diag::undetermined};
        });
}

// ---------------------------------------------------------------------------
// Julia iteration with oracle-valued parameter
// ---------------------------------------------------------------------------

namespace {

ComplexBox realize_c(const RealOracle& c_re, const RealOracle& c_im,
                     std::int64_t p) {
    Dyadic re = c_re.query(p), im = c_im.query(p);
    Dyadic r = Dyadic::pow2(-p);
    return ComplexBox(DyInterval(re - r, re + r),
                      DyInterval(im - r, im + r));
}

// Escape radius R = max(2, |c|+1) as an exact dyadic upper-bound pair
// (R, R^2): |z| > R guarantees monotone divergence of the orbit.
std::pair<Dyadic, Dyadic> escape_radius(const ComplexBox& c) {
    Dyadic m2 = mag_sq_bounds(c).hi;
    Dyadic mu = sqrt_upper(m2.to_mpq(), 12);
    Dyadic R = max(Dyadic(2), mu + Dyadic(1));
    return {R, R * R};
}

} // namespace

OrbitOutcome julia_classify(const RealOracle& c_re, const RealOracle& c_im,
                            const ComplexBox& x, const EscapeParams& params) {
    std::int64_t T = params.T_max > 0 ? params.T_max : 64;
    std::int64_t p = params.p > 0 ? params.p : 32;
    ComplexBox c = realize_c(c_re, c_im, p);
    Dyadic R2 = escape_radius(c).second;
    const Dyadic four(4);

    std::vector<ComplexBox> boxes;    // z_0 .. z_{t-1}
    std::vector<Dyadic> deriv_up;     // upper bound on |2 z_j| per step
    ComplexBox z = x;
    // The start box itself is not classified; verdicts begin with z_1.
    for (std::int64_t t = 1; t <= T; ++t) {
        boxes.push_back(z);
        deriv_up.push_back(
            sqrt_upper(mag_sq_bounds(z).hi.to_mpq(), 16).mul_pow2(1));
        z = box_step(z, c, p);
        if (mag_sq_bounds(z).lo > R2)
            return OrbitOutcome{OrbitOutcome::Kind::escaped, t, false};
        // Attracting-cycle certificate: the current box sits inside the box
        // seen l steps ago and the interval chain rule certifies the cycle
        // derivative below one, so the orbit funnels into an attracting
        // l-cycle.
        for (std::int64_t l = 1; l <= std::min<std::int64_t>(32, t); ++l) {
            if (!boxes[t - l].contains(z)) continue;
            Dyadic prod(1);
            bool small = true;
            for (std::int64_t j = t - l; j < t; ++j) {
                prod = prod * deriv_up[j];
                if (prod >= Dyadic(1)) {
                    small = false;
                    break;
                }
            }
            if (small)
                return OrbitOutcome{OrbitOutcome::Kind::attracted, l, false};
        }
        if (z.width() > four)
            return OrbitOutcome{OrbitOutcome::Kind::unknown, t, true};
    }
    return OrbitOutcome{OrbitOutcome::Kind::unknown, T, false};
}

PixelDecision julia_pixel(const RealOracle& c_re, const RealOracle& c_im,
                          bool filled, const EscapeParams& params) {
    EscapeParams ps = params;
    RealOracle cre = c_re, cim = c_im;
    Dyadic Rb = escape_radius(realize_c(cre, cim, 8)).first + Dyadic(1, -3);
    Box2 bound{DyInterval(-Rb, Rb), DyInterval(-Rb, Rb)};
    std::string desc = filled ? "julia-filled" : "julia-boundary";
    return PixelDecision::make(
        desc + "(" + cre.description() + ", " + cim.description() + ")",
        bound,
        [ps, cre, cim, filled](const Point2& d,
                               std::int64_t n) -> std::pair<int, Diag> {
            EscapeParams leaf_ps = ps;
            leaf_ps.T_max = ps.A * std::max<std::int64_t>(n, 0) + ps.B;
            if (leaf_ps.T_max < 1) leaf_ps.T_max = 1;
            leaf_ps.p = ps.p > 0 ? ps.p : n + 20;
            LeafKinds kinds;
            classify_tree(
                pixel_box(d, n), ps.subdiv,
                [&](const ComplexBox& b) {
                    return julia_classify(cre, cim, b, leaf_ps);
                },
                kinds, ps.subdiv_counter.get());
            if (filled) {
                // Escape-only leaves miss K_c; attraction-only leaves sit in
                // the basin interior, inside K_c.
                if (!kinds.unknown && !kinds.attracted)
                    return {0, Diag::certified_out};
                if (!kinds.unknown && !kinds.escaped)
                    return {1, Diag::certified_in};
                return {1, Diag::undetermined};
            }
            // Boundary variant: escaped and attracted pieces both stay off
            // J_c = boundary(K_c), so any mix of them certifies the pixel
            // away from the set.
            if (!kinds.unknown) return {0, Diag::certified_out};
            return {1, Diag::undetermined};
        });
}

} // namespace bitreal
