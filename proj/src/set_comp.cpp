#include "bitreal/set_comp.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>

#include "bitreal/error.hpp"
#include "bitreal/roots.hpp"

namespace bitreal {

// ---------------------------------------------------------------------------
// Geometry helpers
// ---------------------------------------------------------------------------

Dyadic box_dist_sq(const Point2& p, const Box2& b) {
    Dyadic dx, dy;
    if (p.x < b.x.lo)
        dx = b.x.lo - p.x;
    else if (p.x > b.x.hi)
        dx = p.x - b.x.hi;
    if (p.y < b.y.lo)
        dy = b.y.lo - p.y;
    else if (p.y > b.y.hi)
        dy = p.y - b.y.hi;
    return dx * dx + dy * dy;
}

namespace {

mpq_class sq(const mpq_class& v) { return v * v; }

// Exact squared distance from (px,py) to the closed segment (a, b).
mpq_class segment_dist_sq(const mpq_class& px, const mpq_class& py,
                          const mpq_class& ax, const mpq_class& ay,
                          const mpq_class& bx, const mpq_class& by) {
    mpq_class vx = bx - ax, vy = by - ay;
    mpq_class wx = px - ax, wy = py - ay;
    mpq_class vv = vx * vx + vy * vy;
    if (vv == 0) return wx * wx + wy * wy; // degenerate: a point
    mpq_class wv = wx * vx + wy * vy;
    if (wv <= 0) return wx * wx + wy * wy;
    if (wv >= vv) return sq(px - bx) + sq(py - by);
    return (wx * wx + wy * wy) - wv * wv / vv;
}

Box2 hull_box(const std::vector<Point2>& pts) {
    DyInterval x(pts[0].x, pts[0].x), y(pts[0].y, pts[0].y);
    for (const Point2& p : pts) {
        x = DyInterval::hull(x, DyInterval(p.x, p.x));
        y = DyInterval::hull(y, DyInterval(p.y, p.y));
    }
    return {x, y};
}

} // namespace

// ---------------------------------------------------------------------------
// DistOracle
// ---------------------------------------------------------------------------

struct DistOracle::State {
    std::string desc;
    Box2 bound;
    Eval eval;
};

DistOracle DistOracle::make(std::string description, Box2 bound, Eval eval) {
    DistOracle d;
    d.state_ = std::make_shared<State>();
    d.state_->desc = std::move(description);
    d.state_->bound = bound;
    d.state_->eval = std::move(eval);
    return d;
}

Dyadic DistOracle::eval(const Point2& p, std::int64_t n) const {
    if (!state_) throw Error("eval on an empty distance oracle");
    if (n < 0) n = 0;
    return state_->eval(p, n);
}

const Box2& DistOracle::bound_box() const {
    if (!state_) throw Error("bound_box on an empty distance oracle");
    return state_->bound;
}

const std::string& DistOracle::description() const {
    if (!state_) throw Error("description on an empty distance oracle");
    return state_->desc;
}

// ---------------------------------------------------------------------------
// Primitive distance oracles
// ---------------------------------------------------------------------------

DistOracle point_distance(const Point2& p) {
    Box2 bound{DyInterval(p.x, p.x), DyInterval(p.y, p.y)};
    return DistOracle::make(
        "point(" + p.x.to_string() + "," + p.y.to_string() + ")", bound,
        [p](const Point2& q, std::int64_t n) {
            Dyadic d2 = (q.x - p.x) * (q.x - p.x) + (q.y - p.y) * (q.y - p.y);
            return sqrt_lower(d2.to_mpq(), n + 1);
        });
}

DistOracle segment_distance(const Point2& a, const Point2& b) {
    if (a.x == b.x && a.y == b.y) return point_distance(a);
    Box2 bound = hull_box({a, b});
    return DistOracle::make("segment", bound,
                            [a, b](const Point2& q, std::int64_t n) {
                                mpq_class d2 = segment_dist_sq(
                                    q.x.to_mpq(), q.y.to_mpq(), a.x.to_mpq(),
                                    a.y.to_mpq(), b.x.to_mpq(), b.y.to_mpq());
                                return sqrt_lower(d2, n + 1);
                            });
}

namespace {

// |sqrt(d2) - r| to within 2^-(t+1), from a certified bracket of the root.
Dyadic circle_gap(const Dyadic& d2, const Dyadic& r, std::int64_t t) {
    Dyadic lo = sqrt_lower(d2.to_mpq(), t + 1);
    Dyadic hi = sqrt_upper(d2.to_mpq(), t + 1);
    Dyadic a = max(max(lo - r, r - hi), Dyadic());
    return a; // a <= |sqrt(d2) - r| <= a + (hi - lo) < a + 2^-t
}

} // namespace

DistOracle circle_distance(const Point2& center, const Dyadic& radius) {
    if (radius < Dyadic()) throw DomainError("circle radius must be nonnegative");
    Box2 bound{DyInterval(center.x - radius, center.x + radius),
               DyInterval(center.y - radius, center.y + radius)};
    Point2 c = center;
    Dyadic r = radius;
    return DistOracle::make("circle", bound,
                            [c, r](const Point2& q, std::int64_t n) {
                                Dyadic d2 = (q.x - c.x) * (q.x - c.x) +
                                            (q.y - c.y) * (q.y - c.y);
                                return circle_gap(d2, r, n + 1);
                            });
}

DistOracle disk_distance(const Point2& center, const Dyadic& radius) {
    if (radius < Dyadic()) throw DomainError("disk radius must be nonnegative");
    Box2 bound{DyInterval(center.x - radius, center.x + radius),
               DyInterval(center.y - radius, center.y + radius)};
    Point2 c = center;
    Dyadic r = radius;
    return DistOracle::make(
        "disk", bound, [c, r](const Point2& q, std::int64_t n) {
            Dyadic d2 =
                (q.x - c.x) * (q.x - c.x) + (q.y - c.y) * (q.y - c.y);
            if (d2 <= r * r) return Dyadic(); // inside: distance exactly 0
            return max(sqrt_lower(d2.to_mpq(), n + 1) - r, Dyadic());
        });
}

DistOracle polygon_distance(std::vector<Point2> vertices) {
    if (vertices.empty()) throw DomainError("polygon needs at least one vertex");
    Box2 bound = hull_box(vertices);
    auto verts = std::make_shared<std::vector<Point2>>(std::move(vertices));
    return DistOracle::make(
        "polygon", bound, [verts](const Point2& q, std::int64_t n) {
            mpq_class px = q.x.to_mpq(), py = q.y.to_mpq();
            std::optional<mpq_class> best;
            const auto& v = *verts;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const Point2& a = v[i];
                const Point2& b = v[(i + 1) % v.size()];
                mpq_class d2 =
                    segment_dist_sq(px, py, a.x.to_mpq(), a.y.to_mpq(),
                                    b.x.to_mpq(), b.y.to_mpq());
                if (!best || d2 < *best) best = d2;
            }
            return sqrt_lower(*best, n + 1);
        });
}

DistOracle circle_distance_oracle(const RealOracle& cx, const RealOracle& cy,
                                  const RealOracle& radius) {
    // Rough bounding box from precision-3 realizations (true values are
    // within 1/8 of them).
    Dyadic c3x = cx.query(3), c3y = cy.query(3);
    Dyadic r3 = max(radius.query(3), Dyadic());
    Dyadic pad = r3 + Dyadic(3, -3);
    Box2 bound{DyInterval(c3x - pad, c3x + pad),
               DyInterval(c3y - pad, c3y + pad)};
    return DistOracle::make(
        "circle(oracle)", bound,
        [cx, cy, radius](const Point2& q, std::int64_t n) {
            // Realize the parameters at n+4: the circle distance moves by
            // at most (sqrt(2)+1)*2^-(n+4) < 2^-(n+2) under those
            // perturbations, and the certified gap adds 2^-(n+3).
            Dyadic ax = cx.query(n + 4), ay = cy.query(n + 4);
            Dyadic r = max(radius.query(n + 4), Dyadic());
            Dyadic d2 =
                (q.x - ax) * (q.x - ax) + (q.y - ay) * (q.y - ay);
            return circle_gap(d2, r, n + 3);
        });
}

// ---------------------------------------------------------------------------
// PixelDecision
// ---------------------------------------------------------------------------

const char* diag_name(Diag d) {
    switch (d) {
        case Diag::certified_out: return "certified_out";
        case Diag::certified_in: return "certified_in";
        default: return "undetermined";
    }
}

struct PixelDecision::State {
    std::string desc;
    Box2 bound;
    Classify fn;
};

PixelDecision PixelDecision::make(std::string description, Box2 bound,
                                  Classify fn) {
    PixelDecision p;
    p.state_ = std::make_shared<State>();
    p.state_->desc = std::move(description);
    p.state_->bound = bound;
    p.state_->fn = std::move(fn);
    return p;
}

std::pair<int, Diag> PixelDecision::classify(const Point2& d,
                                             std::int64_t n) const {
    if (!state_) throw Error("classify on an empty pixel decision");
    if (n < 0) n = 0;
    return state_->fn(d, n);
}

int PixelDecision::decide(const Point2& d, std::int64_t n) const {
    return classify(d, n).first;
}

Diag PixelDecision::diagnose(const Point2& d, std::int64_t n) const {
    return classify(d, n).second;
}

const Box2& PixelDecision::bound_box() const {
    if (!state_) throw Error("bound_box on an empty pixel decision");
    return state_->bound;
}

const std::string& PixelDecision::description() const {
    if (!state_) throw Error("description on an empty pixel decision");
    return state_->desc;
}

PixelDecision pixel_from_distance(const DistOracle& D) {
    DistOracle d = D;
    return PixelDecision::make(
        "pixels(" + D.description() + ")", D.bound_box(),
        [d](const Point2& p, std::int64_t n) {
            Dyadic a = d.eval(p, n + 2);
            int dec = (a < Dyadic(3, -(n + 1))) ? 1 : 0;
            Diag diag = Diag::undetermined;
            if (a < Dyadic(3, -(n + 2)))
                diag = Diag::certified_in;
            else if (a > Dyadic(9, -(n + 2)))
                diag = Diag::certified_out;
            return std::make_pair(dec, diag);
        });
}

// ---------------------------------------------------------------------------
// PixelSet
// ---------------------------------------------------------------------------

Point2 PixelSet::center_of(std::size_t i) const {
    const auto& c = centers.at(i);
    return {Dyadic(mpz_class(c.first), -(n + k)),
            Dyadic(mpz_class(c.second), -(n + k))};
}

PixelSet approximate_set(const PixelDecision& P, std::int64_t n,
                         std::int64_t k, const Box2& window) {
    if (n < 0 || k < 0) throw DomainError("approximate_set: n and k must be >= 0");
    PixelSet out;
    out.n = n;
    out.k = k;
    out.window = window;
    const std::int64_t s = n + k;
    const std::int64_t ix_lo = window.x.lo.scaled_ceil_i64(s);
    const std::int64_t ix_hi = window.x.hi.scaled_floor_i64(s);
    const std::int64_t iy_lo = window.y.lo.scaled_ceil_i64(s);
    const std::int64_t iy_hi = window.y.hi.scaled_floor_i64(s);
    for (std::int64_t iy = iy_hi; iy >= iy_lo; --iy) {
        Dyadic cy(mpz_class(iy), -s);
        for (std::int64_t ix = ix_lo; ix <= ix_hi; ++ix) {
            Point2 d{Dyadic(mpz_class(ix), -s), cy};
            auto [dec, diag] = P.classify(d, n);
            if (dec == 1) {
                out.centers.emplace_back(ix, iy);
                out.diags.push_back(diag);
                if (ix == ix_lo || ix == ix_hi || iy == iy_lo || iy == iy_hi)
                    out.boundary_warning = true;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nearest-center index (shared by hausdorff_pixels and distance_from_pixels)
// ---------------------------------------------------------------------------

namespace {

// Grid centers bucketed by row, for exact nearest-squared-distance queries.
struct RowIndex {
    std::int64_t scale = 0; // centers live on the 2^-scale grid
    std::map<std::int64_t, std::vector<std::int64_t>> rows; // iy -> sorted ix

    bool empty() const { return rows.empty(); }

    void insert(std::int64_t ix, std::int64_t iy) { rows[iy].push_back(ix); }

    void finish() {
        for (auto& [iy, v] : rows) std::sort(v.begin(), v.end());
    }

    // Exact min over centers c of |p - c|^2 (dyadic arithmetic throughout).
    Dyadic min_dist_sq(const Point2& p) const {
        if (rows.empty()) throw Error("nearest-center query on an empty set");
        const Dyadic h = Dyadic::pow2(-scale);
        std::optional<Dyadic> best;

        auto scan_row = [&](std::int64_t iy, const std::vector<std::int64_t>& v) {
            Dyadic dy = p.y - Dyadic(mpz_class(iy), -scale);
            Dyadic dy2 = dy * dy;
            if (best && dy2 >= *best) return false; // row fully pruned
            const std::int64_t jx = p.x.scaled_floor_i64(scale);
            auto it = std::lower_bound(v.begin(), v.end(), jx);
            auto consider = [&](std::int64_t ix) {
                Dyadic dx = p.x - Dyadic(mpz_class(ix), -scale);
                Dyadic cand = dx * dx + dy2;
                if (!best || cand < *best) best = cand;
            };
            // Walk right from the insertion point, then left, pruning once
            // dx alone exceeds the current best.
            for (auto r = it; r != v.end(); ++r) {
                Dyadic dx = Dyadic(mpz_class(*r), -scale) - p.x;
                if (best && dx > Dyadic() && dx * dx + dy2 >= *best) break;
                consider(*r);
            }
            for (auto l = it; l != v.begin();) {
                --l;
                Dyadic dx = p.x - Dyadic(mpz_class(*l), -scale);
                if (best && dx > Dyadic() && dx * dx + dy2 >= *best) break;
                consider(*l);
            }
            return true;
        };

        // Visit rows outward from p.y. Splitting at jy+1 makes the vertical
        // offset monotone within each direction (rows >= jy+1 lie strictly
        // above p.y, rows <= jy at or below), so a pruned row proves every
        // further row in that direction is pruned too.
        const std::int64_t jy = p.y.scaled_floor_i64(scale);
        auto up = rows.lower_bound(jy + 1);
        auto down = up;
        bool more_up = up != rows.end();
        bool more_down = down != rows.begin();
        while (more_up || more_down) {
            if (more_up) {
                if (!scan_row(up->first, up->second))
                    more_up = false;
                else {
                    ++up;
                    more_up = up != rows.end();
                }
            }
            if (more_down) {
                auto prev = std::prev(down);
                if (!scan_row(prev->first, prev->second))
                    more_down = false;
                else {
                    down = prev;
                    more_down = down != rows.begin();
                }
            }
        }
        return *best;
    }
};

RowIndex index_pixel_set(const PixelSet& ps) {
    RowIndex idx;
    idx.scale = ps.n + ps.k;
    for (const auto& [ix, iy] : ps.centers) idx.insert(ix, iy);
    idx.finish();
    return idx;
}

// Largest squared distance from any center of `from` to its nearest center
// in `to` (directed Hausdorff, squared, exact).
Dyadic directed_max_min_sq(const PixelSet& from, const RowIndex& to) {
    Dyadic worst;
    for (std::size_t i = 0; i < from.centers.size(); ++i) {
        Dyadic d2 = to.min_dist_sq(from.center_of(i));
        if (d2 > worst) worst = d2;
    }
    return worst;
}

} // namespace

DyInterval hausdorff_pixels(const PixelSet& P, const PixelSet& Q,
                            std::int64_t p) {
    if (P.centers.empty() || Q.centers.empty())
        throw Error("hausdorff_pixels: both pixel sets must be nonempty");
    RowIndex iq = index_pixel_set(Q);
    RowIndex ip = index_pixel_set(P);
    Dyadic h2 = max(directed_max_min_sq(P, iq), directed_max_min_sq(Q, ip));
    return DyInterval(sqrt_lower(h2.to_mpq(), p), sqrt_upper(h2.to_mpq(), p));
}

DistOracle distance_from_pixels(const PixelDecision& P, std::int64_t n_hi) {
    if (n_hi < 3)
        throw DomainError("distance_from_pixels: n_hi must be at least 3");
    struct Lazy {
        std::mutex mu;
        bool built = false;
        RowIndex idx;
    };
    auto lazy = std::make_shared<Lazy>();
    PixelDecision dec = P;
    // The window covers the set and every decide=1 center (those lie within
    // 2*2^-n_hi <= 1/4 of the set).
    Box2 window = P.bound_box().inflate(Dyadic(1, -2));
    return DistOracle::make(
        "distance(pixels(" + P.description() + "))", window,
        [lazy, dec, n_hi, window](const Point2& p, std::int64_t n) {
            if (n > n_hi - 3)
                throw BudgetError(
                    "distance_from_pixels: eval at precision " +
                    std::to_string(n) + " needs pixel resolution n_hi >= " +
                    std::to_string(n + 3) + ", have " + std::to_string(n_hi));
            {
                std::lock_guard<std::mutex> lock(lazy->mu);
                if (!lazy->built) {
                    RowIndex idx;
                    idx.scale = n_hi;
                    const std::int64_t ix_lo = window.x.lo.scaled_ceil_i64(n_hi);
                    const std::int64_t ix_hi = window.x.hi.scaled_floor_i64(n_hi);
                    const std::int64_t iy_lo = window.y.lo.scaled_ceil_i64(n_hi);
                    const std::int64_t iy_hi = window.y.hi.scaled_floor_i64(n_hi);
                    for (std::int64_t iy = iy_hi; iy >= iy_lo; --iy) {
                        Dyadic cy(mpz_class(iy), -n_hi);
                        for (std::int64_t ix = ix_lo; ix <= ix_hi; ++ix) {
                            Point2 d{Dyadic(mpz_class(ix), -n_hi), cy};
                            if (dec.decide(d, n_hi) == 1) idx.insert(ix, iy);
                        }
                    }
                    idx.finish();
                    lazy->idx = std::move(idx);
                    lazy->built = true;
                }
            }
            if (lazy->idx.empty())
                throw Error("distance_from_pixels: no pixel was kept (empty set?)");
            Dyadic d2 = lazy->idx.min_dist_sq(p);
            return sqrt_lower(d2.to_mpq(), n + 1);
        });
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void write_pixel_csv(std::ostream& out, std::int64_t n, std::int64_t k,
                     const Box2& window, const std::vector<PixelRow>& rows) {
    out << "# n=" << n << " k=" << k << " window=[" << window.x.lo.to_string()
        << "," << window.x.hi.to_string() << "]x[" << window.y.lo.to_string()
        << "," << window.y.hi.to_string() << "]\n";
    out << "ix,iy,decision,diagnosis\n";
    for (const PixelRow& r : rows)
        out << r.ix << "," << r.iy << "," << r.decision << ","
            << diag_name(r.diag) << "\n";
}

void write_pixel_set_csv(std::ostream& out, const PixelSet& ps) {
    std::vector<PixelRow> rows;
    rows.reserve(ps.centers.size());
    for (std::size_t i = 0; i < ps.centers.size(); ++i)
        rows.push_back(
            {ps.centers[i].first, ps.centers[i].second, 1, ps.diags[i]});
    std::sort(rows.begin(), rows.end(), [](const PixelRow& a, const PixelRow& b) {
        return a.iy != b.iy ? a.iy > b.iy : a.ix < b.ix;
    });
    write_pixel_csv(out, ps.n, ps.k, ps.window, rows);
}

} // namespace bitreal
