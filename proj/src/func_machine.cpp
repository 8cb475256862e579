#include "bitreal/func_machine.hpp"

#include <algorithm>
#include <queue>
#include <tuple>
#include <vector>

#include "bitreal/error.hpp"
#include "bitreal/roots.hpp"

namespace bitreal {

// ---------------------------------------------------------------------------
// FuncMachine
// ---------------------------------------------------------------------------

struct FuncMachine::State {
    std::string desc;
    DyInterval domain{Dyadic(), Dyadic()};
    PrecisionMap pm;
    Kernel kernel;
};

FuncMachine FuncMachine::make(std::string description, DyInterval domain,
                              PrecisionMap pm, Kernel kernel) {
    FuncMachine m;
    m.state_ = std::make_shared<State>();
    m.state_->desc = std::move(description);
    m.state_->domain = domain;
    m.state_->pm = std::move(pm);
    m.state_->kernel = std::move(kernel);
    return m;
}

std::int64_t FuncMachine::precision_map(std::int64_t n) const {
    if (!state_) throw Error("precision_map on an empty machine");
    return state_->pm(n < 0 ? 0 : n);
}

Dyadic FuncMachine::kernel(const Dyadic& q, std::int64_t n) const {
    if (!state_) throw Error("kernel on an empty machine");
    return state_->kernel(q, n < 0 ? 0 : n);
}

const DyInterval& FuncMachine::domain() const {
    if (!state_) throw Error("domain on an empty machine");
    return state_->domain;
}

const std::string& FuncMachine::description() const {
    if (!state_) throw Error("description on an empty machine");
    return state_->desc;
}

// ---------------------------------------------------------------------------
// apply / compose
// ---------------------------------------------------------------------------

Dyadic apply(const FuncMachine& M, const RealOracle& phi, std::int64_t n) {
    if (n < 0) n = 0;
    Dyadic probe = phi.query(5);
    if (!M.domain().inflate(Dyadic::pow2(-5)).contains(probe))
        throw DomainError("apply: oracle \"" + phi.description() +
                          "\" answered " + probe.to_string() +
                          " at precision 5, outside the domain of " +
                          M.description());
    return M.kernel(phi.query(M.precision_map(n)), n);
}

FuncMachine compose(const FuncMachine& Mf, const FuncMachine& Mg) {
    // Range certificate: sweep Mg over its domain at output precision 3.
    // Each sample value is within 2^-3 of g on a neighborhood covering the
    // sweep pitch, so if g's range is inside Mf.domain every sample lands in
    // the 2^-3 inflation (no false rejection), while a range escaping by
    // more than the slack produces a sample outside it.
    const DyInterval gdom = Mg.domain();
    const DyInterval target = Mf.domain().inflate(Dyadic(1, -3));
    const std::int64_t pm3 = Mg.precision_map(3);
    const Dyadic pitch = Dyadic::pow2(-pm3);
    Dyadic q = gdom.lo;
    while (true) {
        Dyadic v = Mg.kernel(q, 3);
        if (!target.contains(v))
            throw DomainError("compose: range check failed, " +
                              Mg.description() + " reaches " + v.to_string() +
                              " (around input " + q.to_string() +
                              "), outside the domain of " + Mf.description());
        if (q == gdom.hi) break;
        q = min(q + pitch, gdom.hi);
    }

    FuncMachine f = Mf, g = Mg;
    return FuncMachine::make(
        "(" + Mf.description() + " o " + Mg.description() + ")", gdom,
        [f, g](std::int64_t n) {
            return g.precision_map(f.precision_map(n) + 1);
        },
        [f, g](const Dyadic& q_, std::int64_t n) {
            return f.kernel(g.kernel(q_, f.precision_map(n) + 1), n);
        });
}

// ---------------------------------------------------------------------------
// Stock machines
// ---------------------------------------------------------------------------

FuncMachine identity_machine(const DyInterval& domain) {
    return FuncMachine::make(
        "identity", domain, [](std::int64_t n) { return n + 1; },
        [](const Dyadic& q, std::int64_t n) { return q.round_to(n + 1); });
}

FuncMachine const_machine(const Dyadic& v, const DyInterval& domain) {
    return FuncMachine::make(
        "const(" + v.to_string() + ")", domain,
        [](std::int64_t n) { return n + 1; },
        [v](const Dyadic&, std::int64_t) { return v; });
}

FuncMachine g_machine() {
    // 1 - x^3 on [0,1]. Inputs are clamped to the 2^-4-inflated domain so
    // slightly-out approximations are tolerated; slope there is at most
    // 3*(17/16)^2 < 3.4, so the n+2 input budget plus the final rounding
    // stays under 2^-n.
    DyInterval dom(Dyadic(), Dyadic(1));
    DyInterval clampw(Dyadic(-1, -4), Dyadic(17, -4));
    return FuncMachine::make(
        "g(x)=1-x^3", dom, [](std::int64_t n) { return n + 2; },
        [clampw](const Dyadic& q, std::int64_t n) {
            Dyadic qc = clamp(q, clampw.lo, clampw.hi);
            Dyadic val = Dyadic(1) - qc * qc * qc;
            return val.round_to(n + 2);
        });
}

namespace {

FuncMachine root_machine(int k, const char* name) {
    DyInterval dom(Dyadic(), Dyadic(1));
    Dyadic hi17(17, -4);
    return FuncMachine::make(
        name, dom, [k](std::int64_t n) { return k * (n + 2); },
        [k, hi17](const Dyadic& q, std::int64_t n) {
            // Holder: |a^(1/k) - b^(1/k)| <= |a-b|^(1/k), so an input within
            // 2^-k(n+2) pins the root within 2^-(n+2); the certified Newton
            // root adds less than 2^-(n+3).
            Dyadic qc = clamp(q, Dyadic(), hi17);
            return newton_kth_root(qc, k, n + 2);
        });
}

} // namespace

FuncMachine cuberoot_machine() { return root_machine(3, "cbrt"); }
FuncMachine sqrt_machine() { return root_machine(2, "sqrt"); }

FuncMachine exp_machine() {
    DyInterval dom(Dyadic(-1), Dyadic(1));
    Dyadic hi17(17, -4);
    return FuncMachine::make(
        "exp", dom, [](std::int64_t n) { return n + 4; },
        [hi17](const Dyadic& q, std::int64_t n) {
            Dyadic qc = clamp(q, -hi17, hi17);
            return exp_taylor_eval(qc, n + 2);
        });
}

FuncMachine expm1_machine() {
    DyInterval dom(Dyadic(-1), Dyadic(1, -1));
    Dyadic lo(-17, -4), hi(9, -4);
    return FuncMachine::make(
        "expm1", dom, [](std::int64_t n) { return n + 3; },
        [lo, hi](const Dyadic& q, std::int64_t n) {
            // Slope of e^x on the clamp window is under e^(9/16) < 1.8, so
            // the n+3 input budget contributes < 0.23*2^-n; the Taylor sum
            // adds 2^-(n+2) and the rounding 2^-(n+3).
            Dyadic qc = clamp(q, lo, hi);
            Dyadic val = exp_taylor_eval(qc, n + 2) - Dyadic(1);
            return val.round_to(n + 2);
        });
}

// ---------------------------------------------------------------------------
// Graph distance
// ---------------------------------------------------------------------------

namespace {

// Largest t <= t_cap whose precision requirement fits the cell: we need
// |x - mid| <= w/2 < 2^-pm(t) for every x in the cell, guaranteed by
// pm(t) <= cap_j where 2^-cap_j >= w. Returns -1 when even t = 0 does not
// fit (cell still too wide).
std::int64_t pick_t(const FuncMachine& M, const Dyadic& w,
                    std::int64_t t_cap) {
    if (!(w > Dyadic())) return t_cap; // degenerate cell: midpoint is exact
    std::int64_t cap_j = -ceil_log2(w);
    if (M.precision_map(0) > cap_j) return -1;
    std::int64_t t = 0;
    while (t < t_cap && M.precision_map(t + 1) <= cap_j) ++t;
    return t;
}

struct GraphCell {
    Dyadic a, b;     // x-extent
    Dyadic lower;    // certified lower bound on dist(p, graph over [a,b])
    bool operator<(const GraphCell& o) const {
        // priority_queue keeps the largest on top; invert so the smallest
        // lower bound is explored first, with exact tie-breaking on the
        // interval for determinism.
        int c = lower.cmp(o.lower);
        if (c != 0) return c > 0;
        c = a.cmp(o.a);
        if (c != 0) return c > 0;
        return b.cmp(o.b) > 0;
    }
};

} // namespace

DistOracle graph_distance(const FuncMachine& M, std::size_t max_cells) {
    // Rough vertical extent from a precision-2 sweep: every graph value is
    // within 2^-2 of some sample.
    const DyInterval dom = M.domain();
    DyInterval yr{Dyadic(), Dyadic()};
    {
        const Dyadic pitch = Dyadic::pow2(-M.precision_map(2));
        Dyadic q = dom.lo;
        bool first = true;
        while (true) {
            Dyadic v = M.kernel(q, 2);
            yr = first ? DyInterval(v, v) : DyInterval::hull(yr, DyInterval(v, v));
            first = false;
            if (q == dom.hi) break;
            q = min(q + pitch, dom.hi);
        }
        yr = yr.inflate(Dyadic(1, -2));
    }
    Box2 bound{dom, yr};

    FuncMachine m = M;
    return DistOracle::make(
        "graph(" + M.description() + ")", bound,
        [m, dom, yr, max_cells](const Point2& p, std::int64_t n) {
            const std::int64_t t_cap = n + 3;
            const Dyadic inf_upper = Dyadic(1, 62);
            Dyadic best_u = inf_upper;
            std::priority_queue<GraphCell> heap;
            std::size_t cells = 0;

            auto push_cell = [&](const Dyadic& a, const Dyadic& b) {
                if (++cells > max_cells)
                    throw BudgetError(
                        "graph_distance: tolerance unreachable within "
                        "configured sample budget (" +
                        std::to_string(max_cells) + " cells)");
                Dyadic w = b - a;
                Dyadic mid = (a + b).mul_pow2(-1);
                // Upper bound from an exact-input evaluation: mid itself is a
                // domain point, so it is a legal query at any precision and
                // (mid, kernel(mid, n+3)) is within 2^-(n+3) of a graph point.
                {
                    Dyadic v = m.kernel(mid, n + 3);
                    Dyadic pd2 = (p.x - mid) * (p.x - mid) +
                                 (p.y - v) * (p.y - v);
                    Dyadic u = sqrt_upper(pd2.to_mpq(), n + 4) +
                               Dyadic::pow2(-(n + 3));
                    if (u < best_u) best_u = u;
                }
                std::int64_t t = pick_t(m, w, t_cap);
                DyInterval band = yr;
                if (t >= 0) {
                    Dyadic v = m.kernel(mid, t);
                    Dyadic r = Dyadic::pow2(-t);
                    band = DyInterval(v - r, v + r);
                }
                Dyadic l2 = box_dist_sq(p, Box2{DyInterval(a, b), band});
                Dyadic lo = sqrt_lower(l2.to_mpq(), n + 4);
                if (lo < best_u) heap.push(GraphCell{a, b, lo});
            };

            push_cell(dom.lo, dom.hi);
            const Dyadic tol = Dyadic::pow2(-(n + 1));
            while (!heap.empty()) {
                GraphCell c = heap.top();
                if (best_u - c.lower <= tol) {
                    Dyadic mid = (c.lower + best_u).mul_pow2(-1);
                    return mid.round_to(n + 2);
                }
                heap.pop();
                Dyadic mid = (c.a + c.b).mul_pow2(-1);
                push_cell(c.a, mid);
                push_cell(mid, c.b);
            }
            // Heap exhausted: every cell was pruned against best_u, so
            // best_u is within tolerance of the true distance.
            if (best_u == inf_upper)
                throw BudgetError("graph_distance: no certified upper bound");
            return best_u.round_to(n + 2);
        });
}

DistOracle step_graph(const Box2& clip) {
    // Clipped pieces (closures; closing the open end at x=0 does not change
    // any distance value).
    std::vector<std::pair<Point2, Point2>> segs;
    if (clip.x.lo < Dyadic() && clip.y.contains(Dyadic())) {
        Dyadic right = min(Dyadic(), clip.x.hi);
        segs.push_back({Point2{clip.x.lo, Dyadic()}, Point2{right, Dyadic()}});
    }
    if (clip.x.hi >= Dyadic() && clip.y.contains(Dyadic(1))) {
        Dyadic left = max(Dyadic(), clip.x.lo);
        segs.push_back({Point2{left, Dyadic(1)}, Point2{clip.x.hi, Dyadic(1)}});
    }
    if (segs.empty())
        throw DomainError("step_graph: clip window misses both rays");
    return DistOracle::make(
        "step-graph", clip, [segs](const Point2& p, std::int64_t n) {
            mpq_class px = p.x.to_mpq(), py = p.y.to_mpq();
            bool have = false;
            mpq_class best;
            for (const auto& s : segs) {
                mpq_class vx = s.first.x.to_mpq(), vy = s.first.y.to_mpq();
                mpq_class wx = s.second.x.to_mpq(), wy = s.second.y.to_mpq();
                mpq_class d2 = [&]() -> mpq_class {
                    mpq_class ex = wx - vx, ey = wy - vy;
                    mpq_class fx = px - vx, fy = py - vy;
                    mpq_class ee = ex * ex + ey * ey;
                    if (ee == 0) return fx * fx + fy * fy;
                    mpq_class fe = fx * ex + fy * ey;
                    if (fe <= 0) return fx * fx + fy * fy;
                    if (fe >= ee)
                        return (px - wx) * (px - wx) + (py - wy) * (py - wy);
                    return (fx * fx + fy * fy) - fe * fe / ee;
                }();
                if (!have || d2 < best) {
                    best = d2;
                    have = true;
                }
            }
            return sqrt_lower(best, n + 1);
        });
}

} // namespace bitreal
