#include "bitreal/render.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bitreal/cost.hpp"
#include "bitreal/error.hpp"
#include "bitreal/func_machine.hpp"
#include "bitreal/oracle.hpp"
#include "bitreal/roots.hpp"

namespace bitreal {

namespace {

// Distance oracle for the curve x^3 + y^3 = 1 inside the unit square. The
// curve is symmetric about the diagonal y = x, so it is covered by two
// copies of one restricted graph: h(x) = cbrt(1 - x^3) on [0, 13/16],
// mirrored across the diagonal. The views overlap (h(13/16) ~ 0.774 <
// 13/16), so their union is the whole curve, and the distance to the union
// is the min of the two view distances.
//
// Machine contract for h: precision_map(n) = n + 3; the kernel clamps the
// input to [0, 27/32] (a projection onto an interval containing the domain
// never moves the input farther from the true point), where |h'| <= 1.4,
// computes 1 - q^3 exactly (it stays within [13085/32768, 1], comfortably
// inside the cube-root routine's range), and takes the root to 2^-(t+2).
// Total error: 1.4 * 2^-(t+3) + 2^-(t+2) < 2^-t.
DistOracle cbrt_curve_distance() {
    DyInterval dom(Dyadic(), Dyadic(13, -4));
    const Dyadic clamp_hi(27, -5);
    FuncMachine h = FuncMachine::make(
        "cbrt(1 - x^3) restricted to [0, 13/16]", dom,
        [](std::int64_t n) { return n + 3; },
        [clamp_hi](const Dyadic& q, std::int64_t t) {
            Dyadic c = clamp(q, Dyadic(), clamp_hi);
            Dyadic u = Dyadic(1) - c * c * c;
            return newton_kth_root(u, 3, t + 2);
        });
    DistOracle view = graph_distance(h);
    Box2 bound{{Dyadic(), Dyadic(1)}, {Dyadic(), Dyadic(1)}};
    return DistOracle::make(
        "curve x^3 + y^3 = 1 in the unit square (two mirrored graph views)",
        bound, [view](const Point2& p, std::int64_t n) {
            Dyadic a = view.eval(p, n + 1);
            Dyadic b = view.eval(Point2{p.y, p.x}, n + 1);
            return min(a, b);
        });
}

DyInterval unit_sym() { return DyInterval(Dyadic(-1), Dyadic(1)); }

Dyadic shape_radius(const SetOptions& opt, long fallback) {
    Dyadic r = opt.radius_set ? opt.radius : Dyadic(fallback);
    if (r.sign() <= 0)
        throw DomainError("set radius must be positive, got " +
                          r.to_decimal_string());
    return r;
}

} // namespace

BuiltSet make_set(const std::string& set_id, const SetOptions& opt) {
    if (set_id == "koch") {
        return {pixel_from_distance(koch_distance()), nullptr};
    }
    if (set_id == "mandelbrot") {
        EscapeParams ps = opt.escape;
        auto tally = std::make_shared<std::atomic<std::int64_t>>(0);
        ps.subdiv_counter = tally;
        return {mandel_pixel(ps), tally};
    }
    if (set_id == "julia") {
        EscapeParams ps = opt.escape;
        auto tally = std::make_shared<std::atomic<std::int64_t>>(0);
        ps.subdiv_counter = tally;
        return {julia_pixel(oracle_from_dyadic(opt.c_re),
                            oracle_from_dyadic(opt.c_im), opt.filled, ps),
                tally};
    }
    if (set_id == "disk") {
        Point2 c{opt.cx, opt.cy};
        return {pixel_from_distance(disk_distance(c, shape_radius(opt, 2))),
                nullptr};
    }
    if (set_id == "circle") {
        Point2 c{opt.cx, opt.cy};
        return {pixel_from_distance(circle_distance(c, shape_radius(opt, 1))),
                nullptr};
    }
    if (set_id == "segment") {
        return {pixel_from_distance(segment_distance(opt.seg_a, opt.seg_b)),
                nullptr};
    }
    if (set_id == "step") {
        return {pixel_from_distance(step_graph(opt.step_clip)), nullptr};
    }
    if (set_id == "graph:identity") {
        return {pixel_from_distance(graph_distance(identity_machine(unit_sym()))),
                nullptr};
    }
    if (set_id == "graph:zero") {
        return {pixel_from_distance(
                    graph_distance(const_machine(Dyadic(), unit_sym()))),
                nullptr};
    }
    if (set_id == "graph:g") {
        return {pixel_from_distance(graph_distance(g_machine())), nullptr};
    }
    if (set_id == "graph:cbrt_of_g") {
        return {pixel_from_distance(cbrt_curve_distance()), nullptr};
    }
    throw DomainError(
        "unknown set id \"" + set_id +
        "\"; valid: koch, mandelbrot, julia, disk, circle, segment, step, "
        "graph:identity, graph:zero, graph:g, graph:cbrt_of_g");
}

RenderResult render(const RenderJob& job, unsigned threads) {
    if (job.n < 0 || job.k < 0)
        throw DomainError("render: n and k must be nonnegative");
    const std::int64_t s = job.n + job.k;
    if (s > 40)
        throw DomainError("render: n + k = " + std::to_string(s) +
                          " exceeds the grid exponent budget of 40");
    if (job.half_width.sign() <= 0)
        throw DomainError("render: half-width must be positive");

    const Dyadic xlo = job.center_x - job.half_width;
    const Dyadic xhi = job.center_x + job.half_width;
    const Dyadic ylo = job.center_y - job.half_width;
    const Dyadic yhi = job.center_y + job.half_width;
    for (const Dyadic* v : {&xlo, &xhi, &ylo, &yhi}) {
        Dyadic t = v->mul_pow2(s);
        if (t != t.round_floor(0))
            throw DomainError("render: window edge " + v->to_string() +
                              " is not aligned to the 2^-" +
                              std::to_string(s) + " grid");
    }

    mpz_class span_x = xhi.scaled_floor(s) - xlo.scaled_floor(s) + 1;
    mpz_class span_y = yhi.scaled_floor(s) - ylo.scaled_floor(s) + 1;
    mpz_class count = span_x * span_y;
    const std::int64_t pixel_cap = std::int64_t(1) << 24;
    if (count > pixel_cap)
        throw DomainError("render: window holds " + count.get_str() +
                          " grid points, beyond the cap of " +
                          std::to_string(pixel_cap));

    const std::int64_t ix_lo = xlo.scaled_floor_i64(s);
    const std::int64_t ix_hi = xhi.scaled_floor_i64(s);
    const std::int64_t iy_lo = ylo.scaled_floor_i64(s);
    const std::int64_t iy_hi = yhi.scaled_floor_i64(s);
    const std::int64_t W = ix_hi - ix_lo + 1;
    const std::int64_t H = iy_hi - iy_lo + 1;

    SetOptions opt = job.options;
    Box2 window{{xlo, xhi}, {ylo, yhi}};
    if (job.set_id == "step") opt.step_clip = window;
    BuiltSet bs = make_set(job.set_id, opt);

    RenderResult r;
    r.n = job.n;
    r.k = job.k;
    r.width = W;
    r.height = H;
    r.window = window;
    r.rows.resize(static_cast<std::size_t>(W * H));

    unsigned T =
        threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    if (static_cast<std::int64_t>(T) > H) T = static_cast<unsigned>(H);

    const auto t0 = std::chrono::steady_clock::now();
    std::atomic<std::uint64_t> ops_total{0};
    std::mutex err_mu;
    std::exception_ptr first_err;

    // Rows are statically strided across workers and written into disjoint
    // slots of the preallocated buffer, so the assembled payload does not
    // depend on the thread count or scheduling. The cost meter is
    // thread-local; each worker contributes its own delta.
    auto worker = [&](unsigned w) {
        cost::Meter meter;
        try {
            for (std::int64_t row = w; row < H; row += T) {
                const std::int64_t iy = iy_hi - row;
                const Dyadic y(iy, -s);
                const std::size_t base =
                    static_cast<std::size_t>(row) * static_cast<std::size_t>(W);
                for (std::int64_t col = 0; col < W; ++col) {
                    const std::int64_t ix = ix_lo + col;
                    Point2 d{Dyadic(ix, -s), y};
                    std::pair<int, Diag> v = bs.decision.classify(d, job.n);
                    r.rows[base + static_cast<std::size_t>(col)] =
                        PixelRow{ix, iy, v.first, v.second};
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!first_err) first_err = std::current_exception();
        }
        ops_total.fetch_add(meter.elapsed(), std::memory_order_relaxed);
    };

    if (T <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(T);
        for (unsigned w = 0; w < T; ++w) pool.emplace_back(worker, w);
        for (std::thread& th : pool) th.join();
    }
    if (first_err) std::rethrow_exception(first_err);

    for (const PixelRow& pr : r.rows) {
        switch (pr.diag) {
            case Diag::certified_out: ++r.count_out; break;
            case Diag::undetermined: ++r.count_undet; break;
            case Diag::certified_in: ++r.count_in; break;
        }
        if (pr.decision == 1) ++r.count_decide_one;
    }
    r.bit_ops = ops_total.load();
    r.subdivisions = bs.subdivisions ? bs.subdivisions->load() : 0;
    r.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    return r;
}

namespace {

int diag_gray(Diag g) {
    switch (g) {
        case Diag::certified_out: return 255;
        case Diag::certified_in: return 64;
        case Diag::undetermined: break;
    }
    return 0;
}

} // namespace

void write_pgm(std::ostream& out, const RenderResult& r, bool binary) {
    out << (binary ? "P5" : "P2") << "\n"
        << r.width << " " << r.height << "\n255\n";
    if (binary) {
        std::string buf;
        buf.reserve(r.rows.size());
        for (const PixelRow& pr : r.rows)
            buf.push_back(static_cast<char>(
                static_cast<unsigned char>(diag_gray(pr.diag))));
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        return;
    }
    std::size_t i = 0;
    for (std::int64_t row = 0; row < r.height; ++row) {
        for (std::int64_t col = 0; col < r.width; ++col, ++i) {
            if (col) out << ' ';
            out << diag_gray(r.rows[i].diag);
        }
        out << "\n";
    }
}

void write_csv(std::ostream& out, const RenderResult& r) {
    write_pixel_csv(out, r.n, r.k, r.window, r.rows);
}

void write_stats(std::ostream& out, const RenderJob& job,
                 const RenderResult& r) {
    const std::int64_t pixels = r.width * r.height;
    out << "set=" << job.set_id << "\n";
    out << "n=" << r.n << "\n";
    out << "k=" << r.k << "\n";
    out << "window=[" << r.window.x.lo.to_string() << ","
        << r.window.x.hi.to_string() << "]x[" << r.window.y.lo.to_string()
        << "," << r.window.y.hi.to_string() << "]\n";
    out << "width=" << r.width << "\n";
    out << "height=" << r.height << "\n";
    out << "pixels=" << pixels << "\n";
    out << "certified_out=" << r.count_out << "\n";
    out << "undetermined=" << r.count_undet << "\n";
    out << "certified_in=" << r.count_in << "\n";
    out << "decide_one=" << r.count_decide_one << "\n";
    out << "subdivisions=" << r.subdivisions << "\n";
    out << "bit_ops=" << r.bit_ops << "\n";
    const std::uint64_t milli =
        pixels > 0 ? (r.bit_ops * 1000u) / static_cast<std::uint64_t>(pixels)
                   : 0;
    char frac[8];
    std::snprintf(frac, sizeof frac, "%03llu",
                  static_cast<unsigned long long>(milli % 1000));
    out << "bit_ops_per_pixel=" << milli / 1000 << "." << frac << "\n";
    char wall[64];
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
    out << "wall_ms=" << wall << "\n";
}

RenderResult render_to_files(const RenderJob& job, const std::string& prefix,
                             bool binary_pgm, unsigned threads) {
    RenderResult r = render(job, threads);
    {
        std::ofstream f(prefix + ".pgm",
                        binary_pgm ? std::ios::out | std::ios::binary
                                   : std::ios::out);
        if (!f) throw Error("cannot open " + prefix + ".pgm for writing");
        write_pgm(f, r, binary_pgm);
    }
    {
        std::ofstream f(prefix + ".csv");
        if (!f) throw Error("cannot open " + prefix + ".csv for writing");
        write_csv(f, r);
    }
    {
        std::ofstream f(prefix + ".stats");
        if (!f) throw Error("cannot open " + prefix + ".stats for writing");
        write_stats(f, job, r);
    }
    return r;
}

} // namespace bitreal
