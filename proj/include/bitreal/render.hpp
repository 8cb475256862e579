#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "bitreal/dyadic.hpp"
#include "bitreal/fractal.hpp"
#include "bitreal/set_comp.hpp"

namespace bitreal {

// Options consumed by the set registry. Only the fields relevant to the
// chosen set id are read; everything else keeps its default.
struct SetOptions {
    // mandelbrot / julia iteration tuning (see EscapeParams).
    EscapeParams escape;
    // julia parameter c, exact dyadic components.
    Dyadic c_re, c_im;
    // julia: render the filled set K_c instead of the boundary J_c.
    bool filled = false;
    // disk / circle: radius and center. radius_set = false picks the
    // per-set default (disk: 2, circle: 1).
    Dyadic radius;
    bool radius_set = false;
    Dyadic cx, cy;
    // segment endpoints.
    Point2 seg_a{Dyadic(-1), Dyadic()};
    Point2 seg_b{Dyadic(1), Dyadic()};
    // step: clip window for the two-piece step graph. render() overwrites
    // this with the actual render window so the clipped set and the image
    // agree; the default only matters for direct make_set callers.
    Box2 step_clip{{Dyadic(-2), Dyadic(2)}, {Dyadic(-2), Dyadic(2)}};
};

// A constructed decision family plus the shared subdivision tally wired
// into it (null for sets that never subdivide).
struct BuiltSet {
    PixelDecision decision;
    std::shared_ptr<std::atomic<std::int64_t>> subdivisions;
};

// Set registry. Valid ids: koch, mandelbrot, julia, disk, circle, segment,
// step, graph:identity, graph:zero, graph:g, graph:cbrt_of_g. Unknown ids
// raise DomainError naming the valid choices.
BuiltSet make_set(const std::string& set_id, const SetOptions& opt);

struct RenderJob {
    std::string set_id;
    SetOptions options;
    // Window [center - half_width, center + half_width]^2 sampled on the
    // grid (2^-(n+k) Z)^2; both edges of both axes must land on the grid.
    Dyadic center_x, center_y;
    Dyadic half_width = Dyadic(1);
    std::int64_t n = 4; // decision precision
    std::int64_t k = 0; // extra grid refinement
};

struct RenderResult {
    std::int64_t n = 0, k = 0;
    std::int64_t width = 0, height = 0; // grid points per axis
    Box2 window;
    // Scan order: iy descending, ix ascending (top image row first).
    std::vector<PixelRow> rows;
    std::int64_t count_out = 0, count_undet = 0, count_in = 0;
    std::int64_t count_decide_one = 0;
    std::uint64_t bit_ops = 0;     // summed over worker threads
    std::int64_t subdivisions = 0; // quadrant splits while certifying
    double wall_ms = 0.0;
};

// Validate the job (grid alignment of the window edges at pitch 2^-(n+k),
// n, k >= 0, n + k <= 40, pixel-count cap), then classify every grid point
// in the window. Rows are assembled in a fixed scan order regardless of
// thread count (threads = 0 picks the hardware concurrency), so the pixel
// payload of a fixed job is deterministic; bit_ops and wall_ms are
// measurements, not part of that guarantee.
RenderResult render(const RenderJob& job, unsigned threads = 0);

// Grayscale map: certified_out = 255, undetermined = 0, certified_in = 64.
// P2 (ASCII, one image row per line) by default, P5 (binary) on request.
// The top image row is the largest iy.
void write_pgm(std::ostream& out, const RenderResult& r, bool binary = false);

// Pixel CSV in the shared serialization format (same bytes as
// write_pixel_csv over the result rows).
void write_csv(std::ostream& out, const RenderResult& r);

// Plain-text key=value statistics in a fixed key order. wall_ms is the only
// machine-dependent line and sits last.
void write_stats(std::ostream& out, const RenderJob& job,
                 const RenderResult& r);

// Render once and write <prefix>.pgm, <prefix>.csv, <prefix>.stats.
RenderResult render_to_files(const RenderJob& job, const std::string& prefix,
                             bool binary_pgm = false, unsigned threads = 0);

} // namespace bitreal
