#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bitreal/dyadic.hpp"
#include "bitreal/interval.hpp"
#include "bitreal/oracle.hpp"

namespace bitreal {

// ---------------------------------------------------------------------------
// Geometry carriers
// ---------------------------------------------------------------------------

struct Point2 {
    Dyadic x, y;
};

struct Box2 {
    DyInterval x, y;

    bool contains(const Point2& p) const {
        return x.contains(p.x) && y.contains(p.y);
    }
    Box2 inflate(const Dyadic& r) const { return {x.inflate(r), y.inflate(r)}; }
};

// Exact squared Euclidean distance from p to the closed box (0 inside).
Dyadic box_dist_sq(const Point2& p, const Box2& b);

// ---------------------------------------------------------------------------
// Distance oracles
// ---------------------------------------------------------------------------

// A set S presented through its distance function: eval(p, n) returns a
// dyadic a with |a - d_S(p)| < 2^-n where d_S(p) = inf{|p - y| : y in S}.
// d_S is automatically 1-Lipschitz, so evaluations at nearby points can
// differ by at most the point distance plus both error bands. bound_box is
// a dyadic box containing S. Evaluations are pure and deterministic.
class DistOracle {
  public:
    using Eval = std::function<Dyadic(const Point2&, std::int64_t)>;

    DistOracle() = default;
    static DistOracle make(std::string description, Box2 bound, Eval eval);

    Dyadic eval(const Point2& p, std::int64_t n) const;
    const Box2& bound_box() const;
    const std::string& description() const;
    bool valid() const { return static_cast<bool>(state_); }

  private:
    struct State;
    std::shared_ptr<State> state_;
};

// Exact-geometry primitive sets. All evaluate an exact rational squared
// distance and take one certified square root, so the answer at precision n
// is within 2^-(n+2) of the true distance (well inside the 2^-n contract).
DistOracle point_distance(const Point2& p);
// Zero-length segments degrade to the point.
DistOracle segment_distance(const Point2& a, const Point2& b);
DistOracle circle_distance(const Point2& center, const Dyadic& radius);
DistOracle disk_distance(const Point2& center, const Dyadic& radius);
// Closed polygonal curve through the vertex list (last edge closes the loop).
DistOracle polygon_distance(std::vector<Point2> vertices);
// Circle whose center and radius are themselves only known through oracles:
// parameters are realized at precision n+4 per evaluation.
DistOracle circle_distance_oracle(const RealOracle& cx, const RealOracle& cy,
                                  const RealOracle& radius);

// ---------------------------------------------------------------------------
// Pixel decisions
// ---------------------------------------------------------------------------

enum class Diag { certified_out, undetermined, certified_in };

const char* diag_name(Diag d);

// The pixel decision family: decide(d, n) for grid points d must output 1
// whenever the closed ball B(d, 2^-n) meets S and 0 whenever B(d, 2*2^-n)
// misses S; in between either answer is allowed but must be deterministic.
// diagnose refines the answer: certified_in means B(d, 2^-n) provably meets
// S, certified_out means B(d, 2*2^-n) provably misses it, undetermined
// makes no claim. certified_in implies decide=1; certified_out implies 0.
class PixelDecision {
  public:
    using Classify =
        std::function<std::pair<int, Diag>(const Point2&, std::int64_t)>;

    PixelDecision() = default;
    static PixelDecision make(std::string description, Box2 bound,
                              Classify fn);

    int decide(const Point2& d, std::int64_t n) const;
    Diag diagnose(const Point2& d, std::int64_t n) const;
    std::pair<int, Diag> classify(const Point2& d, std::int64_t n) const;
    const Box2& bound_box() const;
    const std::string& description() const;
    bool valid() const { return static_cast<bool>(state_); }

  private:
    struct State;
    std::shared_ptr<State> state_;
};

// Decision family from a distance oracle: a = D.eval(d, n+2), output 1 iff
// a < 3*2^-(n+1). If B(d, 2^-n) meets S then d_S(d) <= 2^-n so
// a < 2^-n + 2^-(n+2) < 3*2^-(n+1); conversely output 1 forces
// d_S(d) < 3*2^-(n+1) + 2^-(n+2) < 2*2^-n. Diagnosis: certified_in iff
// a < 3*2^-(n+2) (then d_S < 2^-n), certified_out iff a > 9*2^-(n+2)
// (then d_S > 2*2^-n).
PixelDecision pixel_from_distance(const DistOracle& D);

// ---------------------------------------------------------------------------
// Pixel sets (finite renders)
// ---------------------------------------------------------------------------

// Finite set of grid centers with decide = 1 on the grid (2^-(n+k) Z)^2,
// restricted to a window. Center i is (ix * 2^-(n+k), iy * 2^-(n+k)).
struct PixelSet {
    std::int64_t n = 0;
    std::int64_t k = 0;
    Box2 window;
    std::vector<std::pair<std::int64_t, std::int64_t>> centers; // (ix, iy)
    std::vector<Diag> diags; // parallel to centers
    // Set when a kept pixel touches the outermost grid ring of the window,
    // i.e. the window may be clipping the set.
    bool boundary_warning = false;

    Dyadic pitch() const { return Dyadic::pow2(-(n + k)); }
    Point2 center_of(std::size_t i) const;
};

// Enumerate the grid over the window and keep the decide = 1 centers.
// Guarantees (for a decision family honoring its contract, window containing
// the set): S is covered by the union of balls B(center, 2^-n) over kept
// centers, and every kept center lies within 2*2^-n of S, so the Hausdorff
// distance between the union and S is at most 4*2^-n (with k = 0; finer k
// only shrinks the cover side).
PixelSet approximate_set(const PixelDecision& P, std::int64_t n,
                         std::int64_t k, const Box2& window);

// Exact Hausdorff distance between the two finite center sets, as an
// interval of width <= 2^-p. All max-min selection happens on exact squared
// distances; the single square root at the end is certified.
DyInterval hausdorff_pixels(const PixelSet& P, const PixelSet& Q,
                            std::int64_t p);

// Distance oracle reconstructed from a decision family: eval(x, n) measures
// the distance from x to the nearest decide=1 center at resolution n_hi
// (enumerated lazily over the decision's bounding box, once). Since that
// center set is within Hausdorff distance 2*2^-n_hi of S, the answer is
// within 2^-n of d_S provided n <= n_hi - 3; coarser n_hi raises an error.
DistOracle distance_from_pixels(const PixelDecision& P, std::int64_t n_hi);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

struct PixelRow {
    std::int64_t ix, iy;
    int decision;
    Diag diag;
};

// CSV with a bit-exact header: first line
//   # n=<n> k=<k> window=[<xlo>,<xhi>]x[<ylo>,<yhi>]
// (dyadic text form), second line the column names
//   ix,iy,decision,diagnosis
// then one row per pixel in the given order.
void write_pixel_csv(std::ostream& out, std::int64_t n, std::int64_t k,
                     const Box2& window, const std::vector<PixelRow>& rows);

// A PixelSet serialized with the same layout (its kept pixels, decision 1,
// scan order: iy descending, ix ascending).
void write_pixel_set_csv(std::ostream& out, const PixelSet& ps);

} // namespace bitreal
