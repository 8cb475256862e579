#pragma once

#include <cstdint>

#include "bitreal/dyadic.hpp"

namespace bitreal {

// Closed interval [lo, hi] with dyadic endpoints. The arithmetic here is
// exact (dyadics form a ring), so enclosures only widen when outward_round
// is applied explicitly; that keeps rounding a single, auditable step.
struct DyInterval {
    Dyadic lo, hi;

    DyInterval() : lo(), hi() {}
    explicit DyInterval(const Dyadic& point) : lo(point), hi(point) {}
    DyInterval(const Dyadic& l, const Dyadic& h) : lo(l), hi(h) {
        if (lo > hi) throw Error("interval endpoints out of order");
    }

    Dyadic width() const { return hi - lo; }
    Dyadic mid() const { return (lo + hi).mul_pow2(-1); }
    bool is_point() const { return lo == hi; }

    bool contains(const Dyadic& x) const { return lo <= x && x <= hi; }
    bool contains(const DyInterval& o) const {
        return lo <= o.lo && o.hi <= hi;
    }
    bool intersects(const DyInterval& o) const {
        return lo <= o.hi && o.lo <= hi;
    }

    DyInterval operator-() const { return DyInterval(-hi, -lo); }
    DyInterval operator+(const DyInterval& o) const {
        return DyInterval(lo + o.lo, hi + o.hi);
    }
    DyInterval operator-(const DyInterval& o) const { return *this + (-o); }
    DyInterval operator*(const DyInterval& o) const;

    // Tight square: never dips below zero when the interval straddles it.
    DyInterval sqr() const;

    DyInterval mul_pow2(std::int64_t k) const {
        return DyInterval(lo.mul_pow2(k), hi.mul_pow2(k));
    }
    DyInterval inflate(const Dyadic& r) const {
        return DyInterval(lo - r, hi + r);
    }
    // Push endpoints outward onto the 2^-p grid; widens by at most 2*2^-p.
    DyInterval outward_round(std::int64_t p) const {
        return DyInterval(lo.round_floor(p), hi.round_ceil(p));
    }

    static DyInterval hull(const DyInterval& a, const DyInterval& b) {
        return DyInterval(min(a.lo, b.lo), max(a.hi, b.hi));
    }
};

// Axis-aligned box in the complex plane: re + i*im with interval channels.
struct ComplexBox {
    DyInterval re, im;

    ComplexBox() = default;
    ComplexBox(const DyInterval& r, const DyInterval& i) : re(r), im(i) {}
    ComplexBox(const Dyadic& r, const Dyadic& i)
        : re(DyInterval(r)), im(DyInterval(i)) {}

    Dyadic width() const { return max(re.width(), im.width()); }
    bool contains(const ComplexBox& o) const {
        return re.contains(o.re) && im.contains(o.im);
    }
    ComplexBox outward_round(std::int64_t p) const {
        return ComplexBox(re.outward_round(p), im.outward_round(p));
    }
};

// One quadratic step z^2 + c computed exactly, then rounded outward onto the
// 2^-p grid; the rounding widens each channel by at most 2*2^-p.
ComplexBox box_step(const ComplexBox& z, const ComplexBox& c, std::int64_t p);

// Exact enclosure of |z|^2 = re^2 + im^2 over the box.
DyInterval mag_sq_bounds(const ComplexBox& z);

// Certified enclosure of |z| over the box, endpoints within 2^-p of the
// exact square roots.
DyInterval mag_bounds(const ComplexBox& z, std::int64_t p);

// Exact enclosure of the product of two complex boxes (used for interval
// derivative products).
ComplexBox box_mul(const ComplexBox& a, const ComplexBox& b);

} // namespace bitreal
