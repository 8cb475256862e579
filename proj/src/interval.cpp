#include "bitreal/interval.hpp"

#include "bitreal/roots.hpp"

namespace bitreal {

DyInterval DyInterval::operator*(const DyInterval& o) const {
    Dyadic p1 = lo * o.lo, p2 = lo * o.hi, p3 = hi * o.lo, p4 = hi * o.hi;
    Dyadic l = min(min(p1, p2), min(p3, p4));
    Dyadic h = max(max(p1, p2), max(p3, p4));
    return DyInterval(l, h);
}

DyInterval DyInterval::sqr() const {
    Dyadic a = lo * lo, b = hi * hi;
    Dyadic h = max(a, b);
    if (lo.sign() <= 0 && hi.sign() >= 0) return DyInterval(Dyadic(), h);
    return DyInterval(min(a, b), h);
}

ComplexBox box_step(const ComplexBox& z, const ComplexBox& c, std::int64_t p) {
    DyInterval re = z.re.sqr() - z.im.sqr() + c.re;
    DyInterval im = (z.re * z.im).mul_pow2(1) + c.im;
    return ComplexBox(re.outward_round(p), im.outward_round(p));
}

DyInterval mag_sq_bounds(const ComplexBox& z) {
    return z.re.sqr() + z.im.sqr();
}

DyInterval mag_bounds(const ComplexBox& z, std::int64_t p) {
    DyInterval m2 = mag_sq_bounds(z);
    return DyInterval(sqrt_lower(m2.lo.to_mpq(), p),
                      sqrt_upper(m2.hi.to_mpq(), p));
}

ComplexBox box_mul(const ComplexBox& a, const ComplexBox& b) {
    DyInterval re = a.re * b.re - a.im * b.im;
    DyInterval im = a.re * b.im + a.im * b.re;
    return ComplexBox(re, im);
}

} // namespace bitreal
