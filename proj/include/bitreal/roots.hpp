#pragma once

#include <gmpxx.h>

#include <cstdint>

#include "bitreal/dyadic.hpp"

namespace bitreal {

// Directed division onto the 2^-n grid. div_floor returns the largest
// multiple of 2^-n that is <= a/b, div_ceil the smallest >= a/b, and
// div_nearest the nearest multiple (ties toward +infinity), so
// |div_nearest(a,b,n) - a/b| <= 2^-(n+1). b must be nonzero.
Dyadic div_floor(const Dyadic& a, const Dyadic& b, std::int64_t n);
Dyadic div_ceil(const Dyadic& a, const Dyadic& b, std::int64_t n);
Dyadic div_nearest(const Dyadic& a, const Dyadic& b, std::int64_t n);

// Certified square root of an exact nonnegative rational: sqrt_lower returns
// a dyadic L with L <= sqrt(q) < L + 2^-(t+1), sqrt_upper a dyadic U with
// sqrt(q) <= U < sqrt(q) + 2^-(t+1) (and U = sqrt(q) exactly when q is the
// square of a dyadic on the 2^-(t+1) grid). Both lie within 2^-t of sqrt(q).
Dyadic sqrt_lower(const mpq_class& q, std::int64_t t);
Dyadic sqrt_upper(const mpq_class& q, std::int64_t t);

// Certified k-th root of a nonnegative dyadic (k >= 1): returns a dyadic L
// with L <= q^(1/k) < L + 2^-(t+1); in particular |L - q^(1/k)| < 2^-t.
// Computed through the exact integer k-th root; used as an independent
// reference for newton_kth_root.
Dyadic dy_kth_root(const Dyadic& q, int k, std::int64_t t);

// Certified k-th root (k in {2,3}) of a dyadic q in [0, 9/8] by Newton's
// method from above with per-step directed rounding at t+12 guard bits,
// stopping on the exact residual certificate lambda^k - q <= 2^-(t+3)
// (the derivative lower bound on the bracketing interval turns that into
// |lambda - q^(1/k)| < 2^-t). For q < 1/16, where the derivative bound
// degenerates, falls back to exact-comparison bisection on [0, 1/2].
Dyadic newton_kth_root(const Dyadic& q, int k, std::int64_t t);

} // namespace bitreal
