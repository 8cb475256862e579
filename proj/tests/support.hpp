#pragma once

// Shared test support: adversarial-but-valid oracles and independent exact
// references (rational Taylor sums, bisection roots). Everything here is
// deliberately written against the library's public contracts only, so
// tests cross-check implementations rather than mirroring them.

#include <gmpxx.h>

#include <cstdint>
#include <random>

#include "bitreal/dyadic.hpp"
#include "bitreal/oracle.hpp"

namespace testsup {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline mpq_class pow2q(std::int64_t e) {
    mpq_class q;
    if (e >= 0)
        q = mpq_class(mpz_class(1) << static_cast<unsigned>(e));
    else
        q = mpq_class(mpz_class(1), mpz_class(1) << static_cast<unsigned>(-e));
    return q;
}

// A valid oracle for `value` that answers at the edge of the allowed band:
// nearest dyadic at n+5 plus/minus (2^-n - 2^-(n+3)), sign chosen
// pseudo-randomly from (seed, n). Strictly within 2^-n of value.
inline bitreal::RealOracle adversarial_oracle(const mpq_class& value,
                                              std::uint64_t seed) {
    return bitreal::RealOracle::make(
        "adversarial", [value, seed](std::int64_t n) {
            bitreal::Dyadic base = bitreal::dyadic_from_mpq_nearest(value, n + 5);
            bitreal::Dyadic off =
                bitreal::Dyadic::pow2(-n) - bitreal::Dyadic::pow2(-(n + 3));
            bool up = (mix64(seed ^ static_cast<std::uint64_t>(n)) & 1) != 0;
            return up ? base + off : base - off;
        });
}

// Same, but the bias direction is fixed (+1 high edge / -1 low edge).
inline bitreal::RealOracle biased_oracle(const mpq_class& value, int dir) {
    return bitreal::RealOracle::make(
        "biased", [value, dir](std::int64_t n) {
            bitreal::Dyadic base = bitreal::dyadic_from_mpq_nearest(value, n + 5);
            bitreal::Dyadic off =
                bitreal::Dyadic::pow2(-n) - bitreal::Dyadic::pow2(-(n + 3));
            return dir >= 0 ? base + off : base - off;
        });
}

// Exact rational Taylor sum for e^x with certified tail below 2^-tail_bits
// (requires |x| <= 2). Returns the partial sum; the true e^x differs from it
// by less than 2^-tail_bits.
inline mpq_class exact_exp(const mpq_class& x, std::int64_t tail_bits) {
    mpq_class sum(1), term(1);
    mpq_class ax = abs(x);
    std::int64_t k = 0;
    while (true) {
        ++k;
        term *= x;
        term /= k;
        sum += term;
        // Tail after k terms: |x|^(k+1)/(k+1)! * 1/(1 - |x|/(k+2)) <= 2*bound
        // once k+2 >= 2|x|; check 2*|term|*|x|/(k+1) <= 2^-tail_bits.
        mpq_class tail_bound = 2 * abs(term) * ax;
        tail_bound /= (k + 1);
        if (k > 4 && tail_bound <= pow2q(-tail_bits)) break;
    }
    return sum;
}

// Exact-comparison bisection for y^(1/k) on [0, 2]: returns a dyadic m with
// |m - y^(1/k)| <= 2^-bits, using only exact rational comparisons.
inline mpq_class bisect_root(const mpq_class& y, int k, std::int64_t bits) {
    mpq_class lo(0), hi(2);
    for (std::int64_t i = 0; i < bits + 2; ++i) {
        mpq_class mid = (lo + hi) / 2;
        mpq_class p = mid;
        for (int j = 1; j < k; ++j) p *= mid;
        if (p <= y)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / 2;
}

// Random rational in [lo, hi] with denominator 2^40-ish (not dyadic in
// general: denominators get odd factors from the division below).
inline mpq_class random_rational(std::mt19937_64& rng, const mpq_class& lo,
                                 const mpq_class& hi) {
    std::uniform_int_distribution<long> num(0, (1L << 30));
    std::uniform_int_distribution<long> den(1, (1L << 30));
    long a = num(rng), b = den(rng);
    mpq_class t(a % (b + 1), b + 1); // in [0, 1]
    t.canonicalize();
    return lo + t * (hi - lo);
}

} // namespace testsup
