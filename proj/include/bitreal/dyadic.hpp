#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "bitreal/error.hpp"

namespace bitreal {

// A dyadic rational m * 2^e held in canonical form: the mantissa is odd or
// zero, and zero has exponent 0, so each value has exactly one representation.
// Addition, subtraction and multiplication are exact (the dyadics form a
// ring); division is deliberately absent and lives in roots.hpp as directed
// approximate division. The exponent is range-checked (|e| <= 2^31): going
// past that is a hard error, not wraparound.
class Dyadic {
  public:
    Dyadic() : man_(0), exp_(0) {}
    Dyadic(long v) : man_(v), exp_(0) { normalize(); }
    Dyadic(const mpz_class& mantissa, std::int64_t exponent)
        : man_(mantissa), exp_(exponent) {
        normalize();
    }

    static Dyadic pow2(std::int64_t e) { return Dyadic(1, e); }

    const mpz_class& mantissa() const { return man_; }
    std::int64_t exponent() const { return exp_; }

    bool is_zero() const { return sgn(man_) == 0; }
    int sign() const { return sgn(man_); }
    // Bit length of the mantissa (0 for zero).
    std::size_t bits() const;
    // floor(log2 |x|); requires x != 0.
    std::int64_t floor_log2_abs() const;

    Dyadic operator-() const;
    Dyadic operator+(const Dyadic& o) const;
    Dyadic operator-(const Dyadic& o) const;
    Dyadic operator*(const Dyadic& o) const;
    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
    Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
    Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

    // Exact multiplication by 2^k.
    Dyadic mul_pow2(std::int64_t k) const;
    Dyadic abs() const;

    // Three-way comparison, exact.
    int cmp(const Dyadic& o) const;
    bool operator==(const Dyadic& o) const { return cmp(o) == 0; }
    bool operator!=(const Dyadic& o) const { return cmp(o) != 0; }
    bool operator<(const Dyadic& o) const { return cmp(o) < 0; }
    bool operator<=(const Dyadic& o) const { return cmp(o) <= 0; }
    bool operator>(const Dyadic& o) const { return cmp(o) > 0; }
    bool operator>=(const Dyadic& o) const { return cmp(o) >= 0; }

    // Nearest multiple of 2^-n, ties away from zero; |result - x| <= 2^-(n+1),
    // and the canonical result has exponent >= -n.
    Dyadic round_to(std::int64_t n) const;
    // Largest multiple of 2^-n that is <= x / smallest that is >= x.
    Dyadic round_floor(std::int64_t n) const;
    Dyadic round_ceil(std::int64_t n) const;

    // floor(x * 2^s) as a bignum / as int64 (error if it does not fit).
    mpz_class scaled_floor(std::int64_t s) const;
    mpz_class scaled_ceil(std::int64_t s) const;
    std::int64_t scaled_floor_i64(std::int64_t s) const;
    std::int64_t scaled_ceil_i64(std::int64_t s) const;

    mpq_class to_mpq() const;

    // Canonical text form "m*2^e", e.g. "3*2^-4", "0*2^0".
    std::string to_string() const;
    // Exact finite decimal expansion, e.g. "0.1875".
    std::string to_decimal_string() const;

    // Accepts "m", "m/2^k" (k >= 0), "m*2^e", and finite dyadic decimals
    // ("0.5", "-1.25"); rejects non-dyadic decimals such as "0.2" with a
    // message naming the nearest representable dyadic.
    static Dyadic parse(const std::string& text);

  private:
    void normalize();

    mpz_class man_;
    std::int64_t exp_;
};

inline Dyadic min(const Dyadic& a, const Dyadic& b) { return a <= b ? a : b; }
inline Dyadic max(const Dyadic& a, const Dyadic& b) { return a >= b ? a : b; }
Dyadic clamp(const Dyadic& x, const Dyadic& lo, const Dyadic& hi);

// Nearest/floor/ceil dyadic with n fractional bits for an exact rational;
// |result - q| <= 2^-n in all three modes.
Dyadic dyadic_from_mpq_floor(const mpq_class& q, std::int64_t n);
Dyadic dyadic_from_mpq_ceil(const mpq_class& q, std::int64_t n);
Dyadic dyadic_from_mpq_nearest(const mpq_class& q, std::int64_t n);

// Smallest integer L with 2^L >= x (x > 0).
std::int64_t ceil_log2(const Dyadic& x);

} // namespace bitreal
