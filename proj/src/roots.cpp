#include "bitreal/roots.hpp"

#include "bitreal/cost.hpp"
#include "bitreal/error.hpp"

namespace bitreal {

namespace {

constexpr std::int64_t kShiftLimit = std::int64_t(1) << 26;

void check_shift(std::int64_t s) {
    if (s < 0 || s > kShiftLimit)
        throw Error("dyadic scaling shift out of range");
}

mpz_class shl(const mpz_class& m, std::int64_t s) {
    check_shift(s);
    mpz_class r;
    mpz_mul_2exp(r.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
    return r;
}

std::size_t zbits(const mpz_class& v) {
    return sgn(v) == 0 ? 1 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

// Reduce a/b * 2^n to an integer fraction num/den with den > 0.
void scaled_fraction(const Dyadic& a, const Dyadic& b, std::int64_t n,
                     mpz_class& num, mpz_class& den) {
    if (b.is_zero()) throw DomainError("division by zero");
    num = a.mantissa();
    den = b.mantissa();
    if (sgn(den) < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t e = a.exponent() - b.exponent() + n;
    if (e >= 0)
        num = shl(num, e);
    else
        den = shl(den, -e);
}

enum class DivMode { Floor, Ceil, Nearest };

Dyadic grid_div(const Dyadic& a, const Dyadic& b, std::int64_t n,
                DivMode mode) {
    mpz_class num, den;
    scaled_fraction(a, b, n, num, den);
    mpz_class q;
    switch (mode) {
    case DivMode::Floor:
        mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        break;
    case DivMode::Ceil:
        mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        break;
    case DivMode::Nearest: {
        mpz_class num2 = num * 2 + den;
        mpz_class den2 = den * 2;
        mpz_fdiv_q(q.get_mpz_t(), num2.get_mpz_t(), den2.get_mpz_t());
        break;
    }
    }
    cost::charge(zbits(q) * zbits(den) + zbits(num));
    return Dyadic(q, -n);
}

} // namespace

Dyadic div_floor(const Dyadic& a, const Dyadic& b, std::int64_t n) {
    return grid_div(a, b, n, DivMode::Floor);
}

Dyadic div_ceil(const Dyadic& a, const Dyadic& b, std::int64_t n) {
    return grid_div(a, b, n, DivMode::Ceil);
}

Dyadic div_nearest(const Dyadic& a, const Dyadic& b, std::int64_t n) {
    return grid_div(a, b, n, DivMode::Nearest);
}

namespace {

// Shared body: floor(sqrt(q * 4^s)) with exactness flag.
mpz_class scaled_sqrt(const mpq_class& q, std::int64_t s, bool& exact) {
    if (sgn(q) < 0) throw DomainError("square root of a negative value");
    mpz_class num = shl(q.get_num(), 2 * s);
    const mpz_class& den = q.get_den();
    mpz_class a, divrem;
    mpz_fdiv_qr(a.get_mpz_t(), divrem.get_mpz_t(), num.get_mpz_t(),
                den.get_mpz_t());
    mpz_class r, sqrem;
    mpz_sqrtrem(r.get_mpz_t(), sqrem.get_mpz_t(), a.get_mpz_t());
    exact = sgn(divrem) == 0 && sgn(sqrem) == 0;
    cost::charge(zbits(a) * (zbits(r) + 1));
    return r;
}

} // namespace

Dyadic sqrt_lower(const mpq_class& q, std::int64_t t) {
    bool exact = false;
    std::int64_t s = t + 1;
    mpz_class r = scaled_sqrt(q, s, exact);
    return Dyadic(r, -s);
}

Dyadic sqrt_upper(const mpq_class& q, std::int64_t t) {
    bool exact = false;
    std::int64_t s = t + 1;
    mpz_class r = scaled_sqrt(q, s, exact);
    if (!exact) r += 1;
    return Dyadic(r, -s);
}

Dyadic newton_kth_root(const Dyadic& q, int k, std::int64_t t) {
    if (k != 2 && k != 3)
        throw DomainError("newton_kth_root supports k in {2, 3}");
    if (q.sign() < 0) throw DomainError("k-th root of a negative value");
    if (q > Dyadic(mpz_class(9), -3))
        throw DomainError("newton_kth_root expects q <= 9/8");
    if (q.is_zero()) return Dyadic();

    if (q < Dyadic(1, -4)) {
        // Derivative of t^k vanishes near 0; bisect [0, 1/2] with exact
        // comparisons. Invariant: a^k <= q <= b^k.
        Dyadic a, b(1, -1);
        for (std::int64_t step = 0; step <= t + 1; ++step) {
            Dyadic m = (a + b).mul_pow2(-1);
            Dyadic mk = m;
            for (int j = 1; j < k; ++j) mk *= m;
            if (mk <= q)
                a = m;
            else
                b = m;
        }
        return (a + b).mul_pow2(-1);
    }

    // Newton from above: the seed dominates the root, and floor-rounding the
    // update keeps every iterate above it, so the exact residual lambda^k - q
    // stays nonnegative and certifies the error through the derivative lower
    // bound k * root^(k-1) > 0.47 on [1/16, 9/8].
    Dyadic lam = max(Dyadic(1), q);
    const Dyadic target = Dyadic::pow2(-(t + 3));
    const std::int64_t max_iter = 8 * (t + 10) + 64;
    for (std::int64_t iter = 0; iter < max_iter; ++iter) {
        Dyadic lk = lam;
        for (int j = 1; j < k; ++j) lk *= lam;
        Dyadic r = lk - q;
        if (r <= target) return lam;
        Dyadic deriv = (k == 2) ? lam.mul_pow2(1) : (lam * lam) * Dyadic(3);
        Dyadic d = div_floor(r, deriv, t + 12);
        if (d.sign() <= 0) break; // cannot make progress on this grid
        lam = lam - d;
    }
    throw BudgetError("newton_kth_root: residual certificate not reached");
}

Dyadic dy_kth_root(const Dyadic& q, int k, std::int64_t t) {
    if (k < 1) throw DomainError("k-th root requires k >= 1");
    if (q.sign() < 0) throw DomainError("k-th root of a negative value");
    if (q.is_zero()) return Dyadic();
    if (k == 1) return q;
    std::int64_t s = t + 1;
    mpz_class a = q.scaled_floor(k * s);
    mpz_class r;
    mpz_root(r.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(k));
    cost::charge(zbits(a) * (zbits(r) + 1) / static_cast<unsigned>(k) +
                 zbits(a));
    return Dyadic(r, -s);
}

} // namespace bitreal
