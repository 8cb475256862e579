#include "bitreal/dyadic.hpp"

#include <algorithm>
#include <cctype>

#include "bitreal/cost.hpp"

namespace bitreal {

namespace {

constexpr std::int64_t kExpLimit = std::int64_t(1) << 31;
// Cap on alignment shifts; beyond this the aligned mantissa would not be a
// sane in-memory object (2^26 bits = 8 MiB).
constexpr std::int64_t kShiftLimit = std::int64_t(1) << 26;

void check_shift(std::int64_t s) {
    if (s < 0 || s > kShiftLimit)
        throw Error("dyadic alignment shift out of range");
}

mpz_class shifted_left(const mpz_class& m, std::int64_t s) {
    check_shift(s);
    mpz_class r;
    mpz_mul_2exp(r.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
    return r;
}

mpz_class parse_integer(const std::string& s, const std::string& full) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (i == s.size())
        throw ParseError("not a dyadic rational: '" + full + "'");
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw ParseError("not a dyadic rational: '" + full + "'");
    return mpz_class(s, 10);
}

std::int64_t parse_small_int(const std::string& s, const std::string& full) {
    mpz_class v = parse_integer(s, full);
    if (!v.fits_slong_p())
        throw ParseError("exponent out of range in '" + full + "'");
    return v.get_si();
}

} // namespace

void Dyadic::normalize() {
    if (sgn(man_) == 0) {
        exp_ = 0;
        return;
    }
    mp_bitcnt_t tz = mpz_scan1(man_.get_mpz_t(), 0);
    if (tz > 0) {
        mpz_fdiv_q_2exp(man_.get_mpz_t(), man_.get_mpz_t(), tz);
        exp_ += static_cast<std::int64_t>(tz);
    }
    if (exp_ > kExpLimit || exp_ < -kExpLimit)
        throw Error("dyadic exponent overflow");
}

std::size_t Dyadic::bits() const {
    if (is_zero()) return 0;
    return mpz_sizeinbase(man_.get_mpz_t(), 2);
}

std::int64_t Dyadic::floor_log2_abs() const {
    if (is_zero()) throw Error("floor_log2_abs of zero");
    return static_cast<std::int64_t>(bits()) - 1 + exp_;
}

Dyadic Dyadic::operator-() const {
    Dyadic r;
    r.man_ = -man_;
    r.exp_ = exp_;
    return r;
}

Dyadic Dyadic::operator+(const Dyadic& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    std::int64_t e = std::min(exp_, o.exp_);
    mpz_class a = shifted_left(man_, exp_ - e);
    mpz_class b = shifted_left(o.man_, o.exp_ - e);
    cost::charge(std::max(mpz_sizeinbase(a.get_mpz_t(), 2),
                          mpz_sizeinbase(b.get_mpz_t(), 2)) +
                 1);
    return Dyadic(a + b, e);
}

Dyadic Dyadic::operator-(const Dyadic& o) const { return *this + (-o); }

Dyadic Dyadic::operator*(const Dyadic& o) const {
    if (is_zero() || o.is_zero()) return Dyadic();
    cost::charge(static_cast<std::uint64_t>(bits()) * o.bits());
    Dyadic r;
    r.man_ = man_ * o.man_;
    r.exp_ = exp_ + o.exp_;
    r.normalize();
    return r;
}

Dyadic Dyadic::mul_pow2(std::int64_t k) const {
    if (is_zero()) return *this;
    Dyadic r = *this;
    r.exp_ += k;
    if (r.exp_ > kExpLimit || r.exp_ < -kExpLimit)
        throw Error("dyadic exponent overflow");
    return r;
}

Dyadic Dyadic::abs() const { return sign() < 0 ? -*this : *this; }

int Dyadic::cmp(const Dyadic& o) const {
    int sa = sign(), sb = o.sign();
    if (sa != sb) return sa < sb ? -1 : 1;
    if (sa == 0) return 0;
    std::int64_t e = std::min(exp_, o.exp_);
    mpz_class a = shifted_left(man_, exp_ - e);
    mpz_class b = shifted_left(o.man_, o.exp_ - e);
    cost::charge(std::max(mpz_sizeinbase(a.get_mpz_t(), 2),
                          mpz_sizeinbase(b.get_mpz_t(), 2)) +
                 1);
    int c = ::cmp(a, b);
    return c < 0 ? -1 : c > 0 ? 1 : 0;
}

Dyadic Dyadic::round_to(std::int64_t n) const {
    if (is_zero() || exp_ + n >= 0) return *this;
    std::int64_t s = -(exp_ + n);
    check_shift(s);
    cost::charge(bits() + 1);
    mpz_class half = shifted_left(mpz_class(1), s - 1);
    mpz_class q;
    if (sgn(man_) > 0) {
        mpz_class t = man_ + half;
        mpz_fdiv_q_2exp(q.get_mpz_t(), t.get_mpz_t(),
                        static_cast<mp_bitcnt_t>(s));
    } else {
        mpz_class t = -man_ + half;
        mpz_fdiv_q_2exp(q.get_mpz_t(), t.get_mpz_t(),
                        static_cast<mp_bitcnt_t>(s));
        q = -q;
    }
    return Dyadic(q, -n);
}

Dyadic Dyadic::round_floor(std::int64_t n) const {
    if (is_zero() || exp_ + n >= 0) return *this;
    return Dyadic(scaled_floor(n), -n);
}

Dyadic Dyadic::round_ceil(std::int64_t n) const {
    if (is_zero() || exp_ + n >= 0) return *this;
    return Dyadic(scaled_ceil(n), -n);
}

mpz_class Dyadic::scaled_floor(std::int64_t s) const {
    if (is_zero()) return mpz_class(0);
    cost::charge(bits() + 1);
    std::int64_t sh = exp_ + s;
    if (sh >= 0) return shifted_left(man_, sh);
    check_shift(-sh);
    mpz_class q;
    mpz_fdiv_q_2exp(q.get_mpz_t(), man_.get_mpz_t(),
                    static_cast<mp_bitcnt_t>(-sh));
    return q;
}

mpz_class Dyadic::scaled_ceil(std::int64_t s) const {
    if (is_zero()) return mpz_class(0);
    cost::charge(bits() + 1);
    std::int64_t sh = exp_ + s;
    if (sh >= 0) return shifted_left(man_, sh);
    check_shift(-sh);
    mpz_class q;
    mpz_cdiv_q_2exp(q.get_mpz_t(), man_.get_mpz_t(),
                    static_cast<mp_bitcnt_t>(-sh));
    return q;
}

std::int64_t Dyadic::scaled_floor_i64(std::int64_t s) const {
    mpz_class v = scaled_floor(s);
    if (!v.fits_slong_p()) throw Error("scaled value does not fit in int64");
    return v.get_si();
}

std::int64_t Dyadic::scaled_ceil_i64(std::int64_t s) const {
    mpz_class v = scaled_ceil(s);
    if (!v.fits_slong_p()) throw Error("scaled value does not fit in int64");
    return v.get_si();
}

mpq_class Dyadic::to_mpq() const {
    mpq_class q;
    if (exp_ >= 0) {
        q = mpq_class(shifted_left(man_, exp_));
    } else {
        check_shift(-exp_);
        q = mpq_class(man_, shifted_left(mpz_class(1), -exp_));
    }
    q.canonicalize();
    return q;
}

std::string Dyadic::to_string() const {
    return man_.get_str() + "*2^" + std::to_string(exp_);
}

std::string Dyadic::to_decimal_string() const {
    if (exp_ >= 0) {
        mpz_class v = shifted_left(man_, exp_);
        return v.get_str();
    }
    std::int64_t k = -exp_;
    check_shift(k);
    mpz_class five(5);
    mpz_class p5;
    mpz_pow_ui(p5.get_mpz_t(), five.get_mpz_t(), static_cast<unsigned long>(k));
    mpz_class digits = ::abs(man_) * p5;
    std::string ds = digits.get_str();
    if (static_cast<std::int64_t>(ds.size()) <= k)
        ds.insert(0, static_cast<std::size_t>(k + 1 - ds.size()), '0');
    ds.insert(ds.size() - static_cast<std::size_t>(k), ".");
    if (sgn(man_) < 0) ds.insert(0, "-");
    return ds;
}

Dyadic Dyadic::parse(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ParseError("empty dyadic literal");

    std::size_t star = s.find('*');
    if (star != std::string::npos) {
        if (s.compare(star, 3, "*2^") != 0)
            throw ParseError("not a dyadic rational: '" + raw +
                             "' (expected m*2^e)");
        mpz_class m = parse_integer(s.substr(0, star), raw);
        std::int64_t e = parse_small_int(s.substr(star + 3), raw);
        return Dyadic(m, e);
    }
    std::size_t slash = s.find('/');
    if (slash != std::string::npos) {
        if (s.compare(slash, 3, "/2^") != 0)
            throw ParseError("not a dyadic rational: '" + raw +
                             "' (expected m/2^k)");
        mpz_class m = parse_integer(s.substr(0, slash), raw);
        std::int64_t k = parse_small_int(s.substr(slash + 3), raw);
        if (k < 0)
            throw ParseError("not a dyadic rational: '" + raw +
                             "' (k must be >= 0 in m/2^k)");
        return Dyadic(m, -k);
    }
    std::size_t dot = s.find('.');
    if (dot != std::string::npos) {
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        bool neg = false;
        if (!ip.empty() && (ip[0] == '+' || ip[0] == '-')) {
            neg = ip[0] == '-';
            ip.erase(0, 1);
        }
        if (fp.empty())
            throw ParseError("not a dyadic rational: '" + raw + "'");
        for (char c : ip + fp)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw ParseError("not a dyadic rational: '" + raw + "'");
        std::int64_t k = static_cast<std::int64_t>(fp.size());
        mpz_class num(ip.empty() ? "0" : ip);
        mpz_class ten(10);
        mpz_class p10;
        mpz_pow_ui(p10.get_mpz_t(), ten.get_mpz_t(),
                   static_cast<unsigned long>(k));
        num = num * p10 + mpz_class(fp);
        if (neg) num = -num;
        mpz_class five(5);
        mpz_class p5;
        mpz_pow_ui(p5.get_mpz_t(), five.get_mpz_t(),
                   static_cast<unsigned long>(k));
        if (mpz_divisible_p(num.get_mpz_t(), p5.get_mpz_t())) {
            return Dyadic(num / p5, -k);
        }
        // Non-dyadic decimal: name the nearest representable value at a
        // scale fine enough to preserve all given digits (10^-k < 2^-(4k)
        // never holds, 2^-4k <= 10^-k does, so 4k fractional bits suffice).
        std::int64_t gb = 4 * k;
        Dyadic near = dyadic_from_mpq_nearest(mpq_class(num, p10), gb);
        throw ParseError(
            "not a dyadic rational: '" + raw +
            "' (its denominator carries a factor of 5); nearest dyadic with " +
            std::to_string(gb) + " fractional bits is " + near.to_string() +
            " = " + near.to_decimal_string());
    }
    return Dyadic(parse_integer(s, raw), 0);
}

Dyadic clamp(const Dyadic& x, const Dyadic& lo, const Dyadic& hi) {
    if (x < lo) return lo;
    if (x > hi) return hi;
    return x;
}

namespace {

Dyadic from_scaled_div(const mpz_class& num, const mpz_class& den,
                       std::int64_t n, bool ceil_mode) {
    mpz_class q;
    if (ceil_mode)
        mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    else
        mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    cost::charge(mpz_sizeinbase(num.get_mpz_t(), 2) +
                 mpz_sizeinbase(den.get_mpz_t(), 2));
    return Dyadic(q, -n);
}

} // namespace

Dyadic dyadic_from_mpq_floor(const mpq_class& q, std::int64_t n) {
    check_shift(n);
    mpz_class num;
    mpz_mul_2exp(num.get_mpz_t(), q.get_num().get_mpz_t(),
                 static_cast<mp_bitcnt_t>(n));
    return from_scaled_div(num, q.get_den(), n, false);
}

Dyadic dyadic_from_mpq_ceil(const mpq_class& q, std::int64_t n) {
    check_shift(n);
    mpz_class num;
    mpz_mul_2exp(num.get_mpz_t(), q.get_num().get_mpz_t(),
                 static_cast<mp_bitcnt_t>(n));
    return from_scaled_div(num, q.get_den(), n, true);
}

Dyadic dyadic_from_mpq_nearest(const mpq_class& q, std::int64_t n) {
    check_shift(n);
    mpz_class num;
    mpz_mul_2exp(num.get_mpz_t(), q.get_num().get_mpz_t(),
                 static_cast<mp_bitcnt_t>(n + 1));
    num += q.get_den();
    mpz_class den = q.get_den() * 2;
    return from_scaled_div(num, den, n, false);
}

std::int64_t ceil_log2(const Dyadic& x) {
    if (x.sign() <= 0) throw DomainError("ceil_log2 requires x > 0");
    std::int64_t fl = x.floor_log2_abs();
    bool exact_pow2 = x.mantissa() == 1;
    return exact_pow2 ? fl : fl + 1;
}

} // namespace bitreal
