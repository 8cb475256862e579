#include "bitreal/oracle.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <utility>

#include "bitreal/cost.hpp"
#include "bitreal/roots.hpp"

namespace bitreal {

struct RealOracle::State {
    std::string desc;
    Kernel kernel;
    std::map<std::int64_t, Dyadic> memo;
    mutable std::mutex mu;
    std::atomic<std::uint64_t> queries{0};
    std::atomic<std::uint64_t> bitops{0};
};

RealOracle RealOracle::make(std::string description, Kernel kernel) {
    RealOracle r;
    r.state_ = std::make_shared<State>();
    r.state_->desc = std::move(description);
    r.state_->kernel = std::move(kernel);
    return r;
}

Dyadic RealOracle::query(std::int64_t n) const {
    if (!state_) throw Error("query on an empty oracle");
    if (n < 0) n = 0;
    State& st = *state_;
    std::uint64_t before = cost::bit_ops();
    // Reading an answer at precision n costs at least n bit operations.
    cost::charge(static_cast<std::uint64_t>(n < 1 ? 1 : n));
    std::lock_guard<std::mutex> lock(st.mu);
    st.queries.fetch_add(1, std::memory_order_relaxed);
    Dyadic out;
    auto it = st.memo.lower_bound(n);
    if (it != st.memo.end() && it->first == n) {
        out = it->second;
    } else if (it != st.memo.end()) {
        // An answer at higher precision is valid here too; pin it at n so
        // repeated query(n) stays bit-identical.
        out = it->second;
        st.memo.emplace(n, out);
    } else {
        out = st.kernel(n);
        st.memo.emplace(n, out);
    }
    st.bitops.fetch_add(cost::bit_ops() - before, std::memory_order_relaxed);
    return out;
}

const std::string& RealOracle::description() const {
    if (!state_) throw Error("description on an empty oracle");
    return state_->desc;
}

std::uint64_t RealOracle::query_count() const {
    return state_ ? state_->queries.load(std::memory_order_relaxed) : 0;
}

std::uint64_t RealOracle::bit_ops_attributed() const {
    return state_ ? state_->bitops.load(std::memory_order_relaxed) : 0;
}

RealOracle oracle_from_dyadic(const Dyadic& q) {
    return RealOracle::make("dyadic " + q.to_string(), [q](std::int64_t n) {
        return q.round_to(n + 1);
    });
}

RealOracle oracle_add(const RealOracle& a, const RealOracle& b) {
    return RealOracle::make(
        "(" + a.description() + " + " + b.description() + ")",
        [a, b](std::int64_t n) {
            return (a.query(n + 2) + b.query(n + 2)).round_to(n + 1);
        });
}

RealOracle oracle_sub(const RealOracle& a, const RealOracle& b) {
    return RealOracle::make(
        "(" + a.description() + " - " + b.description() + ")",
        [a, b](std::int64_t n) {
            return (a.query(n + 2) - b.query(n + 2)).round_to(n + 1);
        });
}

RealOracle oracle_neg(const RealOracle& a) {
    return RealOracle::make("(-" + a.description() + ")",
                            [a](std::int64_t n) { return -a.query(n); });
}

RealOracle oracle_mul_pow2(const RealOracle& a, std::int64_t k) {
    return RealOracle::make(
        "(" + a.description() + " * 2^" + std::to_string(k) + ")",
        [a, k](std::int64_t n) { return a.query(n + k).mul_pow2(k); });
}

RealOracle oracle_mul(const RealOracle& a, const RealOracle& b) {
    return RealOracle::make(
        "(" + a.description() + " * " + b.description() + ")",
        [a, b](std::int64_t n) {
            // Certified magnitude bounds from precision-1 probes: |a| < Ba.
            Dyadic ba = a.query(1).abs() + Dyadic(1, -1);
            Dyadic bb = b.query(1).abs() + Dyadic(1, -1);
            std::int64_t ma = n + 2 + ceil_log2(Dyadic(1) + bb);
            std::int64_t mb = n + 2 + ceil_log2(Dyadic(1) + ba);
            return (a.query(ma) * b.query(mb)).round_to(n + 1);
        });
}

namespace {

// Probe b at k = 1, 2, 4, ... (finishing at max_probe) until the answer
// certifies |b| > L > 2^-k; returns (k, L).
std::pair<std::int64_t, Dyadic> separate_from_zero(const RealOracle& b,
                                                   std::int64_t max_probe) {
    std::int64_t k = 1;
    while (true) {
        Dyadic qk = b.query(k).abs();
        Dyadic thresh = Dyadic::pow2(-k).mul_pow2(1);
        if (qk > thresh) return {k, qk - Dyadic::pow2(-k)};
        if (k >= max_probe)
            throw SeparationError(
                "cannot separate divisor from zero at precision " +
                std::to_string(max_probe));
        k = (k * 2 <= max_probe) ? k * 2 : max_probe;
    }
}

} // namespace

RealOracle oracle_inv(const RealOracle& b, std::int64_t max_probe) {
    auto [k0, lower] = separate_from_zero(b, max_probe);
    // ell with 2^-ell <= lower, i.e. 2^ell >= 1/lower.
    std::int64_t f = lower.floor_log2_abs();
    std::int64_t ell = f < 0 ? -f : 0;
    return RealOracle::make(
        "(1 / " + b.description() + ")",
        [b, k0 = k0, ell](std::int64_t n) {
            std::int64_t m = std::max(n + 3 + 2 * ell, k0 + 1);
            return div_nearest(Dyadic(1), b.query(m), n + 2);
        });
}

RealOracle oracle_div(const RealOracle& a, const RealOracle& b,
                      std::int64_t max_probe) {
    return oracle_mul(a, oracle_inv(b, max_probe));
}

namespace {

std::int64_t ceil_log2_int(std::int64_t v) {
    std::int64_t b = 0;
    while ((std::int64_t(1) << b) < v) ++b;
    return b;
}

const Dyadic& seventeen_sixteenths() {
    static const Dyadic v(mpz_class(17), -4);
    return v;
}

} // namespace

Dyadic exp_taylor_eval(const Dyadic& q, std::int64_t s) {
    if (q.abs() > seventeen_sixteenths())
        throw DomainError("exp_taylor_eval expects |q| <= 17/16");
    if (s < 0) s = 0;

    // Term count: B_k is a certified upper bound on (17/16)^k / k!; the tail
    // after terms 0..K-1 is at most 2*B_K once K >= 2.
    std::int64_t K = 1;
    Dyadic bound(seventeen_sixteenths());
    const Dyadic tail_target = Dyadic::pow2(-(s + 2)); // 2*B_K <= 2^-(s+1)
    while (K < 3 || bound > tail_target) {
        ++K;
        bound = div_ceil(bound * seventeen_sixteenths(), Dyadic(long(K)),
                         s + 8);
    }

    // Working grid 2^-w keeps every term O(s) bits; the rounding errors,
    // each amplified at most e^(17/16) < 2.9 through later terms, total
    // under 2^-(s+4).
    const std::int64_t w = s + 5 + ceil_log2_int(K + 1);
    Dyadic term(1), sum(1);
    for (std::int64_t k = 1; k < K; ++k) {
        term = div_nearest(term * q, Dyadic(long(k)), w);
        sum += term;
    }
    return sum.round_to(s + 1);
}

RealOracle exp_oracle(const RealOracle& x) {
    Dyadic probe = x.query(5);
    if (probe.abs() > Dyadic(1) + Dyadic::pow2(-5))
        throw DomainError("exp oracle domain is [-1, 1]: " + x.description() +
                          " answered " + probe.to_string() +
                          " at precision 5");
    return RealOracle::make(
        "exp(" + x.description() + ")", [x](std::int64_t n) {
            Dyadic q = x.query(n + 4);
            Dyadic qc = clamp(q, -seventeen_sixteenths(),
                              seventeen_sixteenths());
            return exp_taylor_eval(qc, n + 2);
        });
}

RealOracle newton_root(const RealOracle& x, int k) {
    if (k != 2 && k != 3)
        throw DomainError("newton_root supports k in {2, 3}");
    Dyadic probe = x.query(4);
    if (probe < -Dyadic::pow2(-4))
        throw DomainError("root oracle domain is [0, 1]: " + x.description() +
                          " answered " + probe.to_string() +
                          " at precision 4 (negative)");
    if (probe > Dyadic(1) + Dyadic::pow2(-4))
        throw DomainError("root oracle domain is [0, 1]: " + x.description() +
                          " answered " + probe.to_string() + " at precision 4");
    // x >= 1/8 certified: the root map is Lipschitz (slope < 4) and a cheap
    // operand read at n+4 suffices; otherwise the Holder estimate
    // |a^(1/k) - b^(1/k)| <= |a - b|^(1/k) needs the operand at k*(n+2).
    const bool lipschitz = probe - Dyadic::pow2(-4) >= Dyadic(1, -3);
    const Dyadic nine_eighths(mpz_class(9), -3);
    std::string name = (k == 2 ? "sqrt(" : "cbrt(") + x.description() + ")";
    return RealOracle::make(
        std::move(name), [x, k, lipschitz, nine_eighths](std::int64_t n) {
            Dyadic qc;
            if (lipschitz) {
                qc = clamp(x.query(n + 4), Dyadic(1, -4), nine_eighths);
            } else {
                qc = clamp(x.query(std::int64_t(k) * (n + 2)), Dyadic(),
                           nine_eighths);
            }
            return newton_kth_root(qc, k, n + 2);
        });
}

namespace {

// Exact rational partial sum of arctan(1/m) with the alternating-series
// remainder below 2^-tail_bits (strictly, since terms strictly decrease).
mpq_class atan_recip(long m, std::int64_t tail_bits) {
    mpq_class sum(0);
    mpz_class mpow(m); // m^(2j+1)
    mpz_class msq = mpz_class(m) * m;
    std::int64_t j = 0;
    while (true) {
        mpz_class denom = mpow * (2 * j + 1);
        // Stop before adding a term once it is small enough to bound the
        // tail: remainder after j terms < 1/((2j+1) m^(2j+1)).
        mpz_class threshold;
        mpz_ui_pow_ui(threshold.get_mpz_t(), 2,
                      static_cast<unsigned long>(tail_bits));
        if (denom >= threshold && j > 0) break;
        mpq_class term(1, denom);
        if (j % 2 == 1) term = -term;
        sum += term;
        mpow *= msq;
        ++j;
    }
    return sum;
}

} // namespace

RealOracle pi_oracle_second_series() {
    // pi = 4*arctan(1/2) + 4*arctan(1/3).
    return RealOracle::make("pi (arctan 1/2 + 1/3)", [](std::int64_t n) {
        mpq_class val = 4 * (atan_recip(2, n + 4) + atan_recip(3, n + 4));
        return dyadic_from_mpq_nearest(val, n + 1);
    });
}

RealOracle const_oracle(ConstName name) {
    switch (name) {
    case ConstName::pi:
        // pi = 16*arctan(1/5) - 4*arctan(1/239).
        return RealOracle::make("pi", [](std::int64_t n) {
            mpq_class val =
                16 * atan_recip(5, n + 6) - 4 * atan_recip(239, n + 4);
            return dyadic_from_mpq_nearest(val, n + 1);
        });
    case ConstName::e:
        return RealOracle::make("e", [](std::int64_t n) {
            // Sum 1/k! for k = 0..K where (K+1)! >= 2^(n+2), so the tail
            // (< 2/(K+1)!) is below 2^-(n+1).
            mpz_class fact(1), threshold;
            mpz_ui_pow_ui(threshold.get_mpz_t(), 2,
                          static_cast<unsigned long>(n + 2));
            long K = 0;
            while (fact < threshold) {
                ++K;
                fact *= K; // fact = (K)! ... grown until (K)! >= 2^(n+2)
            }
            // Terms 0..K-1 have tail < 2/K! <= 2^-(n+1). S_j = sum over
            // k<=j of j!/k! satisfies S_j = j*S_{j-1} + 1 over denominator j!.
            mpz_class num(1), den(1);
            for (long j = 1; j <= K - 1; ++j) {
                num = num * j + 1;
                den *= j;
            }
            return dyadic_from_mpq_nearest(mpq_class(num, den), n + 1);
        });
    case ConstName::sqrt2:
        return RealOracle::make("sqrt2", [](std::int64_t n) {
            static const RealOracle base = oracle_mul_pow2(
                newton_root(oracle_from_dyadic(Dyadic(1, -1)), 2), 1);
            return base.query(n);
        });
    case ConstName::one_third:
        return RealOracle::make("one_third", [](std::int64_t n) {
            mpz_class num;
            mpz_class p2;
            mpz_ui_pow_ui(p2.get_mpz_t(), 2,
                          static_cast<unsigned long>(n + 1));
            mpz_fdiv_q(num.get_mpz_t(), p2.get_mpz_t(),
                       mpz_class(3).get_mpz_t());
            return Dyadic(num, -(n + 1));
        });
    }
    throw Error("unknown constant");
}

namespace {

RealOracle root_with_range_reduction(const RealOracle& x, int k) {
    Dyadic q2 = x.query(2);
    if (q2 <= -Dyadic::pow2(-2))
        throw DomainError((k == 2 ? std::string("sqrt") : std::string("cbrt")) +
                          " of a certifiably negative value: " +
                          x.description());
    Dyadic upper = q2 + Dyadic::pow2(-2); // x < upper
    if (upper <= Dyadic(1)) return newton_root(x, k);
    // Scale x into [0, 1] by 2^-j with j a multiple of k, then scale the
    // root back by 2^(j/k); both scalings are exact on oracles.
    std::int64_t j = ceil_log2(upper);
    j = ((j + k - 1) / k) * k;
    RealOracle reduced = oracle_mul_pow2(x, -j);
    return oracle_mul_pow2(newton_root(reduced, k), j / k);
}

} // namespace

RealOracle sqrt_oracle(const RealOracle& x) {
    return root_with_range_reduction(x, 2);
}

RealOracle cbrt_oracle(const RealOracle& x) {
    return root_with_range_reduction(x, 3);
}

} // namespace bitreal
