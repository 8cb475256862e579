#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "bitreal/dyadic.hpp"

namespace bitreal {

// A computable real presented as a precision oracle: query(n) returns a
// dyadic q with |q - x| < 2^-n (strict). Queries are memoized so repeated
// query(n) is bit-identical, and an answer cached at precision m >= n is
// reused for n (it is valid there too). Reading an answer at precision n
// charges at least max(n, 1) bit operations to the cost meter; per-oracle
// query and bit-operation counters never undercount.
class RealOracle {
  public:
    using Kernel = std::function<Dyadic(std::int64_t)>;

    RealOracle() = default;
    static RealOracle make(std::string description, Kernel kernel);

    // |query(n) - x| < 2^-n; n < 0 is treated as 0. Thread-safe; answers
    // behave as if queries were serialized.
    Dyadic query(std::int64_t n) const;

    const std::string& description() const;
    std::uint64_t query_count() const;
    std::uint64_t bit_ops_attributed() const;
    bool valid() const { return static_cast<bool>(state_); }

  private:
    struct State;
    std::shared_ptr<State> state_;
};

// Exact embeddings and ring arithmetic on oracles. Budgets (all proved in
// the implementation): from_dyadic answers round_to(q, n+1); add/sub query
// operands at n+2; mul queries each operand at n + 2 + ceil_log2(1 + bound
// on the other), the bound coming from a certified precision-1 probe.
RealOracle oracle_from_dyadic(const Dyadic& q);
RealOracle oracle_add(const RealOracle& a, const RealOracle& b);
RealOracle oracle_sub(const RealOracle& a, const RealOracle& b);
RealOracle oracle_mul(const RealOracle& a, const RealOracle& b);
RealOracle oracle_neg(const RealOracle& a);
// Exact scaling by 2^k: query(n) = a.query(n + k) * 2^k.
RealOracle oracle_mul_pow2(const RealOracle& a, std::int64_t k);

// Reciprocal and division. The divisor is probed at precisions k = 1, 2, 4,
// ... up to max_probe until |b.query(k)| > 2*2^-k certifies separation from
// zero; failing that raises SeparationError ("cannot separate divisor from
// zero at precision <max_probe>") — division gets harder the closer the
// divisor is to its singularity.
RealOracle oracle_inv(const RealOracle& b, std::int64_t max_probe = 64);
RealOracle oracle_div(const RealOracle& a, const RealOracle& b,
                      std::int64_t max_probe = 64);

// e^x for x in [-1, 1], enforced by a precision-5 probe with slack 2^-4
// (an oracle can only witness membership up to its precision; the Taylor
// error constants are re-derived for |x| <= 1 + 2^-4). query(n) fetches
// q = x.query(n+4) and evaluates the Taylor partial sum to within 2^-(n+2).
RealOracle exp_oracle(const RealOracle& x);

// x^(1/k) for k in {2, 3} and x in [0, 1]. A precision-4 probe picks the
// branch: if x >= 1/8 is certified, the operand is read at n+3 (Lipschitz
// region); otherwise at k*(n+2) (Holder estimate |a^(1/k) - b^(1/k)| <=
// |a - b|^(1/k)); the dyadic root itself comes from newton_kth_root.
RealOracle newton_root(const RealOracle& x, int k);

// Named constants: pi (arctangent series with exact rational partial sums
// and alternating-tail bounds, cross-checkable against an independent
// second series), e (factorial series with tail bound), sqrt2 (via
// newton_root on 1/2), one_third (binary expansion 0.010101...).
enum class ConstName { pi, e, sqrt2, one_third };
RealOracle const_oracle(ConstName name);
// Independent second series for pi (different arctangent decomposition);
// exists so pi can be cross-checked, not aliased.
RealOracle pi_oracle_second_series();

// sqrt/cbrt on [0, infinity): range-reduces x into [0, 1] by an exact
// power-of-two scaling chosen from a certified upper bound, then applies
// newton_root and scales back. Certifiably negative input is an error.
RealOracle sqrt_oracle(const RealOracle& x);
RealOracle cbrt_oracle(const RealOracle& x);

// Taylor partial sum for e^q on |q| <= 17/16: |result - e^q| < 2^-s.
// Terms are rounded to O(s) bits so the schoolbook bit cost stays cubic
// in s; the term count grows linearly in s ("n+1 terms" flavor).
Dyadic exp_taylor_eval(const Dyadic& q, std::int64_t s);

} // namespace bitreal
