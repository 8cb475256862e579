#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gmpxx.h>

#include <atomic>
#include <cstdint>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "bitreal/cost.hpp"
#include "bitreal/dyadic.hpp"
#include "bitreal/error.hpp"
#include "bitreal/oracle.hpp"
#include "support.hpp"

using namespace bitreal;
using testsup::adversarial_oracle;
using testsup::biased_oracle;
using testsup::pow2q;

namespace {

// |oracle value at n  -  exact| < 2^-n, checked in exact rational arithmetic.
bool within(const Dyadic& got, const mpq_class& exact, std::int64_t n) {
    return abs(got.to_mpq() - exact) < pow2q(-n);
}

// An oracle that records every precision it is asked for.
RealOracle recording_oracle(const mpq_class& value,
                            std::shared_ptr<std::vector<std::int64_t>> log) {
    return RealOracle::make("recording", [value, log](std::int64_t n) {
        log->push_back(n);
        return dyadic_from_mpq_nearest(value, n + 1);
    });
}

} // namespace

TEST_CASE("oracle from dyadic answers within every band") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 1000; ++it) {
        std::uniform_int_distribution<long> md(-4000, 4000);
        std::uniform_int_distribution<int> ed(-20, 10);
        std::uniform_int_distribution<std::int64_t> nd(0, 60);
        Dyadic q(mpz_class(md(rng)), ed(rng));
        RealOracle x = oracle_from_dyadic(q);
        std::int64_t n = nd(rng);
        Dyadic a = x.query(n);
        CHECK(within(a, q.to_mpq(), n));
        CHECK(a == x.query(n)); // deterministic
    }
    RealOracle half = oracle_from_dyadic(Dyadic(1, -1));
    CHECK(half.query(3) == Dyadic(1, -1)); // rounding a dyadic to finer grid is exact
    CHECK(half.query(-5) == half.query(-5));
}

TEST_CASE("negative precision requests are clamped and still valid") {
    RealOracle x = adversarial_oracle(mpq_class(7, 3), 99);
    Dyadic a = x.query(-10);
    // Treated as n = 0: must be within 2^0 of 7/3.
    CHECK(abs(a.to_mpq() - mpq_class(7, 3)) < 1);
}

TEST_CASE("sum difference product against exact rationals under adversarial oracles") {
    std::mt19937_64 rng(22);
    for (int it = 0; it < 300; ++it) {
        mpq_class va = testsup::random_rational(rng, mpq_class(-4), mpq_class(4));
        mpq_class vb = testsup::random_rational(rng, mpq_class(-4), mpq_class(4));
        RealOracle a = adversarial_oracle(va, 1000 + it);
        RealOracle b = adversarial_oracle(vb, 2000 + it);
        std::uniform_int_distribution<std::int64_t> nd(0, 60);
        std::int64_t n = nd(rng);
        CHECK(within(oracle_add(a, b).query(n), va + vb, n));
        CHECK(within(oracle_sub(a, b).query(n), va - vb, n));
        CHECK(within(oracle_mul(a, b).query(n), va * vb, n));
        CHECK(within(oracle_neg(a).query(n), -va, n));
    }
}

TEST_CASE("simple arithmetic fixtures") {
    RealOracle h = oracle_from_dyadic(Dyadic(1, -1));
    RealOracle q = oracle_from_dyadic(Dyadic(1, -2));
    CHECK(within(oracle_add(h, q).query(10), mpq_class(3, 4), 10));

    // x - x with two independent adversarial oracles for the same value:
    // each is only accurate to its band, so the difference is near 0 but
    // the result must still be within 2^-n of 0.
    mpq_class v(355, 113);
    RealOracle x1 = adversarial_oracle(v, 5);
    RealOracle x2 = adversarial_oracle(v, 6);
    for (std::int64_t n : {4, 16, 40})
        CHECK(within(oracle_sub(x1, x2).query(n), mpq_class(0), n));
}

TEST_CASE("scaling by powers of two is exact on the underlying answers") {
    RealOracle x = adversarial_oracle(mpq_class(1, 3), 7);
    RealOracle y = oracle_mul_pow2(x, 5);
    for (std::int64_t n : {0, 8, 31})
        CHECK(within(y.query(n), mpq_class(32, 3), n));
    RealOracle z = oracle_mul_pow2(x, -6);
    CHECK(within(z.query(12), mpq_class(1, 192), 12));
}

TEST_CASE("reciprocal and division") {
    RealOracle two = oracle_from_dyadic(Dyadic(2));
    RealOracle inv2 = oracle_inv(two);
    for (std::int64_t n : {0, 10, 50})
        CHECK(within(inv2.query(n), mpq_class(1, 2), n));

    RealOracle zero = oracle_from_dyadic(Dyadic());
    CHECK_THROWS_AS(oracle_inv(zero), SeparationError);
    try {
        oracle_inv(zero);
    } catch (const SeparationError& e) {
        CHECK(std::string(e.what()).find("64") != std::string::npos);
    }

    // (x + 1) / (y - 1) with y = 1 + 2^-40: the divisor oracle only
    // separates from zero once probed past precision 40.
    RealOracle xo = oracle_from_dyadic(Dyadic(1, -1));
    RealOracle yo = oracle_from_dyadic(Dyadic(1) + Dyadic::pow2(-40));
    RealOracle num = oracle_add(xo, oracle_from_dyadic(Dyadic(1)));
    RealOracle den = oracle_sub(yo, oracle_from_dyadic(Dyadic(1)));
    RealOracle ratio = oracle_div(num, den);
    std::uint64_t probes = den.query_count();
    CHECK(probes >= 7); // probed at 1, 2, 4, 8, 16, 32, 64 before separating
    mpq_class exact = (mpq_class(1, 2) + 1) / pow2q(-40);
    CHECK(within(ratio.query(8), exact, 8));

    // With the probe ceiling below the separation scale, division must
    // refuse rather than guess.
    RealOracle den2 = oracle_sub(yo, oracle_from_dyadic(Dyadic(1)));
    CHECK_THROWS_AS(oracle_div(num, den2, 32), SeparationError);
}

TEST_CASE("exponential oracle: fixtures and operand precision") {
    RealOracle zero = oracle_from_dyadic(Dyadic());
    CHECK(within(exp_oracle(zero).query(10), mpq_class(1), 10));

    RealOracle one = oracle_from_dyadic(Dyadic(1));
    mpq_class e_ref = testsup::exact_exp(mpq_class(1), 80);
    CHECK(abs(exp_oracle(one).query(20).to_mpq() - e_ref) < pow2q(-20) + pow2q(-78));

    // The operand is read at precision n + 4: querying the result at 10
    // must hit the operand at exactly 14 (plus the construction probe at 5).
    auto log = std::make_shared<std::vector<std::int64_t>>();
    RealOracle rec = recording_oracle(mpq_class(1, 3), log);
    RealOracle ex = exp_oracle(rec);
    size_t after_probe = log->size();
    CHECK(after_probe >= 1);
    CHECK(log->back() == 5);
    ex.query(10);
    REQUIRE(log->size() == after_probe + 1);
    CHECK(log->back() == 14);

    // Out-of-range arguments are rejected up front, naming the offender.
    RealOracle big = oracle_from_dyadic(Dyadic(2));
    CHECK_THROWS_AS(exp_oracle(big), DomainError);

    // Validity across the whole domain against the exact Taylor reference.
    std::mt19937_64 rng(33);
    for (int it = 0; it < 60; ++it) {
        mpq_class v = testsup::random_rational(rng, mpq_class(-1), mpq_class(1));
        RealOracle x = adversarial_oracle(v, 4000 + it);
        std::uniform_int_distribution<std::int64_t> nd(0, 48);
        std::int64_t n = nd(rng);
        mpq_class ref = testsup::exact_exp(v, n + 20);
        CHECK(abs(exp_oracle(x).query(n).to_mpq() - ref)
              < pow2q(-n) + pow2q(-(n + 18)));
    }
}

TEST_CASE("root oracle: fixtures and random bracketing") {
    RealOracle one = oracle_from_dyadic(Dyadic(1));
    CHECK(within(newton_root(one, 2).query(30), mpq_class(1), 30));

    RealOracle eighth = oracle_from_dyadic(Dyadic(1, -3));
    CHECK(within(newton_root(eighth, 3).query(30), mpq_class(1, 2), 30));

    std::mt19937_64 rng(44);
    for (int it = 0; it < 200; ++it) {
        mpq_class v = testsup::random_rational(rng, mpq_class(0), mpq_class(1));
        int k = (it % 2) ? 2 : 3;
        std::uniform_int_distribution<std::int64_t> nd(0, 50);
        std::int64_t n = nd(rng);
        RealOracle x = adversarial_oracle(v, 5000 + it);
        mpq_class ans = newton_root(x, k).query(n).to_mpq();
        // |ans - v^(1/k)| < 2^-n, checked by exact k-th powers.
        mpq_class up = ans + pow2q(-n);
        mpq_class dn = ans - pow2q(-n);
        mpq_class upk = up, dnk = dn;
        for (int j = 1; j < k; ++j) {
            upk *= up;
            dnk *= dn;
        }
        CHECK(v < upk);
        CHECK((dn < 0 || v > dnk));
    }

    RealOracle neg = oracle_from_dyadic(Dyadic(-1));
    CHECK_THROWS_AS(newton_root(neg, 2), DomainError);
}

TEST_CASE("square root and cube root with range reduction") {
    RealOracle nine4 = oracle_from_dyadic(Dyadic(9, -2));
    CHECK(within(sqrt_oracle(nine4).query(40), mpq_class(3, 2), 40));

    RealOracle v27 = oracle_from_dyadic(Dyadic(27));
    CHECK(within(cbrt_oracle(v27).query(40), mpq_class(3), 40));

    std::mt19937_64 rng(55);
    for (int it = 0; it < 80; ++it) {
        mpq_class v = testsup::random_rational(rng, mpq_class(0), mpq_class(100));
        RealOracle x = adversarial_oracle(v, 6000 + it);
        std::uniform_int_distribution<std::int64_t> nd(0, 40);
        std::int64_t n = nd(rng);
        int k = (it % 2) ? 2 : 3;
        RealOracle r = (k == 2) ? sqrt_oracle(x) : cbrt_oracle(x);
        mpq_class ans = r.query(n).to_mpq();
        mpq_class up = ans + pow2q(-n);
        mpq_class dn = ans - pow2q(-n);
        mpq_class upk = up, dnk = dn;
        for (int j = 1; j < k; ++j) {
            upk *= up;
            dnk *= dn;
        }
        CHECK(v < upk);
        CHECK((dn < 0 || v > dnk));
    }

    RealOracle negq = oracle_from_dyadic(Dyadic(-1));
    CHECK_THROWS_AS(sqrt_oracle(negq), DomainError);
}

TEST_CASE("one third constant has the alternating bit pattern") {
    RealOracle ot = const_oracle(ConstName::one_third);
    for (int m = 1; m <= 8; ++m) {
        std::int64_t n = 2 * m;
        Dyadic q = ot.query(n);
        // floor(2^(n+1)/3) = (2^(n+1) - 2)/3 for odd n+1,
        // i.e. mantissa bits 010101...01 over n+1 fractional bits.
        mpz_class mant = ((mpz_class(1) << static_cast<unsigned>(n + 1)) - 2) / 3;
        mpq_class expect(mant, mpz_class(1) << static_cast<unsigned>(n + 1));
        expect.canonicalize();
        CHECK(q.to_mpq() == expect);
        CHECK(abs(q.to_mpq() - mpq_class(1, 3)) < pow2q(-n));
    }
}

TEST_CASE("pi from two different arctangent decompositions agrees") {
    RealOracle p1 = const_oracle(ConstName::pi);
    RealOracle p2 = pi_oracle_second_series();
    for (std::int64_t n : {4, 12, 28, 48})
        CHECK(abs(p1.query(n).to_mpq() - p2.query(n).to_mpq()) < 2 * pow2q(-n));

    // Independent in-test reference: Machin formula with an explicit term
    // count whose alternating-series tail is far below the target.
    auto atanq = [](long invm, int terms) {
        mpq_class s(0), p(1, invm);
        mpq_class m2 = mpq_class(1, invm) * mpq_class(1, invm);
        for (int j = 0; j < terms; ++j) {
            mpq_class term = p / (2 * j + 1);
            s += (j % 2 == 0) ? term : -term;
            p *= m2;
        }
        return s;
    };
    mpq_class ref = 16 * atanq(5, 40) - 4 * atanq(239, 40);
    CHECK(abs(p1.query(40).to_mpq() - ref) < pow2q(-40) + pow2q(-90));
}

TEST_CASE("e agrees with the factorial series and with exp at one") {
    RealOracle e = const_oracle(ConstName::e);
    mpq_class ref = testsup::exact_exp(mpq_class(1), 80);
    CHECK(abs(e.query(30).to_mpq() - ref) < pow2q(-30) + pow2q(-78));

    RealOracle one = oracle_from_dyadic(Dyadic(1));
    RealOracle e2 = exp_oracle(one);
    for (std::int64_t n : {6, 18, 36})
        CHECK(abs(e.query(n).to_mpq() - e2.query(n).to_mpq()) < 2 * pow2q(-n));
}

TEST_CASE("square root of two squares back to two") {
    RealOracle s = const_oracle(ConstName::sqrt2);
    for (std::int64_t n : {4, 16, 40}) {
        mpq_class a = s.query(n).to_mpq();
        CHECK((a + pow2q(-n)) * (a + pow2q(-n)) > 2);
        CHECK((a - pow2q(-n)) * (a - pow2q(-n)) < 2);
    }
}

TEST_CASE("answers do not leak oracle wobble beyond the contract") {
    // Two valid oracles for the same x biased to opposite band edges: any
    // derived oracle's answers may differ, but each stays within its own
    // band, so they agree to within 2 * 2^-n.
    mpq_class v(5, 7);
    RealOracle hi = biased_oracle(v, +1);
    RealOracle lo = biased_oracle(v, -1);
    for (std::int64_t n : {6, 20, 40}) {
        Dyadic a = exp_oracle(hi).query(n);
        Dyadic b = exp_oracle(lo).query(n);
        CHECK(abs(a.to_mpq() - b.to_mpq()) < 2 * pow2q(-n));
    }
}

TEST_CASE("memoization: repeated and dominated queries reuse stored answers") {
    auto log = std::make_shared<std::vector<std::int64_t>>();
    RealOracle x = recording_oracle(mpq_class(2, 7), log);

    Dyadic a10 = x.query(10);
    size_t calls = log->size();
    CHECK(x.query(10) == a10);
    CHECK(log->size() == calls); // exact repeat: no new kernel call

    Dyadic a20 = x.query(20);
    calls = log->size();
    Dyadic a5 = x.query(5);
    CHECK(log->size() == calls); // 5 is dominated by stored 20: reuse
    CHECK(abs(a5.to_mpq() - mpq_class(2, 7)) < pow2q(-5));
    CHECK(a5 == x.query(5)); // pinned: stays identical afterwards
    CHECK(x.query_count() >= 4);
}

TEST_CASE("query cost grows with precision") {
    std::vector<std::uint64_t> costs;
    for (std::int64_t n : {8, 16, 32, 64}) {
        RealOracle p = const_oracle(ConstName::pi);
        cost::Meter m;
        p.query(n);
        costs.push_back(m.elapsed());
    }
    for (size_t i = 1; i < costs.size(); ++i) CHECK(costs[i] >= costs[i - 1]);
    CHECK(costs[0] > 0);

    // Reading an oracle is never free, even at precision zero.
    RealOracle z = oracle_from_dyadic(Dyadic(3));
    cost::Meter m;
    z.query(0);
    CHECK(m.elapsed() >= 1);
    CHECK(z.bit_ops_attributed() >= 1);
}

TEST_CASE("concurrent queries return consistent answers") {
    RealOracle one = oracle_from_dyadic(Dyadic(1));
    RealOracle ex = exp_oracle(one);
    std::vector<std::thread> ts;
    std::vector<Dyadic> out(8);
    for (int i = 0; i < 8; ++i)
        ts.emplace_back([&, i] { out[i] = ex.query(16 + (i % 3) * 8); });
    for (auto& t : ts) t.join();
    for (int i = 0; i < 8; ++i) CHECK(out[i] == ex.query(16 + (i % 3) * 8));
}
