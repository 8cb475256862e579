#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "bitreal/dyadic.hpp"
#include "bitreal/interval.hpp"
#include "bitreal/oracle.hpp"
#include "bitreal/set_comp.hpp"

namespace bitreal {

// A machine for a real function f on a closed dyadic-endpoint interval,
// split into the two ingredients the evaluation protocol needs:
//   precision_map(n) — how precise an input approximation the machine wants
//   before it can answer at output precision n (nondecreasing in n), and
//   kernel(q, n)     — the dyadic computation on that approximation.
// Correctness contract: for every x in domain and every dyadic q with
// |x - q| < 2^-precision_map(n), |kernel(q, n) - f(x)| < 2^-n. The contract
// implies an effective modulus of continuity: inputs within 2^-pm(t) give
// outputs within 2*2^-t, which is what graph sampling relies on.
class FuncMachine {
  public:
    using PrecisionMap = std::function<std::int64_t(std::int64_t)>;
    using Kernel = std::function<Dyadic(const Dyadic&, std::int64_t)>;

    FuncMachine() = default;
    static FuncMachine make(std::string description, DyInterval domain,
                            PrecisionMap pm, Kernel kernel);

    std::int64_t precision_map(std::int64_t n) const; // n < 0 treated as 0
    Dyadic kernel(const Dyadic& q, std::int64_t n) const;
    const DyInterval& domain() const;
    const std::string& description() const;
    bool valid() const { return static_cast<bool>(state_); }

  private:
    struct State;
    std::shared_ptr<State> state_;
};

// Run the machine against an input oracle: kernel(phi.query(pm(n)), n).
// A probe at precision 5 rejects oracles that certifiably represent a point
// outside the domain (an oracle can only witness membership up to its
// precision, so the test allows 2^-5 slack and never rejects a valid
// in-domain oracle).
Dyadic apply(const FuncMachine& M, const RealOracle& phi, std::int64_t n);

// Machine for f o g: precision_map(n) = Mg.pm(Mf.pm(n) + 1) and the kernels
// chain with one guard bit. Precondition (the caller's obligation): the
// range of g lies inside Mf.domain. A sweep of Mg over its domain at output
// precision 3 certifies this up to the unavoidable 2^-3 slack — it never
// rejects a composition whose true range is contained, and rejects anything
// whose range escapes by more than the slack.
FuncMachine compose(const FuncMachine& Mf, const FuncMachine& Mg);

// Stock machines.
FuncMachine identity_machine(const DyInterval& domain);
FuncMachine const_machine(const Dyadic& v, const DyInterval& domain);
// g(x) = 1 - x^3 on [0,1]: precision_map(n) = n+2, kernel rounds 1 - q^3 to
// the 2^-(n+2) grid (slope bound 3 plus the rounding step stay under 2^-n).
FuncMachine g_machine();
// x^(1/3) and x^(1/2) on [0,1]: precision_map(n) = k*(n+2) via the Holder
// estimate |a^(1/k) - b^(1/k)| <= |a - b|^(1/k); kernel is the certified
// Newton root.
FuncMachine cuberoot_machine();
FuncMachine sqrt_machine();
// e^x on [-1,1]: precision_map(n) = n+4, kernel sums the Taylor series to
// within 2^-(n+2) — same budget as the oracle version.
FuncMachine exp_machine();
// e^x - 1 on [-1, 1/2]: precision_map(t) = t+3. Composing exp with this
// machine gives precision_map(n) = n+8 for x -> e^(e^x - 1).
FuncMachine expm1_machine();

// Distance oracle for the graph {(x, f(x)) : x in M.domain} as a planar
// set. Branch-and-bound over x-cells: a cell C evaluated at output
// precision t encloses its graph piece in C x [v - 2^-t, v + 2^-t]
// (the kernel contract applied to the cell midpoint), giving exact lower
// bounds and certified upper bounds that shrink until the requested
// tolerance is met. Exceeding max_cells raises an error ("tolerance
// unreachable within configured sample budget").
DistOracle graph_distance(const FuncMachine& M,
                          std::size_t max_cells = (std::size_t(1) << 18));

// Exact distance oracle for the clipped step-function graph
// {(x,0) : x < 0} union {(x,1) : x >= 0} — two horizontal pieces, no
// vertical connector (the jump gap is part of the geometry). Distances are
// computed to the closures of the clipped pieces, which leaves the distance
// function unchanged. The clip window must meet at least one piece.
DistOracle step_graph(const Box2& clip);

} // namespace bitreal
