#pragma once

#include <cstdint>

namespace bitreal::cost {

// Thread-local bit-operation meter. Arithmetic kernels charge it with a
// schoolbook cost model: add/compare charge the operand bit length, mul
// charges the product of bit lengths, division and integer roots charge
// quotient-bits times divisor-bits. The meter only ever increases; deltas
// around a computation give that computation's attributed cost.
std::uint64_t bit_ops();

void charge(std::uint64_t amount);

// Scoped delta reader: construct before a computation, read elapsed() after.
struct Meter {
    std::uint64_t start;
    Meter() : start(bit_ops()) {}
    std::uint64_t elapsed() const { return bit_ops() - start; }
};

} // namespace bitreal::cost
