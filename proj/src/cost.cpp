#include "bitreal/cost.hpp"

namespace bitreal::cost {

namespace {
thread_local std::uint64_t t_bit_ops = 0;
}

std::uint64_t bit_ops() { return t_bit_ops; }

void charge(std::uint64_t amount) { t_bit_ops += amount; }

} // namespace bitreal::cost
