#pragma once

#include <cstdint>
#include <utility>

namespace bellmono {

// Stateless counter-based generator. Every draw is a pure function of
// (seed, stream, counter), so a sample's random numbers do not depend on
// which worker produces it or in what order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next_u64() noexcept;
    // Uniform on the open interval (0, 1).
    double next_uniform() noexcept;
    // Pair of independent standard normals (Box-Muller).
    std::pair<double, double> next_normal_pair() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace bellmono
