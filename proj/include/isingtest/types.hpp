#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace isingtest {

using Spin = std::int8_t;                      // -1 or +1
using SpinConfiguration = std::vector<Spin>;
using SpinView = std::span<const Spin>;

// Unordered node pairs (u < v) stored packed in row-major upper-triangle order.
constexpr std::size_t pair_count(int n) {
    return static_cast<std::size_t>(n) * (n - 1) / 2;
}

constexpr std::size_t pair_index(int n, int u, int v) {
    return static_cast<std::size_t>(u) * n - static_cast<std::size_t>(u) * (u + 1) / 2
           + (v - u - 1);
}

// Counter-based seed derivation: deriving (seed, i, j, k) yields a stream that
// does not depend on how many sibling streams exist.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

// Deterministic RNG wrapper. Uniform doubles and bounded ints are generated
// directly from the mt19937_64 stream so results do not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }

    // Uniform in {0, ..., bound-1}, bias-free by rejection.
    std::uint64_t uniform_below(std::uint64_t bound);

    int uniform_int(int bound) { return static_cast<int>(uniform_below(bound)); }

    bool coin() { return (gen_() >> 63) != 0; }

    Spin random_spin() { return coin() ? Spin{1} : Spin{-1}; }

private:
    std::mt19937_64 gen_;
};

}  // namespace isingtest
