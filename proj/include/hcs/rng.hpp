#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace hcs {

/// Seeded generator with fully specified derived draws. The engine output is
/// pinned by the standard; the standard distributions are not, so bounded
/// integers and uniforms are derived here to keep schedules bit-identical
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// k distinct indices from [0, n), ascending. Partial Fisher-Yates.
    std::vector<std::size_t> sample(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
};

/// Round half to even.
std::size_t round_count(double x);

}  // namespace hcs
