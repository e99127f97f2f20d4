#pragma once

#include <cstdint>

namespace dck {

/// SplitMix64 finalizer; bijective on 64-bit words.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based standard normal variates.
///
/// Variate `index` of stream `stream` is a pure function of
/// (seed, stream, index): batches can be generated in any order or
/// concurrently and still reproduce the same numbers. Uniforms come from
/// hashing the counter, normals from Box-Muller (no rejection).
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept : key_(mix64(seed ^ mix64(stream))) {}

    [[nodiscard]] double operator()(std::uint64_t index) const noexcept;

    /// Uniform on (0, 1].
    [[nodiscard]] double uniform(std::uint64_t counter) const noexcept;

private:
    std::uint64_t key_;
};

}  // namespace dck
