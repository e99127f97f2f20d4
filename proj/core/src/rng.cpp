#include "dck/rng.hpp"

#include <cmath>
#include <numbers>

namespace dck {

double NormalStream::uniform(std::uint64_t counter) const noexcept {
    const std::uint64_t bits = mix64(key_ ^ mix64(counter));
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

double NormalStream::operator()(std::uint64_t index) const noexcept {
    const double u1 = uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace dck
