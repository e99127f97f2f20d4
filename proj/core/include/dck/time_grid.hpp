#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dck {

/// Strictly increasing sample instants together with the implicit anchored
/// boundary of the process living on them.
///
/// Unit01:   0 < tau_1 < ... < tau_n <= 1, anchored at tau_0 = 0 (f(0) = 0).
/// HalfLine: 0 <= t_0 < ... < t_{n-1} < inf, anchored at t_n = inf (g(inf) = 0).
class TimeGrid {
public:
    enum class Domain { Unit01, HalfLine };

    [[nodiscard]] static TimeGrid unit(std::vector<double> points);
    [[nodiscard]] static TimeGrid half_line(std::vector<double> points);

    /// n points spaced evenly on [first, last] (first when n == 1).
    [[nodiscard]] static TimeGrid uniform(Domain domain, double first, double last, std::size_t n);

    [[nodiscard]] Domain domain() const noexcept { return domain_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
    [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
    [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }

private:
    TimeGrid(Domain domain, std::vector<double> points) : domain_(domain), points_(std::move(points)) {}

    Domain domain_;
    std::vector<double> points_;
};

/// Throws InputError unless the points are finite and strictly increasing.
void require_strictly_increasing(std::span<const double> points, const char* what);

}  // namespace dck
