#include "dck/time_grid.hpp"

#include <cmath>
#include <sstream>

#include "dck/error.hpp"

namespace dck {

void require_strictly_increasing(std::span<const double> points, const char* what) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i])) {
            std::ostringstream os;
            os << what << ": point " << i << " is not finite";
            throw InputError(os.str());
        }
        if (i > 0 && !(points[i] > points[i - 1])) {
            std::ostringstream os;
            os << what << ": points must be strictly increasing (index " << i << ": " << points[i - 1]
               << " -> " << points[i] << ")";
            throw InputError(os.str());
        }
    }
}

TimeGrid TimeGrid::unit(std::vector<double> points) {
    require_strictly_increasing(points, "unit grid");
    if (!points.empty() && (!(points.front() > 0.0) || points.back() > 1.0)) {
        throw InputError("unit grid: points must satisfy 0 < tau_1 and tau_n <= 1");
    }
    return {Domain::Unit01, std::move(points)};
}

TimeGrid TimeGrid::half_line(std::vector<double> points) {
    require_strictly_increasing(points, "half-line grid");
    if (!points.empty() && points.front() < 0.0) {
        throw InputError("half-line grid: points must be >= 0");
    }
    return {Domain::HalfLine, std::move(points)};
}

TimeGrid TimeGrid::uniform(Domain domain, double first, double last, std::size_t n) {
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = n == 1 ? first : first + (last - first) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return domain == Domain::Unit01 ? unit(std::move(pts)) : half_line(std::move(pts));
}

}  // namespace dck
