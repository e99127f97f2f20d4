#pragma once

// Independent reference values used by the unit and acceptance tests. Nothing
// here calls into the library: each oracle is a closed form or a brute-force
// computation in extended precision.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace dck::oracle {

/// Squared DC norm of exp(-gamma t): 2 beta (rho - gamma / (2 beta))^2 / (2 gamma - (4 rho + 2) beta).
inline double dc_exp_norm_sq(double beta, double rho, double gamma) {
    const double d = rho - gamma / (2.0 * beta);
    return 2.0 * beta * d * d / (2.0 * gamma - (4.0 * rho + 2.0) * beta);
}

/// Stable-spline (SS) kernel and its second-order spline parent, in long double.
inline long double ss_kernel_ld(long double alpha, long double t, long double s) {
    const long double hi = std::max(t, s);
    return std::exp(-alpha * (t + s)) * std::exp(-alpha * hi) / 2.0L - std::exp(-3.0L * alpha * hi) / 6.0L;
}

inline long double spline2_ld(long double tau, long double nu) {
    const long double lo = std::min(tau, nu);
    return tau * nu * lo / 2.0L - lo * lo * lo / 6.0L;
}

/// a(t, s) = int_0^s k_TC(t, tau) d tau for a unit step input; k_TC = exp(-2 beta max).
inline double tc_step_section(double beta, double t, double s) {
    const double et = std::exp(-2.0 * beta * t);
    if (s <= t) return s * et;
    return t * et + (et - std::exp(-2.0 * beta * s)) / (2.0 * beta);
}

/// A(t, s) = int_0^t int_0^s exp(-2 beta max(x, y)) dy dx.
inline double tc_step_output(double beta, double t, double s) {
    const double x = std::min(t, s);
    const double y = std::max(t, s);
    const double b2 = 2.0 * beta;
    const double square = 2.0 * (1.0 - std::exp(-b2 * x) * (1.0 + b2 * x)) / (b2 * b2);
    return square + x * (std::exp(-b2 * x) - std::exp(-b2 * y)) / b2;
}

/// Gauss-Jordan inverse with partial pivoting in long double; row-major n x n.
inline std::vector<double> gauss_jordan_inverse(const std::vector<double>& a, std::size_t n) {
    std::vector<long double> m(n * 2 * n, 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m[i * 2 * n + j] = a[i * n + j];
        m[i * 2 * n + n + i] = 1.0L;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::fabs(m[r * 2 * n + c]) > std::fabs(m[p * 2 * n + c])) p = r;
        }
        for (std::size_t j = 0; j < 2 * n; ++j) std::swap(m[c * 2 * n + j], m[p * 2 * n + j]);
        const long double piv = m[c * 2 * n + c];
        for (std::size_t j = 0; j < 2 * n; ++j) m[c * 2 * n + j] /= piv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const long double f = m[r * 2 * n + c];
            if (f == 0.0L) continue;
            for (std::size_t j = 0; j < 2 * n; ++j) m[r * 2 * n + j] -= f * m[c * 2 * n + j];
        }
    }
    std::vector<double> inv(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) inv[i * n + j] = static_cast<double>(m[i * 2 * n + n + j]);
    }
    return inv;
}

/// First ten values of Matlab's rand() from its default generator state,
/// rounded to four decimals as Matlab displays them.
inline constexpr std::array<double, 10> kMatlabDefaultRand = {0.8147, 0.9058, 0.1270, 0.9134, 0.6324,
                                                              0.0975, 0.2785, 0.5469, 0.9575, 0.9649};

/// Mercer tail for Spline1 at truncation M: sum_{i > M} 2 / ((i - 1/2)^2 pi^2) <= 2 / (pi^2 (M - 1/2)).
inline double spline1_tail(std::size_t m) {
    const double pi = 3.14159265358979323846;
    return 2.0 / (pi * pi * (static_cast<double>(m) - 0.5));
}

}  // namespace dck::oracle
