#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace dck {

/// Composite Gauss-Legendre settings shared by every integral in the library.
struct QuadratureConfig {
    int panels = 512;             ///< uniform panels on [0, 1]
    int graded_panels = 64;       ///< geometric panels packed into the first uniform panel
    double grading_ratio = 0.7;   ///< ratio between consecutive graded panel widths
    double tolerance = 1e-8;      ///< relative agreement required between refinements
    int max_refinements = 5;      ///< doublings tried before reporting non-convergence
    int convolution_panels = 4;   ///< panels per smooth segment of a convolution integral

    /// Throws InputError on non-positive counts or a ratio outside (0, 1).
    void validate() const;

    /// Same settings with every panel count doubled `levels` times.
    [[nodiscard]] QuadratureConfig refined(int levels = 1) const;
};

/// 8-point Gauss-Legendre rule on [-1, 1].
[[nodiscard]] std::span<const double> gauss_legendre_nodes();
[[nodiscard]] std::span<const double> gauss_legendre_weights();

/// Panel edges covering [0, 1]: `panels` uniform panels, every point of
/// `breaks` lying strictly inside (0, 1) inserted as an extra edge, and, when
/// `graded_at_zero`, the first uniform panel [0, h] subdivided geometrically
/// at h r, h r^2, ..., h r^G. Edges below the smallest normal double are
/// dropped, so the innermost panel always starts at 0.
[[nodiscard]] std::vector<double> unit_panel_edges(const QuadratureConfig& cfg, std::span<const double> breaks,
                                                   bool graded_at_zero);

/// Edges on [a, b] after splitting at `breaks` (those strictly inside) and
/// dividing each resulting segment into `panels_per_segment` equal panels.
[[nodiscard]] std::vector<double> interval_panel_edges(double a, double b, int panels_per_segment,
                                                       std::span<const double> breaks);

/// Gauss-Legendre approximation of the integral of f over [a, b].
template <class F>
double integrate_panel(F&& f, double a, double b) {
    const auto x = gauss_legendre_nodes();
    const auto w = gauss_legendre_weights();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) sum += w[k] * f(mid + half * x[k]);
    return half * sum;
}

/// Sum of integrate_panel over consecutive edges.
template <class F>
double integrate_panels(std::span<const double> edges, F&& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) sum += integrate_panel(f, edges[i], edges[i + 1]);
    return sum;
}

/// Outcome of an adaptive integral over (0, 1] whose integrand may be
/// singular at 0.
struct AdaptiveEstimate {
    double value = 0.0;      ///< estimate at the last level
    double previous = 0.0;   ///< estimate at the level before
    double innermost = 0.0;  ///< contribution of the panel touching 0 at the last level
    int levels = 0;          ///< number of refinements performed
    bool converged = false;
};

/// Integrates f over (0, 1] on graded layouts, doubling the resolution until
/// two successive estimates agree to cfg.tolerance (relative) and the panel
/// touching 0 contributes less than cfg.tolerance of the total. Integrands
/// that are not integrable at 0 never satisfy both and come back with
/// converged == false after cfg.max_refinements doublings.
template <class F>
AdaptiveEstimate integrate_unit_adaptive(F&& f, std::span<const double> breaks, const QuadratureConfig& cfg) {
    auto level_estimate = [&](const QuadratureConfig& c, double& innermost) {
        const auto edges = unit_panel_edges(c, breaks, true);
        innermost = integrate_panel(f, edges[0], edges[1]);
        return integrate_panels(edges, f);
    };
    AdaptiveEstimate est;
    est.value = level_estimate(cfg, est.innermost);
    for (int level = 1; level <= cfg.max_refinements; ++level) {
        est.previous = est.value;
        est.value = level_estimate(cfg.refined(level), est.innermost);
        est.levels = level;
        if (!std::isfinite(est.value)) break;
        const double scale = std::abs(est.value);
        if (std::abs(est.value - est.previous) <= cfg.tolerance * scale &&
            std::abs(est.innermost) <= cfg.tolerance * scale) {
            est.converged = true;
            break;
        }
    }
    return est;
}

}  // namespace dck
