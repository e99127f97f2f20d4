#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dck/kernels.hpp"
#include "dck/mercer.hpp"
#include "dck/quadrature.hpp"

namespace dck {

/// A real function on [0, inf) together with its first derivative.
///
/// When no analytic derivative is given, derivative() falls back to a central
/// difference with relative step 1e-6 (one-sided near t = 0). Points where
/// the derivative jumps can be listed as kinks; integrals split there.
class FunctionHandle {
public:
    using Fn = std::function<double(double)>;

    explicit FunctionHandle(Fn value, Fn derivative = {}, std::optional<double> decay_hint = std::nullopt,
                            std::vector<double> kinks = {});

    /// sum_k c_k exp(-gamma_k t) with analytic derivative; the decay hint is the
    /// smallest gamma_k.
    [[nodiscard]] static FunctionHandle exp_sum(std::vector<std::pair<double, double>> coeff_rate);

    /// s -> k(t0, s) for a DC/TC kernel, kinked at s = t0.
    [[nodiscard]] static FunctionHandle kernel_section(const KernelSpec& spec, double t0);

    /// t -> f(exp(-2 beta t)) for f given on [0, 1] with derivative df.
    [[nodiscard]] static FunctionHandle pullback(Fn f, Fn df, double beta);

    [[nodiscard]] double operator()(double t) const { return value_(t); }
    [[nodiscard]] double derivative(double t) const;
    [[nodiscard]] double finite_difference(double t) const;
    [[nodiscard]] bool has_analytic_derivative() const noexcept { return static_cast<bool>(derivative_); }
    [[nodiscard]] std::optional<double> decay_hint() const noexcept { return decay_hint_; }
    [[nodiscard]] std::span<const double> kinks() const noexcept { return kinks_; }

    /// Largest |finite difference - analytic derivative| / (1 + |analytic|)
    /// over the given points; 0 when no analytic derivative is set.
    [[nodiscard]] double derivative_mismatch(std::span<const double> points) const;

private:
    Fn value_;
    Fn derivative_;
    std::optional<double> decay_hint_;
    std::vector<double> kinks_;
};

/// Squared RKHS norm computed by quadrature, or a divergence diagnostic.
struct NormResult {
    enum class Status { Converged, Diverged };

    Status status = Status::Converged;
    double value = 0.0;     ///< last estimate (meaningful only when converged)
    double previous = 0.0;  ///< estimate one refinement earlier
    int refinements = 0;
    std::string diagnostic;

    [[nodiscard]] bool converged() const noexcept { return status == Status::Converged; }
};

enum class Membership { FailsNecessary, PassesNecessary };

/// Necessary condition for exp(-gamma t) to belong to the RKHS:
/// TC: gamma > beta;  DC: gamma > (2 rho + 1) beta (= alpha).
/// Throws InputError for gamma <= 0 or a kernel outside the DC family.
[[nodiscard]] Membership membership_necessary_check(double gamma, const KernelSpec& spec);

/// ||g||^2 = int_0^inf 2 beta e^{(4 rho + 2) beta t} (g'(t) / (2 beta) + rho g(t))^2 dt,
/// evaluated on (0, 1] after tau = exp(-2 beta t) with adaptive grading
/// towards tau = 0. An analytic derivative is first checked against finite
/// differences at 10 points (InputError on mismatch). A decay hint failing
/// the necessary membership condition short-circuits to a diagnostic.
[[nodiscard]] NormResult dc_norm_integral(const FunctionHandle& g, const KernelSpec& spec,
                                          const QuadratureConfig& cfg = {});

/// ||g||^2 = int_0^inf e^{2 beta t} g'(t)^2 / (2 beta) dt for a TC kernel.
[[nodiscard]] NormResult tc_norm_integral(const FunctionHandle& g, const KernelSpec& spec,
                                          const QuadratureConfig& cfg = {});

/// Norm of f in the generalized first-order Sobolev space on [0, 1]:
/// int_0^1 (d/dtau (f(tau) / tau^rho))^2 dtau.
[[nodiscard]] NormResult genspline_norm_integral(const FunctionHandle::Fn& f, const FunctionHandle::Fn& df,
                                                 double rho, const QuadratureConfig& cfg = {});

struct SeriesNorm {
    double norm_sq = 0.0;               ///< sum_{i <= M} g_i^2 / lambda_i
    std::vector<double> coefficients;   ///< g_1 .. g_M
    std::vector<double> partial_sums;   ///< running value of the sum
};

/// Projects g onto psi_1 .. psi_M in L2(iota) and sums g_i^2 / lambda_i.
[[nodiscard]] SeriesNorm dc_norm_series(const FunctionHandle& g, const EigenSystem& sys, std::size_t truncation,
                                        const QuadratureConfig& cfg = {});

}  // namespace dck
