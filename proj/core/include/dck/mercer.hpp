#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dck/kernels.hpp"
#include "dck/quadrature.hpp"

namespace dck {

/// Measure under which an eigen-system is orthonormal.
///
///   Lebesgue01:  d nu on [0, 1]
///   PowerWeight: nu^(-2 rho) d nu on [0, 1]
///   ExpWeight:   2 beta exp(2 beta (2 rho - 1) t) dt on [0, inf)
struct Measure {
    enum class Kind { Lebesgue01, PowerWeight, ExpWeight };

    Kind kind = Kind::Lebesgue01;
    double beta = 0.0;
    double rho = 0.0;

    [[nodiscard]] double density(double x) const;
    [[nodiscard]] double log_density(double x) const;
};

/// Analytic Mercer eigen-system shared by the first-order spline family.
///
/// All three kernels have eigenvalues 1 / ((i - 1/2)^2 pi^2). Eigenfunctions,
/// with phi_i(tau) = sqrt(2) sin((i - 1/2) pi tau):
///
///   Spline1          phi_i(tau)
///   GenSpline1(rho)  tau^rho phi_i(tau)
///   DC(alpha, beta)  psi_i(t) = e^(-2 beta rho t) phi_i(e^(-2 beta t)),
///                    rho = (alpha - beta) / (2 beta)
///
/// Indices are 1-based.
class EigenSystem {
public:
    static constexpr std::size_t kDefaultTruncation = 1000;

    /// Throws InputError for kernels other than Spline1, GenSpline1, DC and TC
    /// (TC is handled as DC with rho = 0), or for truncation == 0.
    explicit EigenSystem(const KernelSpec& kernel, std::size_t truncation = kDefaultTruncation);

    [[nodiscard]] const KernelSpec& kernel() const noexcept { return kernel_; }
    [[nodiscard]] std::size_t truncation() const noexcept { return truncation_; }
    [[nodiscard]] const Measure& measure() const noexcept { return measure_; }
    [[nodiscard]] bool on_half_line() const noexcept { return measure_.kind == Measure::Kind::ExpWeight; }

    [[nodiscard]] EigenSystem with_truncation(std::size_t truncation) const { return EigenSystem(kernel_, truncation); }

private:
    KernelSpec kernel_;
    std::size_t truncation_;
    Measure measure_;
};

/// 1 / ((i - 1/2)^2 pi^2); throws InputError for i == 0.
[[nodiscard]] double eigenvalue(std::size_t i);

/// i-th eigenfunction of the system at x (domain-checked).
[[nodiscard]] double eigenfunction(const EigenSystem& sys, std::size_t i, double x);

/// sum_{i <= M} lambda_i e_i(t) e_i(s), M = sys.truncation().
[[nodiscard]] double truncated_expansion(const EigenSystem& sys, double t, double s);

/// Rows: points; columns: e_1 .. e_M evaluated there.
[[nodiscard]] Eigen::MatrixXd eigenfunction_table(const EigenSystem& sys, std::span<const double> points);

/// Truncated expansion on points x points, computed from one eigenfunction table.
[[nodiscard]] Eigen::MatrixXd truncated_expansion_matrix(const EigenSystem& sys, std::span<const double> points);

/// Integral operator of the kernel applied to e_i, evaluated at x under the
/// system's measure. Half-line integrals are mapped to (0, 1] through
/// nu = exp(-2 beta s); every integral is split at the image of x.
/// Throws QuadratureError when the result moves by more than cfg.tolerance
/// under one refinement.
[[nodiscard]] double apply_integral_operator(const EigenSystem& sys, std::size_t i, double x,
                                             const QuadratureConfig& cfg = {});

/// max over probes of |(L e_i)(x) - lambda_i e_i(x)|.
[[nodiscard]] double verify_eigen_equation(const EigenSystem& sys, std::size_t i, std::span<const double> probes,
                                           const QuadratureConfig& cfg = {});

/// Integral of e_i e_j against the system's measure; ~ delta_ij.
[[nodiscard]] double verify_orthonormality(const EigenSystem& sys, std::size_t i, std::size_t j,
                                           const QuadratureConfig& cfg = {});

/// Gram matrix of e_1 .. e_count under the measure.
[[nodiscard]] Eigen::MatrixXd orthonormality_gram(const EigenSystem& sys, std::size_t count,
                                                  const QuadratureConfig& cfg = {});

/// Coefficients <g, e_i> in L2(measure) for i = 1 .. count. `breaks` are
/// points (in the system's own coordinate) where g is not smooth.
[[nodiscard]] std::vector<double> project_onto_eigenfunctions(const EigenSystem& sys,
                                                              const std::function<double(double)>& g,
                                                              std::size_t count, const QuadratureConfig& cfg = {},
                                                              std::span<const double> breaks = {});

/// 2 / (pi^2 (M - 1/2)): bound on the Spline1 truncation error sum_{i>M} 2 lambda_i.
[[nodiscard]] double spline1_tail_bound(std::size_t truncation);

}  // namespace dck
