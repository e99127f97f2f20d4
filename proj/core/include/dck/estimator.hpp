#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "dck/kernels.hpp"
#include "dck/quadrature.hpp"

namespace dck {

/// Zero-order hold: u(t) = values[k] on [times[k], times[k+1]), the last value
/// held forever, and u(t) = 0 before times[0] (and for t < 0).
struct SampledZOH {
    std::vector<double> times;
    std::vector<double> values;
};

/// Dirac impulse at t = 0.
struct ImpulseInput {};

/// Unit step at t = 0.
struct StepInput {};

/// u(t) = sum_k c_k exp(-gamma_k t) for t >= 0; pairs are (c_k, gamma_k).
struct ExpSumInput {
    std::vector<std::pair<double, double>> terms;
};

using InputSignal = std::variant<SampledZOH, ImpulseInput, StepInput, ExpSumInput>;

/// Measured outputs y(t_j) of an LTI system driven by a known input.
struct Dataset {
    std::vector<double> output_times;
    Eigen::VectorXd outputs;
    InputSignal input;
    double noise_variance = 0.0;

    /// Throws InputError on non-increasing or negative times, length
    /// mismatch, a negative noise variance or a malformed input.
    void validate() const;
};

/// a(t, s) = int_0^s k(t, tau) u(s - tau) d tau and the output Gram matrix
/// A_ij = int_0^{t_i} a(tau, t_j) u(t_i - tau) d tau.
///
/// Integrals use composite Gauss-Legendre, split at the kernel kink and at
/// every input discontinuity. Smooth segments get cfg.convolution_panels
/// panels; hold intervals of a sampled input get one panel per 4 of them.
class ConvolutionModel {
public:
    ConvolutionModel(KernelSpec spec, Dataset data, QuadratureConfig cfg = {});

    [[nodiscard]] const KernelSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const Dataset& data() const noexcept { return data_; }
    [[nodiscard]] const QuadratureConfig& quadrature() const noexcept { return cfg_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.output_times.size(); }

    /// a(t, t_j), the j-th representer section evaluated at t >= 0.
    [[nodiscard]] double section(double t, std::size_t j) const;

    /// a(t, s) for arbitrary s >= 0.
    [[nodiscard]] double section_at(double t, double s) const;

    /// A on the output times; exactly the kernel Gram matrix for an impulse.
    [[nodiscard]] Eigen::MatrixXd output_gram() const;

    /// Predicted output sum_j c_j A(t, t_j) at an arbitrary time t.
    [[nodiscard]] double predicted_output(double t, const Eigen::VectorXd& coefficients) const;

private:
    [[nodiscard]] double output_entry(double t, double s) const;

    KernelSpec spec_;
    Dataset data_;
    QuadratureConfig cfg_;
};

struct OutputKernel {
    Eigen::MatrixXd gram;
    std::shared_ptr<const ConvolutionModel> model;
};

[[nodiscard]] OutputKernel output_kernel(const KernelSpec& spec, const Dataset& data, const QuadratureConfig& cfg = {});

/// Solves (A + gamma I) c = y with a Cholesky factorization and up to two
/// steps of iterative refinement. gamma <= 0 gives InputError; a failed
/// factorization gives ConditioningError.
[[nodiscard]] Eigen::VectorXd solve_regularized(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double gamma);

struct EstimateResult {
    Eigen::VectorXd coefficients;
    double gamma = 0.0;
    double residual = 0.0;  ///< ||(A + gamma I) c - y||
    Eigen::MatrixXd gram;
    std::shared_ptr<const ConvolutionModel> model;

    [[nodiscard]] const KernelSpec& spec() const { return model->spec(); }
};

/// Fit with a given gamma, or gamma = noise variance when none is given.
/// Throws InputError when neither is positive.
[[nodiscard]] EstimateResult estimate(const OutputKernel& ok, std::optional<double> gamma = std::nullopt);

/// g_hat(t) = sum_j c_j a(t, t_j)
[[nodiscard]] double reconstruct(const EstimateResult& result, double t);

struct GammaSearch {
    double best = 0.0;
    std::vector<double> gammas;  ///< ascending
    std::vector<double> losses;  ///< held-out squared error per gamma
    std::size_t holdout = 0;     ///< number of held-out samples
};

/// Chronological split: the last ceil(N / 5) outputs are held out, the rest
/// are fitted for each gamma, and the gamma with the smallest held-out squared
/// prediction error wins; exact ties go to the larger gamma. N < 5 is rejected.
[[nodiscard]] GammaSearch grid_search_gamma(const OutputKernel& ok, std::vector<double> gammas);

/// Normalized fit 100 (1 - ||y - y_hat|| / ||y - mean(y)||).
[[nodiscard]] double normalized_fit(const Eigen::VectorXd& y, const Eigen::VectorXd& predicted);

/// n values spaced evenly in log10 between lo and hi, inclusive.
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace dck
