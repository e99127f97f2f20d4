#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dck/kernels.hpp"
#include "dck/time_grid.hpp"

namespace dck {

/// One realization of a process on a grid.
struct GaussianSample {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;  ///< position in its batch; also the noise stream id
};

struct SampleBatch {
    TimeGrid grid;
    std::vector<GaussianSample> samples;
};

// ---------------------------------------------------------------------------
// Constructions
//
// Sample m of a batch draws its white noise w(0), w(1), ... from
// NormalStream(seed, m). With matched seeds the DC process on t_0 < ... <
// t_{n-1} and the generalized-spline process on tau_j = exp(-2 beta t_{n-j})
// consume the same noise in the same order, so g(t_k) = f(tau_{n-k}).

/// f(tau_k) = tau_k^rho sum_{i=1}^{k} w(i-1) sqrt(tau_i - tau_{i-1}), tau_0 = 0.
/// Requires a Unit01 grid and rho > -1/2.
[[nodiscard]] SampleBatch sample_genspline_process(const TimeGrid& grid, double rho, std::uint64_t seed,
                                                   std::size_t count);

/// g(t_k) = e^{-2 beta rho t_k} sum_{i=k}^{n-1} w(n-1-i) sqrt(e^{-2 beta t_i} - e^{-2 beta t_{i+1}}),
/// with e^{-2 beta t_n} = 0. Requires a HalfLine grid and a DC/TC kernel.
[[nodiscard]] SampleBatch sample_dc_process(const TimeGrid& grid, const KernelSpec& spec, std::uint64_t seed,
                                            std::size_t count);

/// Order-one Markov form of the DC process, run from the anchored end:
///   g(t_{n-1}) = e^{-beta (2 rho + 1) t_{n-1}} wbar(n-1)
///   g(t_i)     = a_i g(t_{i+1}) + sqrt(d_i) wbar(i),  i = n-2, ..., 0
/// with a_i and d_i from dc_markov_coefficients. Uses wbar(i) = w(n-1-i), so
/// for matched seeds it reproduces sample_dc_process path by path.
[[nodiscard]] SampleBatch sample_dc_markov(const TimeGrid& grid, const KernelSpec& spec, std::uint64_t seed,
                                           std::size_t count);

/// Coefficients of the Markov recursion above.
///   a_i = e^{2 beta rho (t_{i+1} - t_i)}                                 (i < n-1)
///   d_i = e^{-4 beta rho t_i} (e^{-2 beta t_i} - e^{-2 beta t_{i+1}})    (i < n-1)
///   d_{n-1} = e^{-2 beta (2 rho + 1) t_{n-1}}
struct MarkovCoefficients {
    std::vector<double> transition;           ///< a_0 .. a_{n-2}
    std::vector<double> innovation_variance;  ///< d_0 .. d_{n-1}
};

[[nodiscard]] MarkovCoefficients dc_markov_coefficients(const TimeGrid& grid, const KernelSpec& spec);

/// e^{-2 beta t_i} - e^{-2 beta t_{i+1}} for i < n-1 and e^{-2 beta t_{n-1}} last.
[[nodiscard]] std::vector<double> dc_increment_variances(const TimeGrid& grid, const KernelSpec& spec);

// ---------------------------------------------------------------------------
// Exact second moments

/// Linear map from white noise to the process: values = C w.
[[nodiscard]] Eigen::MatrixXd genspline_construction(const TimeGrid& grid, double rho);
[[nodiscard]] Eigen::MatrixXd dc_construction(const TimeGrid& grid, const KernelSpec& spec);

/// C C^T for the constructions above.
[[nodiscard]] Eigen::MatrixXd genspline_exact_covariance(const TimeGrid& grid, double rho);
[[nodiscard]] Eigen::MatrixXd dc_process_exact_covariance(const TimeGrid& grid, const KernelSpec& spec);

/// Covariance obtained by propagating second moments through the Markov
/// recursion, independent of the construction matrix.
[[nodiscard]] Eigen::MatrixXd dc_markov_exact_covariance(const TimeGrid& grid, const KernelSpec& spec);

struct EmpiricalMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;     ///< divides by N - 1
    Eigen::MatrixXd covariance_se;  ///< standard error of each covariance entry, from fourth moments
    Eigen::VectorXd mean_se;
    std::size_t count = 0;
};

[[nodiscard]] EmpiricalMoments empirical_moments(const SampleBatch& batch);

// ---------------------------------------------------------------------------
// Constraint checks

struct ConstraintCheck {
    std::string name;
    std::size_t index = 0;
    double measured = 0.0;
    double target = 0.0;
    double residual = 0.0;  ///< |measured - target|
    double allowed = 0.0;   ///< tolerance (exact path) or 3 standard errors (Monte-Carlo)
    bool pass = false;
};

struct ConstraintReport {
    std::vector<ConstraintCheck> checks;

    [[nodiscard]] bool all_pass() const;
    [[nodiscard]] double max_residual() const;
    [[nodiscard]] std::size_t failures() const;
};

/// DC MaxEnt constraint set, with l_i = h(t_i) / e^{-2 beta rho t_i}:
///   E h(t_i) = 0
///   var(l_{i+1} - l_i) = e^{-2 beta t_i} - e^{-2 beta t_{i+1}},  i = 0 .. n-2
///   var(l_{n-1}) = e^{-2 beta t_{n-1}}
/// checked on exact moments with an absolute tolerance.
[[nodiscard]] ConstraintReport verify_maxent_constraints(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                                                         const TimeGrid& grid, const KernelSpec& spec,
                                                         double tolerance = 1e-13);

/// Same constraints estimated from samples; each passes when within
/// `se_multiplier` standard errors (fourth-moment based).
[[nodiscard]] ConstraintReport verify_maxent_constraints(const SampleBatch& batch, const KernelSpec& spec,
                                                         double se_multiplier = 3.0);

/// Generalized-spline constraint set on a Unit01 grid, with l_i = h(tau_i) / tau_i^rho:
///   var(l_1) = tau_1,  var(l_i - l_{i-1}) = tau_i - tau_{i-1}.
[[nodiscard]] ConstraintReport verify_genspline_constraints(const Eigen::MatrixXd& covariance, const TimeGrid& grid,
                                                            double rho, double tolerance = 1e-13);

// ---------------------------------------------------------------------------
// Entropy comparison

/// log det of a symmetric positive-definite matrix; throws ConditioningError otherwise.
[[nodiscard]] double gaussian_log_det(const Eigen::MatrixXd& covariance);

/// Covariance of a competitor satisfying the DC constraint set: the
/// increments l_i - l_{i+1} (and l_{n-1}) keep their prescribed variances but
/// are equicorrelated with coefficient c. Requires -1/(n-1) < c < 1.
[[nodiscard]] Eigen::MatrixXd increment_correlated_covariance(const TimeGrid& grid, const KernelSpec& spec, double c);

}  // namespace dck
