#include "dck/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dck/error.hpp"
#include "dck/parallel.hpp"
#include "dck/rng.hpp"

namespace dck {

namespace {

using Index = Eigen::Index;

void require_unit_grid(const TimeGrid& grid) {
    if (grid.domain() != TimeGrid::Domain::Unit01) throw InputError("expected a grid on (0, 1]");
}

void require_half_line(const TimeGrid& grid, const KernelSpec& spec) {
    if (grid.domain() != TimeGrid::Domain::HalfLine) throw InputError("expected a grid on [0, inf)");
    if (!spec.is_dc_family()) throw InputError("expected a DC or TC kernel, got " + spec.describe());
}

void require_rho(double rho) {
    if (!(rho > -0.5) || !std::isfinite(rho)) throw InputError("rho must be > -0.5");
}

// beta (2 rho + 1), which must reproduce alpha.
double terminal_rate(const KernelSpec& spec) {
    const double rate = spec.beta() * (2.0 * spec.rho() + 1.0);
    if (std::abs(rate - spec.alpha()) > 1e-15 * std::max(1.0, spec.alpha())) {
        throw std::logic_error("inconsistent DC hyperparameters: beta (2 rho + 1) != alpha");
    }
    return rate;
}

// e^{-2 beta rho t}
double envelope(const KernelSpec& spec, double t) { return std::exp(-2.0 * spec.beta() * spec.rho() * t); }

template <class Fill>
SampleBatch run_batch(const TimeGrid& grid, std::uint64_t seed, std::size_t count, Fill fill) {
    SampleBatch batch{grid, std::vector<GaussianSample>(count)};
    parallel_for(count, [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            GaussianSample& s = batch.samples[m];
            s.seed = seed;
            s.index = m;
            s.values.assign(grid.size(), 0.0);
            fill(NormalStream(seed, m), s.values);
        }
    });
    return batch;
}

ConstraintCheck make_check(std::string name, std::size_t index, double measured, double target, double allowed) {
    ConstraintCheck c;
    c.name = std::move(name);
    c.index = index;
    c.measured = measured;
    c.target = target;
    c.residual = std::abs(measured - target);
    c.allowed = allowed;
    c.pass = c.residual <= allowed;
    return c;
}

// Coefficient vectors of the DC constraint combinations, in order: the n-1
// increments l_{i+1} - l_i followed by l_{n-1}; paired with their targets.
struct LinearConstraints {
    std::vector<Eigen::VectorXd> weights;
    std::vector<double> targets;
    std::vector<std::string> names;
};

LinearConstraints dc_constraints(const TimeGrid& grid, const KernelSpec& spec) {
    const std::size_t n = grid.size();
    const auto increments = dc_increment_variances(grid, spec);
    LinearConstraints lc;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Index>(n));
        w(static_cast<Index>(i + 1)) = 1.0 / envelope(spec, grid[i + 1]);
        w(static_cast<Index>(i)) = -1.0 / envelope(spec, grid[i]);
        lc.weights.push_back(std::move(w));
        lc.targets.push_back(increments[i]);
        lc.names.emplace_back("var_increment");
    }
    if (n > 0) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Index>(n));
        w(static_cast<Index>(n - 1)) = 1.0 / envelope(spec, grid[n - 1]);
        lc.weights.push_back(std::move(w));
        lc.targets.push_back(increments[n - 1]);
        lc.names.emplace_back("var_terminal");
    }
    return lc;
}

}  // namespace

std::vector<double> dc_increment_variances(const TimeGrid& grid, const KernelSpec& spec) {
    require_half_line(grid, spec);
    const double beta = spec.beta();
    const std::size_t n = grid.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        out[i] = -std::exp(-2.0 * beta * grid[i]) * std::expm1(-2.0 * beta * (grid[i + 1] - grid[i]));
    }
    if (n > 0) out[n - 1] = std::exp(-2.0 * beta * grid[n - 1]);
    return out;
}

SampleBatch sample_genspline_process(const TimeGrid& grid, double rho, std::uint64_t seed, std::size_t count) {
    require_unit_grid(grid);
    require_rho(rho);
    const std::size_t n = grid.size();
    std::vector<double> scale(n);
    std::vector<double> step(n);
    for (std::size_t k = 0; k < n; ++k) {
        scale[k] = std::pow(grid[k], rho);
        step[k] = std::sqrt(grid[k] - (k == 0 ? 0.0 : grid[k - 1]));
    }
    return run_batch(grid, seed, count, [&](const NormalStream& w, std::vector<double>& out) {
        double walk = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            walk += w(k) * step[k];
            out[k] = scale[k] * walk;
        }
    });
}

SampleBatch sample_dc_process(const TimeGrid& grid, const KernelSpec& spec, std::uint64_t seed, std::size_t count) {
    require_half_line(grid, spec);
    const std::size_t n = grid.size();
    const auto increments = dc_increment_variances(grid, spec);
    std::vector<double> scale(n);
    std::vector<double> step(n);
    for (std::size_t k = 0; k < n; ++k) {
        scale[k] = envelope(spec, grid[k]);
        step[k] = std::sqrt(increments[k]);
    }
    return run_batch(grid, seed, count, [&](const NormalStream& w, std::vector<double>& out) {
        // Anticausal sum: term i uses w(n-1-i); accumulate from i = n-1 down.
        double walk = 0.0;
        for (std::size_t k = n; k-- > 0;) {
            walk += w(n - 1 - k) * step[k];
            out[k] = scale[k] * walk;
        }
    });
}

MarkovCoefficients dc_markov_coefficients(const TimeGrid& grid, const KernelSpec& spec) {
    require_half_line(grid, spec);
    const std::size_t n = grid.size();
    const double beta = spec.beta();
    const double rho = spec.rho();
    const auto increments = dc_increment_variances(grid, spec);
    MarkovCoefficients mc;
    mc.transition.resize(n > 0 ? n - 1 : 0);
    mc.innovation_variance.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        mc.transition[i] = std::exp(2.0 * beta * rho * (grid[i + 1] - grid[i]));
        mc.innovation_variance[i] = std::exp(-4.0 * beta * rho * grid[i]) * increments[i];
    }
    if (n > 0) mc.innovation_variance[n - 1] = std::exp(-2.0 * terminal_rate(spec) * grid[n - 1]);
    return mc;
}

SampleBatch sample_dc_markov(const TimeGrid& grid, const KernelSpec& spec, std::uint64_t seed, std::size_t count) {
    const auto mc = dc_markov_coefficients(grid, spec);
    const std::size_t n = grid.size();
    std::vector<double> sd(n);
    for (std::size_t i = 0; i < n; ++i) sd[i] = std::sqrt(mc.innovation_variance[i]);
    return run_batch(grid, seed, count, [&](const NormalStream& w, std::vector<double>& out) {
        if (n == 0) return;
        out[n - 1] = sd[n - 1] * w(0);
        for (std::size_t i = n - 1; i-- > 0;) {
            out[i] = mc.transition[i] * out[i + 1] + sd[i] * w(n - 1 - i);
        }
    });
}

Eigen::MatrixXd genspline_construction(const TimeGrid& grid, double rho) {
    require_unit_grid(grid);
    require_rho(rho);
    const auto n = static_cast<Index>(grid.size());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
        const double scale = std::pow(grid[static_cast<std::size_t>(k)], rho);
        for (Index i = 0; i <= k; ++i) {
            const double prev = i == 0 ? 0.0 : grid[static_cast<std::size_t>(i - 1)];
            c(k, i) = scale * std::sqrt(grid[static_cast<std::size_t>(i)] - prev);
        }
    }
    return c;
}

Eigen::MatrixXd dc_construction(const TimeGrid& grid, const KernelSpec& spec) {
    const auto increments = dc_increment_variances(grid, spec);
    const auto n = static_cast<Index>(grid.size());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
        const double scale = envelope(spec, grid[static_cast<std::size_t>(k)]);
        for (Index i = k; i < n; ++i) c(k, n - 1 - i) = scale * std::sqrt(increments[static_cast<std::size_t>(i)]);
    }
    return c;
}

Eigen::MatrixXd genspline_exact_covariance(const TimeGrid& grid, double rho) {
    const Eigen::MatrixXd c = genspline_construction(grid, rho);
    return c * c.transpose();
}

Eigen::MatrixXd dc_process_exact_covariance(const TimeGrid& grid, const KernelSpec& spec) {
    const Eigen::MatrixXd c = dc_construction(grid, spec);
    return c * c.transpose();
}

Eigen::MatrixXd dc_markov_exact_covariance(const TimeGrid& grid, const KernelSpec& spec) {
    const auto mc = dc_markov_coefficients(grid, spec);
    const auto n = static_cast<Index>(grid.size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    if (n == 0) return p;
    p(n - 1, n - 1) = mc.innovation_variance[static_cast<std::size_t>(n - 1)];
    for (Index i = n - 1; i-- > 0;) {
        const double a = mc.transition[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < n; ++j) {
            p(i, j) = a * p(i + 1, j);
            p(j, i) = p(i, j);
        }
        p(i, i) = a * a * p(i + 1, i + 1) + mc.innovation_variance[static_cast<std::size_t>(i)];
    }
    return p;
}

EmpiricalMoments empirical_moments(const SampleBatch& batch) {
    const auto n = static_cast<Index>(batch.grid.size());
    const std::size_t count = batch.samples.size();
    EmpiricalMoments m;
    m.count = count;
    m.mean = Eigen::VectorXd::Zero(n);
    m.covariance = Eigen::MatrixXd::Zero(n, n);
    m.covariance_se = Eigen::MatrixXd::Zero(n, n);
    m.mean_se = Eigen::VectorXd::Zero(n);
    if (count < 2) return m;

    Eigen::MatrixXd x(static_cast<Index>(count), n);
    for (std::size_t r = 0; r < count; ++r) {
        for (Index c = 0; c < n; ++c) x(static_cast<Index>(r), c) = batch.samples[r].values[static_cast<std::size_t>(c)];
    }
    m.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - m.mean.transpose();
    const double nn = static_cast<double>(count);
    m.covariance = centered.transpose() * centered / (nn - 1.0);
    for (Index j = 0; j < n; ++j) {
        m.mean_se(j) = std::sqrt(m.covariance(j, j) / nn);
        for (Index k = j; k < n; ++k) {
            const Eigen::ArrayXd prod = centered.col(j).array() * centered.col(k).array();
            const double mu = prod.mean();
            const double var = (prod - mu).square().sum() / (nn - 1.0);
            m.covariance_se(j, k) = std::sqrt(var / nn);
            m.covariance_se(k, j) = m.covariance_se(j, k);
        }
    }
    return m;
}

bool ConstraintReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.pass; });
}

double ConstraintReport::max_residual() const {
    double worst = 0.0;
    for (const auto& c : checks) worst = std::max(worst, c.residual);
    return worst;
}

std::size_t ConstraintReport::failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return !c.pass; }));
}

ConstraintReport verify_maxent_constraints(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                                           const TimeGrid& grid, const KernelSpec& spec, double tolerance) {
    const auto n = static_cast<Index>(grid.size());
    if (mean.size() != n || covariance.rows() != n || covariance.cols() != n) {
        throw InputError("moment dimensions do not match the grid");
    }
    ConstraintReport report;
    for (Index i = 0; i < n; ++i) {
        report.checks.push_back(make_check("mean", static_cast<std::size_t>(i), mean(i), 0.0, tolerance));
    }
    const auto lc = dc_constraints(grid, spec);
    for (std::size_t c = 0; c < lc.weights.size(); ++c) {
        const double var = lc.weights[c].dot(covariance * lc.weights[c]);
        report.checks.push_back(make_check(lc.names[c], c, var, lc.targets[c], tolerance));
    }
    return report;
}

ConstraintReport verify_maxent_constraints(const SampleBatch& batch, const KernelSpec& spec, double se_multiplier) {
    const TimeGrid& grid = batch.grid;
    const std::size_t count = batch.samples.size();
    if (count < 2) throw InputError("Monte-Carlo constraint check needs at least two samples");
    const auto moments = empirical_moments(batch);
    ConstraintReport report;
    for (Index i = 0; i < moments.mean.size(); ++i) {
        report.checks.push_back(
            make_check("mean", static_cast<std::size_t>(i), moments.mean(i), 0.0, se_multiplier * moments.mean_se(i)));
    }
    const auto lc = dc_constraints(grid, spec);
    const double nn = static_cast<double>(count);
    for (std::size_t c = 0; c < lc.weights.size(); ++c) {
        std::vector<double> z(count);
        double zbar = 0.0;
        for (std::size_t m = 0; m < count; ++m) {
            const auto& v = batch.samples[m].values;
            double acc = 0.0;
            for (Index i = 0; i < lc.weights[c].size(); ++i) acc += lc.weights[c](i) * v[static_cast<std::size_t>(i)];
            z[m] = acc;
            zbar += acc;
        }
        zbar /= nn;
        double m2 = 0.0;
        double m4 = 0.0;
        for (double zi : z) {
            const double d2 = (zi - zbar) * (zi - zbar);
            m2 += d2;
            m4 += d2 * d2;
        }
        m2 /= nn;
        m4 /= nn;
        const double var = m2 * nn / (nn - 1.0);
        const double se = std::sqrt(std::max(0.0, m4 - m2 * m2) / nn);
        report.checks.push_back(make_check(lc.names[c], c, var, lc.targets[c], se_multiplier * se));
    }
    return report;
}

ConstraintReport verify_genspline_constraints(const Eigen::MatrixXd& covariance, const TimeGrid& grid, double rho,
                                              double tolerance) {
    require_unit_grid(grid);
    const auto n = static_cast<Index>(grid.size());
    if (covariance.rows() != n || covariance.cols() != n) throw InputError("covariance does not match the grid");
    ConstraintReport report;
    for (Index i = 0; i < n; ++i) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
        const auto ui = static_cast<std::size_t>(i);
        w(i) = 1.0 / std::pow(grid[ui], rho);
        double target = grid[ui];
        if (i > 0) {
            w(i - 1) = -1.0 / std::pow(grid[ui - 1], rho);
            target = grid[ui] - grid[ui - 1];
        }
        report.checks.push_back(make_check("var_increment", ui, w.dot(covariance * w), target, tolerance));
    }
    return report;
}

double gaussian_log_det(const Eigen::MatrixXd& covariance) {
    const Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) throw ConditioningError("covariance is not positive definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Eigen::MatrixXd increment_correlated_covariance(const TimeGrid& grid, const KernelSpec& spec, double c) {
    const auto increments = dc_increment_variances(grid, spec);
    const auto n = static_cast<Index>(grid.size());
    if (n > 1 && !(c > -1.0 / static_cast<double>(n - 1) && c < 1.0)) {
        std::ostringstream os;
        os << "equicorrelation " << c << " is not admissible for " << n << " increments";
        throw InputError(os.str());
    }
    // e_i = l_i - l_{i+1} (e_{n-1} = l_{n-1}); l = S e with S upper triangular ones.
    Eigen::VectorXd sd(n);
    for (Index i = 0; i < n; ++i) sd(i) = std::sqrt(increments[static_cast<std::size_t>(i)]);
    Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(n, n, c);
    corr.diagonal().setOnes();
    const Eigen::MatrixXd cov_e = sd.asDiagonal() * corr * sd.asDiagonal();
    const Eigen::MatrixXd s = Eigen::MatrixXd::Ones(n, n).triangularView<Eigen::Upper>();
    Eigen::VectorXd b(n);
    for (Index i = 0; i < n; ++i) b(i) = envelope(spec, grid[static_cast<std::size_t>(i)]);
    const Eigen::MatrixXd map = b.asDiagonal() * s;
    return map * cov_e * map.transpose();
}

}  // namespace dck
