#include "verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "dck/error.hpp"
#include "dck/estimator.hpp"
#include "dck/kernelmat.hpp"
#include "dck/maxent.hpp"
#include "dck/mercer.hpp"
#include "dck/rkhs.hpp"
#include "dck/rng.hpp"

namespace dck::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Thresholds of the suite.
constexpr double kIdentityTol = 1e-13;
constexpr double kEigenTol = 1e-6;
constexpr double kOrthoTol = 1e-6;
constexpr std::size_t kExpansionTerms = 1000;
constexpr double kExpansionTol = 2.1e-4;
constexpr double kNormIntegralRel = 1e-8;
constexpr std::size_t kSeriesTerms = 500;
constexpr double kNormSeriesRel = 2e-2;
constexpr double kReproducingRel = 1e-6;
constexpr double kTcDcRel = 1e-12;
constexpr double kCovarianceTol = 1e-13;
constexpr double kConstraintTol = 1e-13;
constexpr double kStandardErrors = 3.0;
constexpr double kOffBandTol = 1e-8;
constexpr double kInverseTol = 1e-10;
constexpr double kSsOffBandFloor = 1e-3;
constexpr double kImpulseGramTol = 1e-12;
constexpr double kRecoveryTol = 1e-3;
constexpr double kSelfConvergenceFactor = 2.0;

std::string label(const KernelSpec& spec) {
    auto s = spec.describe();
    s.erase(std::remove(s.begin(), s.end(), ','), s.end());
    return s;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

// Uniform draws from one counter-based stream.
class Uniforms {
public:
    Uniforms(std::uint64_t seed, std::uint64_t stream) : stream_(seed, stream) {}

    double operator()(double lo, double hi) { return lo + (hi - lo) * (1.0 - stream_.uniform(counter_++)); }
    std::size_t integer(std::size_t lo, std::size_t hi) {
        const auto span = static_cast<double>(hi - lo + 1);
        return std::min(hi, lo + static_cast<std::size_t>((*this)(0.0, span)));
    }

private:
    NormalStream stream_;
    std::uint64_t counter_ = 0;
};

// Stream ids per section so sections draw independent numbers.
enum Stream : std::uint64_t { kNormStream = 1, kMaxentStream = 2, kTridiagStream = 3, kEntropyStream = 4 };

class Suite {
public:
    Suite(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {}

    void section(const std::string& name, const std::function<void()>& body) {
        section_ = name;
        const auto start = std::chrono::steady_clock::now();
        body();
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        std::size_t failed = 0;
        for (const auto& r : report_.rows) failed += r.section == name && !r.pass;
        log_ << "[" << name << "] " << (failed ? "FAIL" : "pass") << " (" << took.count() << " s)\n";
    }

    // Records measure() against the threshold; an exception is a failure.
    void check(const std::string& name, const std::string& relation, double threshold,
               const std::function<double()>& measure) {
        CheckRow row{section_, name, kNaN, relation, threshold, false};
        try {
            row.measured = measure();
            if (relation == "<=") {
                row.pass = row.measured <= threshold;
            } else if (relation == ">=") {
                row.pass = row.measured >= threshold;
            } else {
                row.pass = row.measured > threshold;
            }
        } catch (const std::exception& e) {
            log_ << "  " << name << ": " << e.what() << "\n";
        }
        if (!row.pass) log_ << "  FAIL " << name << " measured=" << row.measured << "\n";
        report_.rows.push_back(std::move(row));
    }

    [[nodiscard]] const RunConfig& cfg() const { return cfg_; }
    VerifyReport take() { return std::move(report_); }

private:
    const RunConfig& cfg_;
    std::ostream& log_;
    VerifyReport report_;
    std::string section_;
};

void identity_section(Suite& s) {
    std::vector<double> grid(50);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 10.0 * static_cast<double>(i) / 49.0;
    std::vector<KernelSpec> kernels{KernelSpec::ss(0.8), KernelSpec::ss(2.0), KernelSpec::tc(0.5),
                                    KernelSpec::tc(1.7), KernelSpec::dc(1.0, 0.5), KernelSpec::dc(0.3, 0.7)};
    const auto& k = s.cfg().kernel;
    if (k.kind() == KernelKind::SS || k.is_dc_family()) {
        if (std::find(kernels.begin(), kernels.end(), k) == kernels.end()) kernels.push_back(k);
    }
    for (const auto& spec : kernels) {
        s.check("coordinate_change " + label(spec), "<=", kIdentityTol,
                [&] { return verify_stable_spline_identity(spec, grid); });
    }
}

void mercer_section(Suite& s) {
    const auto& q = s.cfg().quadrature;
    const std::vector<KernelSpec> kernels{KernelSpec::spline1(),    KernelSpec::gen_spline1(-0.3),
                                          KernelSpec::gen_spline1(1.2), KernelSpec::dc(1.0, 0.5),
                                          KernelSpec::dc(0.3, 0.4), KernelSpec::tc(0.8)};
    const std::vector<double> unit_probes{0.1, 0.37, 0.75, 1.0};
    const std::vector<double> line_probes{0.0, 0.3, 1.0, 4.0};
    for (const auto& spec : kernels) {
        const EigenSystem sys(spec);
        const auto& probes = spec.on_unit_square() ? unit_probes : line_probes;
        for (std::size_t i : {1u, 3u, 10u}) {
            s.check("eigen_equation " + label(spec) + " i=" + std::to_string(i), "<=", kEigenTol,
                    [&] { return verify_eigen_equation(sys, i, probes, q); });
        }
        s.check("orthonormality_gram10 " + label(spec), "<=", kOrthoTol, [&] {
            return max_abs_diff(orthonormality_gram(sys, 10, q), Eigen::MatrixXd::Identity(10, 10));
        });
    }
    std::vector<double> pts(100);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = static_cast<double>(i + 1) / 100.0;
    double sup = kNaN;
    s.check("spline1_expansion_sup_error M=1000", "<=", kExpansionTol, [&] {
        const auto approx = truncated_expansion_matrix(EigenSystem(KernelSpec::spline1(), kExpansionTerms), pts);
        sup = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = 0; j < pts.size(); ++j) {
                sup = std::max(sup, std::abs(approx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                             std::min(pts[i], pts[j])));
            }
        }
        return sup;
    });
    s.check("spline1_expansion_within_tail_bound M=1000", "<=", spline1_tail_bound(kExpansionTerms),
            [&] { return sup; });
}

// Squared norm of exp(-gamma t) for DC with parameters (beta, rho).
double exp_norm_closed_form(double beta, double rho, double gamma) {
    const double m = rho - gamma / (2.0 * beta);
    return 2.0 * beta * m * m / (2.0 * gamma - (4.0 * rho + 2.0) * beta);
}

double relative(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

void norm_section(Suite& s) {
    const auto& cfg = s.cfg();
    Uniforms draw(cfg.verify.seed, kNormStream);
    for (std::size_t k = 0; k < cfg.verify.norm_triples; ++k) {
        const double beta = draw(0.2, 2.0);
        const double rho = draw(-0.4, 1.5);
        // gamma / (2 beta) - rho in [1, 3] keeps the series tail below the threshold at M = 500
        const double gamma = 2.0 * beta * (rho + draw(1.0, 3.0));
        const auto spec = KernelSpec::dc((2.0 * rho + 1.0) * beta, beta);
        const auto g = FunctionHandle::exp_sum({{1.0, gamma}});
        const double exact = exp_norm_closed_form(beta, rho, gamma);
        std::ostringstream tag;
        tag.precision(6);
        tag << " beta=" << beta << " rho=" << rho << " gamma=" << gamma;
        s.check("integral_vs_closed_form" + tag.str(), "<=", kNormIntegralRel, [&] {
            const auto r = dc_norm_integral(g, spec, cfg.quadrature);
            if (!r.converged()) throw QuadratureError(r.diagnostic, r.previous, r.value);
            return relative(r.value, exact);
        });
        s.check("series_M500_vs_closed_form" + tag.str(), "<=", kNormSeriesRel, [&] {
            return relative(dc_norm_series(g, EigenSystem(spec), kSeriesTerms, cfg.quadrature).norm_sq, exact);
        });
    }
    for (const auto& spec : {KernelSpec::dc(1.0, 0.5), KernelSpec::dc(0.3, 0.7), KernelSpec::tc(0.4)}) {
        for (double t0 : {0.0, 0.5, 2.0}) {
            std::ostringstream tag;
            tag << "reproducing_property " << label(spec) << " t0=" << t0;
            s.check(tag.str(), "<=", kReproducingRel, [&] {
                const auto r = dc_norm_integral(FunctionHandle::kernel_section(spec, t0), spec, cfg.quadrature);
                if (!r.converged()) throw QuadratureError(r.diagnostic, r.previous, r.value);
                return relative(r.value, std::exp(-2.0 * spec.alpha() * t0));
            });
        }
    }
    for (double gamma : {0.7, 1.3, 3.0}) {
        std::ostringstream tag;
        tag << "tc_dc_agreement beta=0.5 gamma=" << gamma;
        s.check(tag.str(), "<=", kTcDcRel, [&] {
            const auto g = FunctionHandle::exp_sum({{1.0, gamma}});
            const double a = tc_norm_integral(g, KernelSpec::tc(0.5), cfg.quadrature).value;
            const double b = dc_norm_integral(g, KernelSpec::dc(0.5, 0.5), cfg.quadrature).value;
            return relative(a, b);
        });
    }
}

TimeGrid random_grid(Uniforms& draw, std::size_t n) {
    std::vector<double> t(n);
    double x = draw(0.0, 0.5);
    for (auto& v : t) {
        v = x;
        x += draw(0.05, 1.0);
    }
    return TimeGrid::half_line(std::move(t));
}

void maxent_section(Suite& s) {
    const auto& v = s.cfg().verify;
    Uniforms draw(v.seed, kMaxentStream);
    double process_dev = 0.0;
    double markov_dev = 0.0;
    double constraint_residual = 0.0;
    bool ok = true;
    for (std::size_t k = 0; k < v.random_grids; ++k) {
        try {
            const auto grid = random_grid(draw, draw.integer(1, 20));
            const auto spec = KernelSpec::dc(draw(0.1, 1.5), draw(0.1, 1.5));
            const Eigen::MatrixXd gram = assemble(spec, grid).entries;
            const auto cov = dc_process_exact_covariance(grid, spec);
            process_dev = std::max(process_dev, max_abs_diff(cov, gram));
            markov_dev = std::max(markov_dev, max_abs_diff(dc_markov_exact_covariance(grid, spec), gram));
            const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
            constraint_residual =
                std::max(constraint_residual, verify_maxent_constraints(zero, cov, grid, spec, kConstraintTol).max_residual());
        } catch (const Error&) {
            ok = false;
        }
    }
    const auto n_grids = " over " + std::to_string(v.random_grids) + " grids";
    s.check("construction_covariance_vs_gram" + n_grids, "<=", kCovarianceTol,
            [&] { return ok ? process_dev : kNaN; });
    s.check("markov_covariance_vs_gram" + n_grids, "<=", kCovarianceTol, [&] { return ok ? markov_dev : kNaN; });
    s.check("exact_constraint_residual" + n_grids, "<=", kConstraintTol,
            [&] { return ok ? constraint_residual : kNaN; });

    const auto grid = TimeGrid::half_line({0.0, 0.5, 1.2, 2.0, 3.5});
    const auto spec = KernelSpec::dc(1.0, 0.5);
    const auto batch = sample_dc_process(grid, spec, v.seed, v.mc_samples);
    const auto m = empirical_moments(batch);
    const Eigen::MatrixXd gram = assemble(spec, grid).entries;
    const auto n_mc = " n=" + std::to_string(v.mc_samples);
    s.check("monte_carlo_covariance_max_standard_errors" + n_mc, "<=", kStandardErrors, [&] {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < gram.rows(); ++i) {
            for (Eigen::Index j = 0; j < gram.cols(); ++j) {
                worst = std::max(worst, std::abs(m.covariance(i, j) - gram(i, j)) / m.covariance_se(i, j));
            }
        }
        return worst;
    });
    s.check("monte_carlo_constraint_failures" + n_mc, "<=", 0.0, [&] {
        return static_cast<double>(verify_maxent_constraints(batch, spec, kStandardErrors).failures());
    });
    s.check("perturbed_variance_flagged_exact", ">", 0.0, [&] {
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
        return static_cast<double>(
            verify_maxent_constraints(zero, 1.1 * dc_process_exact_covariance(grid, spec), grid, spec).failures());
    });

    Uniforms entropy_draw(v.seed, kEntropyStream);
    for (double c : {0.2, 0.5}) {
        std::ostringstream name;
        name << "entropy_margin_vs_correlated_increments c=" << c << " over " << v.random_grids << " grids";
        s.check(name.str(), ">", 0.0, [&] {
            double margin = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < v.random_grids; ++k) {
                const auto g = random_grid(entropy_draw, entropy_draw.integer(2, 5));
                const auto sp = KernelSpec::dc(entropy_draw(0.1, 1.5), entropy_draw(0.1, 1.5));
                const auto other = increment_correlated_covariance(g, sp, c);
                const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
                // a competitor that violates the constraints would not be a valid comparison
                if (!verify_maxent_constraints(zero, other, g, sp, 1e-12).all_pass()) return kNaN;
                margin = std::min(margin, gaussian_log_det(dc_process_exact_covariance(g, sp)) - gaussian_log_det(other));
            }
            return margin;
        });
    }
}

void tridiag_section(Suite& s) {
    const auto& v = s.cfg().verify;
    {
        const auto km = assemble(KernelSpec::dc(0.2, 0.3),
                                 TimeGrid::half_line(matlab_default_sorted_uniforms(10, v.reference_grid_seed)));
        s.check("sorted_uniform_dense_inverse_off_band_ratio", "<=", kOffBandTol,
                [&] { return off_band_ratio(dense_inverse(km.entries)); });
        s.check("sorted_uniform_constructive_inverse_identity_deviation", "<=", kInverseTol,
                [&] { return identity_deviation(km.entries * tridiagonal_inverse(km).to_dense()); });
    }
    Uniforms draw(v.seed, kTridiagStream);
    double worst_identity = 0.0;
    double worst_off_band = 0.0;
    bool ok = true;
    for (std::size_t k = 0; k < v.tridiag_draws; ++k) {
        try {
            const auto spec = KernelSpec::dc(draw(0.1, 1.0), draw(0.1, 1.0));
            const std::size_t n = draw.integer(3, 100);
            std::vector<double> t(n);
            double x = 0.0;
            for (auto& p : t) {
                p = x;
                x += draw(0.25, 1.75) / static_cast<double>(n);
            }
            const auto km = assemble(spec, TimeGrid::half_line(std::move(t)));
            worst_identity = std::max(worst_identity, identity_deviation(km.entries * tridiagonal_inverse(km).to_dense()));
            worst_off_band = std::max(worst_off_band, off_band_ratio(dense_inverse(km.entries)));
        } catch (const Error&) {
            ok = false;
        }
    }
    const auto n_draws = " over " + std::to_string(v.tridiag_draws) + " draws";
    s.check("random_constructive_inverse_identity_deviation" + n_draws, "<=", kInverseTol,
            [&] { return ok ? worst_identity : kNaN; });
    s.check("random_dense_inverse_off_band_ratio" + n_draws, "<=", kOffBandTol,
            [&] { return ok ? worst_off_band : kNaN; });
    for (std::size_t n : {4u, 8u, 16u}) {
        s.check("ss_control_off_band_ratio n=" + std::to_string(n), ">", kSsOffBandFloor, [&] {
            const auto grid = TimeGrid::uniform(TimeGrid::Domain::HalfLine, 0.0, 3.0, n);
            return off_band_ratio(dense_inverse(assemble(KernelSpec::ss(0.5), grid).entries));
        });
    }
}

std::vector<double> even_times(double first, double step, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = first + step * static_cast<double>(i);
    return t;
}

Dataset dataset(std::vector<double> times, InputSignal input) {
    Dataset d;
    d.outputs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(times.size()));
    d.output_times = std::move(times);
    d.input = std::move(input);
    return d;
}

void estimator_section(Suite& s) {
    const auto& q = s.cfg().quadrature;
    s.check("impulse_output_gram_vs_kernel_gram", "<=", kImpulseGramTol, [&] {
        const auto times = even_times(0.0, 0.37, 15);
        const auto spec = KernelSpec::dc(0.8, 0.3);
        const auto ok = output_kernel(spec, dataset(times, ImpulseInput{}), q);
        return max_abs_diff(ok.gram, assemble(spec, TimeGrid::half_line(times)).entries);
    });
    s.check("noise_free_recovery_max_error TC(beta=0.5) exp(-t)", "<=", kRecoveryTol, [&] {
        auto data = dataset(even_times(0.0, 0.1, 51), ImpulseInput{});
        for (std::size_t i = 0; i < data.output_times.size(); ++i) {
            data.outputs(static_cast<Eigen::Index>(i)) = std::exp(-data.output_times[i]);
        }
        const auto result = estimate(output_kernel(KernelSpec::tc(0.5), data, q), 1e-10);
        double worst = 0.0;
        for (int k = 0; k <= 500; ++k) {
            const double t = 0.01 * k;
            worst = std::max(worst, std::abs(reconstruct(result, t) - std::exp(-t)));
        }
        return worst;
    });
    s.check("regularization_path_max_norm_ratio 20 gammas", "<=", 1.0 + 1e-12, [&] {
        auto data = dataset(even_times(0.0, 0.25, 20), ImpulseInput{});
        for (Eigen::Index i = 0; i < data.outputs.size(); ++i) {
            data.outputs(i) = std::exp(-data.output_times[static_cast<std::size_t>(i)]) + 0.01 * std::sin(7.0 * static_cast<double>(i));
        }
        const auto ok = output_kernel(KernelSpec::dc(0.7, 0.5), data, q);
        double prev = 0.0;
        double worst = 0.0;
        for (double g : log_grid(1e-6, 1e3, 20)) {
            const double norm = solve_regularized(ok.gram, data.outputs, g).norm();
            if (prev > 0.0) worst = std::max(worst, norm / prev);
            prev = norm;
        }
        return worst;
    });
    s.check("quadrature_self_convergence_min_factor", ">=", kSelfConvergenceFactor, [&] {
        const Dataset data = dataset(even_times(0.3, 0.7, 6), ExpSumInput{{{1.0, 0.8}, {0.5, 3.0}}});
        const auto spec = KernelSpec::dc(0.9, 0.4);
        QuadratureConfig coarse = q;
        coarse.convolution_panels = 1;
        Eigen::MatrixXd prev = output_kernel(spec, data, coarse).gram;
        double prev_change = 0.0;
        double factor = std::numeric_limits<double>::infinity();
        for (int r = 1; r <= 3; ++r) {
            const Eigen::MatrixXd next = output_kernel(spec, data, coarse.refined(r)).gram;
            const double change = max_abs_diff(next, prev);
            // below 1e-12 the change is rounding noise, not discretization error
            if (r > 1 && prev_change > 1e-12) factor = std::min(factor, prev_change / change);
            prev_change = change;
            prev = next;
        }
        return factor;
    });
}

}  // namespace

bool VerifyReport::all_pass() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.pass; }));
}

std::vector<std::string> VerifyReport::sections() const {
    std::vector<std::string> out;
    for (const auto& r : rows) {
        if (out.empty() || out.back() != r.section) out.push_back(r.section);
    }
    return out;
}

VerifyReport run_verify(const RunConfig& cfg, std::ostream& log) {
    Suite suite(cfg, log);
    suite.section("identity", [&] { identity_section(suite); });
    suite.section("mercer", [&] { mercer_section(suite); });
    suite.section("norm", [&] { norm_section(suite); });
    suite.section("maxent", [&] { maxent_section(suite); });
    suite.section("tridiag", [&] { tridiag_section(suite); });
    suite.section("estimator", [&] { estimator_section(suite); });
    return suite.take();
}

}  // namespace dck::cli
