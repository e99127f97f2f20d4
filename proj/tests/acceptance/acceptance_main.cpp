// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "dck/estimator.hpp"
#include "dck/kernelmat.hpp"
#include "dck/maxent.hpp"
#include "dck/mercer.hpp"
#include "dck/rkhs.hpp"
#include "oracles.hpp"

namespace {

using namespace dck;
using Clock = std::chrono::steady_clock;

// Collects the sub-checks of one criterion; the first failure is kept for the report.
class Criterion {
public:
    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (!ok && failure_.empty()) failure_ = what;
    }
    void le(double measured, double limit, const std::string& what) {
        std::ostringstream os;
        os << what << " = " << measured << " > " << limit;
        expect(measured <= limit, os.str());
    }
    void gt(double measured, double floor, const std::string& what) {
        std::ostringstream os;
        os << what << " = " << measured << " <= " << floor;
        expect(measured > floor, os.str());
    }
    [[nodiscard]] bool pass() const { return failure_.empty(); }
    [[nodiscard]] const std::string& failure() const { return failure_; }
    [[nodiscard]] int checks() const { return checks_; }

private:
    int checks_ = 0;
    std::string failure_;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

// Direct DC formula, independent of the library's kernel code.
double dc_direct(double alpha, double beta, double t, double s) {
    return std::exp(-alpha * (t + s)) * std::exp(-beta * std::abs(t - s));
}

Eigen::MatrixXd dc_gram_direct(double alpha, double beta, const std::vector<double>& t) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            k(i, j) = dc_direct(alpha, beta, t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)]);
        }
    }
    return k;
}

Eigen::MatrixXd oracle_inverse(const Eigen::MatrixXd& m) {
    const auto n = static_cast<std::size_t>(m.rows());
    std::vector<double> flat(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            flat[i * n + j] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    const auto inv = oracle::gauss_jordan_inverse(flat, n);
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = inv[i * n + j];
    }
    return out;
}

double off_band_direct(const Eigen::MatrixXd& m) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (std::abs(i - j) >= 2) off = std::max(off, std::abs(m(i, j)));
        }
    }
    return off / m.cwiseAbs().maxCoeff();
}

// 1. Coordinate-change identities on a 50 x 50 grid over [0, 10]^2.
void identity_suite(Criterion& c) {
    std::vector<double> grid(50);
    for (std::size_t i = 0; i < 50; ++i) grid[i] = 10.0 * static_cast<double>(i) / 49.0;
    for (const auto& spec : {KernelSpec::ss(0.5), KernelSpec::ss(1.3), KernelSpec::tc(0.5), KernelSpec::tc(2.0),
                             KernelSpec::dc(1.0, 0.5), KernelSpec::dc(0.2, 0.3), KernelSpec::dc(0.4, 1.1)}) {
        c.le(verify_stable_spline_identity(spec, grid), 1e-13, "identity " + spec.describe());
    }
    // long double cross-check of SS against the second-order spline
    long double worst = 0.0L;
    for (double t : grid) {
        for (double s : grid) {
            const long double a = 0.7L;
            const long double lhs = oracle::ss_kernel_ld(a, t, s);
            const long double rhs = oracle::spline2_ld(std::exp(-a * t), std::exp(-a * s));
            worst = std::max(worst, std::abs(lhs - rhs));
            const double library = eval_kernel(KernelSpec::ss(0.7), t, s);
            c.expect(std::abs(static_cast<long double>(library) - lhs) <= 1e-15L, "SS kernel value");
        }
    }
    c.le(static_cast<double>(worst), 1e-13, "long double SS identity");
}

// 2. Eigen-equation residuals, orthonormality Gram, Spline1 truncation error.
void mercer_suite(Criterion& c) {
    const QuadratureConfig defaults;
    const std::vector<double> unit_probes{0.05, 0.33, 0.8, 1.0};
    const std::vector<double> line_probes{0.0, 0.6, 2.5, 7.0};
    for (const auto& spec : {KernelSpec::spline1(), KernelSpec::gen_spline1(-0.4), KernelSpec::gen_spline1(0.8),
                             KernelSpec::dc(1.0, 0.5), KernelSpec::dc(0.25, 0.6), KernelSpec::tc(1.0)}) {
        const EigenSystem sys(spec);
        const auto& probes = spec.on_unit_square() ? unit_probes : line_probes;
        for (std::size_t i : {1u, 3u, 10u}) {
            c.le(verify_eigen_equation(sys, i, probes, defaults), 1e-6,
                 "eigen residual " + spec.describe() + " i=" + std::to_string(i));
        }
        const Eigen::MatrixXd gram = orthonormality_gram(sys, 10, defaults);
        c.le((gram - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-6, "Gram " + spec.describe());
    }
    std::vector<double> pts(100);
    for (std::size_t i = 0; i < 100; ++i) pts[i] = static_cast<double>(i + 1) / 100.0;
    const auto approx = truncated_expansion_matrix(EigenSystem(KernelSpec::spline1(), 1000), pts);
    double sup = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        for (std::size_t j = 0; j < 100; ++j) {
            sup = std::max(sup, std::abs(approx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                         std::min(pts[i], pts[j])));
        }
    }
    c.le(sup, 2.1e-4, "Spline1 M=1000 sup error");
    c.le(sup, oracle::spline1_tail(1000), "Spline1 sup error vs analytic tail bound");
}

// 3. RKHS norms of exponentials: quadrature, series, reproducing property, TC/DC agreement.
void norm_suite(Criterion& c) {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> beta_d(0.2, 2.0);
    std::uniform_real_distribution<double> rho_d(-0.4, 1.5);
    std::uniform_real_distribution<double> q_d(1.0, 3.0);
    for (int k = 0; k < 10; ++k) {
        const double beta = beta_d(gen);
        const double rho = rho_d(gen);
        const double gamma = 2.0 * beta * (rho + q_d(gen));
        c.expect(gamma > (2.0 * rho + 1.0) * beta, "triple satisfies the membership condition");
        const auto spec = KernelSpec::dc((2.0 * rho + 1.0) * beta, beta);
        const auto g = FunctionHandle::exp_sum({{1.0, gamma}});
        const double exact = oracle::dc_exp_norm_sq(beta, rho, gamma);
        const auto integral = dc_norm_integral(g, spec);
        c.expect(integral.converged(), "integral converged");
        std::ostringstream tag;
        tag << " (beta=" << beta << " rho=" << rho << " gamma=" << gamma << ")";
        c.le(rel(integral.value, exact), 1e-8, "integral vs closed form" + tag.str());
        c.le(rel(dc_norm_series(g, EigenSystem(spec), 500).norm_sq, exact), 2e-2, "series M=500" + tag.str());
    }
    for (const auto& spec : {KernelSpec::dc(1.0, 0.5), KernelSpec::dc(0.6, 0.2), KernelSpec::tc(0.9)}) {
        for (double t0 : {0.0, 0.8, 3.0}) {
            const auto r = dc_norm_integral(FunctionHandle::kernel_section(spec, t0), spec);
            c.le(rel(r.value, std::exp(-2.0 * spec.alpha() * t0)), 1e-6, "reproducing property " + spec.describe());
        }
    }
    for (double beta : {0.3, 1.0}) {
        for (double gamma : {0.5, 1.7, 4.0}) {
            if (gamma <= beta) continue;
            const auto g = FunctionHandle::exp_sum({{1.0, gamma}});
            const double tc = tc_norm_integral(g, KernelSpec::tc(beta)).value;
            const double dc = dc_norm_integral(g, KernelSpec::dc(beta, beta)).value;
            c.le(rel(tc, dc), 1e-12, "TC/DC rho=0 agreement");
        }
    }
}

std::vector<double> random_times(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> gap(0.05, 1.0);
    std::vector<double> t(n);
    double x = std::uniform_real_distribution<double>(0.0, 0.5)(gen);
    for (auto& v : t) {
        v = x;
        x += gap(gen);
    }
    return t;
}

// 4. MaxEnt constructions: exact covariances, Monte-Carlo, constraints, entropy.
void maxent_suite(Criterion& c) {
    std::mt19937_64 gen(404);
    std::uniform_int_distribution<std::size_t> size(1, 20);
    std::uniform_real_distribution<double> rate(0.1, 1.5);
    for (int k = 0; k < 20; ++k) {
        const auto t = random_times(gen, size(gen));
        const double alpha = rate(gen);
        const double beta = rate(gen);
        const auto spec = KernelSpec::dc(alpha, beta);
        const auto grid = TimeGrid::half_line(t);
        const Eigen::MatrixXd gram = dc_gram_direct(alpha, beta, t);
        const auto cov = dc_process_exact_covariance(grid, spec);
        c.le((cov - gram).cwiseAbs().maxCoeff(), 1e-13, "construction covariance vs Gram");
        c.le((dc_markov_exact_covariance(grid, spec) - gram).cwiseAbs().maxCoeff(), 1e-13,
             "Markov covariance vs Gram");
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(t.size()));
        c.le(verify_maxent_constraints(zero, cov, grid, spec, 1e-13).max_residual(), 1e-13, "exact constraints");
    }

    // The prescribed check: one 5-point grid, 1e5 samples per construction.
    const std::vector<double> t{0.0, 0.4, 1.0, 1.9, 3.2};
    const auto grid = TimeGrid::half_line(t);
    auto z_scores = [&](const SampleBatch& batch, const Eigen::MatrixXd& gram) {
        const auto m = empirical_moments(batch);
        std::vector<double> z;
        for (Eigen::Index i = 0; i < gram.rows(); ++i) {
            for (Eigen::Index j = i; j < gram.cols(); ++j) z.push_back((m.covariance(i, j) - gram(i, j)) / m.covariance_se(i, j));
        }
        return z;
    };
    {
        const auto spec = KernelSpec::dc(1.0, 0.5);
        const Eigen::MatrixXd gram = dc_gram_direct(1.0, 0.5, t);
        for (const auto& batch : {sample_dc_process(grid, spec, 2718, 100000), sample_dc_markov(grid, spec, 3141, 100000)}) {
            double worst = 0.0;
            for (double z : z_scores(batch, gram)) worst = std::max(worst, std::abs(z));
            c.le(worst, 3.0, "Monte-Carlo covariance in standard errors");
            c.expect(verify_maxent_constraints(batch, spec, 3.0).all_pass(), "Monte-Carlo constraints");
        }
    }
    // Calibration across seeds: an unbiased sampler with honest standard
    // errors gives mean z^2 near 1; a 1% variance bias would push it past 5.
    {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& spec : {KernelSpec::dc(1.0, 0.5), KernelSpec::dc(0.6, 0.9)}) {
            const Eigen::MatrixXd gram = dc_gram_direct(spec.alpha(), spec.beta(), t);
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                for (const auto& batch : {sample_dc_process(grid, spec, 7000 + seed, 100000),
                                          sample_dc_markov(grid, spec, 8000 + seed, 100000)}) {
                    for (double z : z_scores(batch, gram)) {
                        sum += z * z;
                        ++count;
                    }
                }
            }
        }
        const double mean_z2 = sum / static_cast<double>(count);
        c.expect(mean_z2 >= 0.8 && mean_z2 <= 1.25, "mean squared z-score over 40 batches = " + std::to_string(mean_z2));
    }

    std::uniform_int_distribution<std::size_t> small(2, 5);
    for (int k = 0; k < 20; ++k) {
        const auto times = random_times(gen, small(gen));
        const auto g = TimeGrid::half_line(times);
        const auto spec = KernelSpec::dc(rate(gen), rate(gen));
        const double maxent = gaussian_log_det(dc_process_exact_covariance(g, spec));
        for (double corr : {0.2, 0.5}) {
            const auto other = increment_correlated_covariance(g, spec, corr);
            const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(times.size()));
            c.expect(verify_maxent_constraints(zero, other, g, spec, 1e-12).all_pass(), "control is feasible");
            c.gt(maxent - gaussian_log_det(other), 0.0, "log-det margin over correlated increments");
        }
    }
}

// 5. Tridiagonal inverse: sorted-uniform reference grid, random draws, SS negative control.
void tridiag_suite(Criterion& c) {
    const auto draws = matlab_default_sorted_uniforms(10);
    std::vector<double> printed(oracle::kMatlabDefaultRand.begin(), oracle::kMatlabDefaultRand.end());
    std::sort(printed.begin(), printed.end());
    for (std::size_t i = 0; i < 10; ++i) c.le(std::abs(draws[i] - printed[i]), 5e-5, "reference grid grid");
    {
        const Eigen::MatrixXd k = dc_gram_direct(0.2, 0.3, draws);
        c.le(off_band_direct(oracle_inverse(k)), 1e-8, "reference grid dense inverse off-band ratio");
        const auto km = assemble(KernelSpec::dc(0.2, 0.3), TimeGrid::half_line(draws));
        const Eigen::MatrixXd inv = tridiagonal_inverse(km).to_dense();
        c.le((k * inv - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-10, "reference grid K Kinv - I");
    }
    std::mt19937_64 gen(55);
    std::uniform_real_distribution<double> rate(0.1, 1.0);
    std::uniform_real_distribution<double> gap(0.25, 1.75);
    std::uniform_int_distribution<std::size_t> size(3, 100);
    for (int k = 0; k < 50; ++k) {
        const double alpha = rate(gen);
        const double beta = rate(gen);
        const std::size_t n = size(gen);
        std::vector<double> t(n);
        double x = 0.0;
        for (auto& v : t) {
            v = x;
            x += gap(gen) / static_cast<double>(n);
        }
        const Eigen::MatrixXd kmat = dc_gram_direct(alpha, beta, t);
        const Eigen::MatrixXd inv =
            tridiagonal_inverse(assemble(KernelSpec::dc(alpha, beta), TimeGrid::half_line(t))).to_dense();
        const auto tag = " (draw " + std::to_string(k) + ", n=" + std::to_string(n) + ")";
        c.le((kmat * inv - Eigen::MatrixXd::Identity(kmat.rows(), kmat.cols())).cwiseAbs().maxCoeff(), 1e-10,
             "K Kinv - I" + tag);
        c.le(off_band_direct(oracle_inverse(kmat)), 1e-8, "dense inverse off-band ratio" + tag);
    }
    for (std::size_t n : {4u, 6u, 10u, 20u}) {
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = 3.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    static_cast<double>(oracle::ss_kernel_ld(0.5L, t[i], t[j]));
            }
        }
        c.gt(off_band_direct(oracle_inverse(k)), 1e-3, "SS control off-band ratio n=" + std::to_string(n));
    }
}

// 6. Estimator: impulse Gram, noise-free recovery, path monotonicity, self-convergence.
void estimator_suite(Criterion& c) {
    auto even = [](double first, double step, std::size_t n) {
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = first + step * static_cast<double>(i);
        return t;
    };
    auto make = [](std::vector<double> t, InputSignal u) {
        Dataset d;
        d.outputs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(t.size()));
        d.output_times = std::move(t);
        d.input = std::move(u);
        return d;
    };
    {
        const auto t = even(0.1, 0.45, 12);
        const auto ok = output_kernel(KernelSpec::dc(0.9, 0.35), make(t, ImpulseInput{}));
        c.le((ok.gram - dc_gram_direct(0.9, 0.35, t)).cwiseAbs().maxCoeff(), 1e-12, "impulse A vs Gram");
    }
    {
        auto data = make(even(0.0, 0.1, 51), ImpulseInput{});
        for (std::size_t i = 0; i < 51; ++i) data.outputs(static_cast<Eigen::Index>(i)) = std::exp(-data.output_times[i]);
        const auto result = estimate(output_kernel(KernelSpec::tc(0.5), data), 1e-10);
        double worst = 0.0;
        for (int k = 0; k <= 1000; ++k) {
            const double t = 0.005 * k;
            worst = std::max(worst, std::abs(reconstruct(result, t) - std::exp(-t)));
        }
        c.le(worst, 1e-3, "noise-free recovery of exp(-t) on [0, 5]");
    }
    {
        auto data = make(even(0.0, 0.2, 25), StepInput{});
        std::mt19937_64 gen(9);
        std::normal_distribution<double> noise(0.0, 0.02);
        for (std::size_t i = 0; i < 25; ++i) {
            // step response of exp(-t) is 1 - exp(-t)
            data.outputs(static_cast<Eigen::Index>(i)) = 1.0 - std::exp(-data.output_times[i]) + noise(gen);
        }
        const auto ok = output_kernel(KernelSpec::dc(0.8, 0.5), data);
        double prev = std::numeric_limits<double>::infinity();
        for (double g : log_grid(1e-6, 1e3, 20)) {
            const double norm = solve_regularized(ok.gram, data.outputs, g).norm();
            c.le(norm, prev * (1.0 + 1e-12), "coefficient norm non-increasing in gamma");
            prev = norm;
        }
    }
    {
        const auto data = make(even(0.4, 0.6, 6), ExpSumInput{{{1.0, 0.5}, {-0.7, 2.5}}});
        QuadratureConfig cfg;
        cfg.convolution_panels = 1;
        std::vector<Eigen::MatrixXd> level;
        for (int r = 0; r < 4; ++r) level.push_back(output_kernel(KernelSpec::dc(0.7, 0.45), data, cfg.refined(r)).gram);
        double prev = (level[1] - level[0]).cwiseAbs().maxCoeff();
        c.gt(prev, 1e-12, "coarsest refinement changes the result");
        for (std::size_t r = 2; r < level.size() && prev > 1e-12; ++r) {
            const double change = (level[r] - level[r - 1]).cwiseAbs().maxCoeff();
            c.expect(prev / change >= 2.0, "self-convergence factor >= 2 at level " + std::to_string(r));
            prev = change;
        }
    }
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// 7. The shipped default config passes `dck verify` within 60 s, byte-reproducibly.
void determinism_suite(Criterion& c) {
    const auto base = std::filesystem::temp_directory_path() / "dck_acceptance";
    std::filesystem::remove_all(base);
    std::string outputs[2][2];
    for (int run = 0; run < 2; ++run) {
        const auto dir = base / ("run" + std::to_string(run));
        const std::string cmd = std::string(DCK_CLI_PATH) + " verify --config " + DCK_DEFAULT_CONFIG + " --out " +
                                dir.string() + " 2>" + (base / ("log" + std::to_string(run))).string();
        std::filesystem::create_directories(base);
        const auto start = Clock::now();
        const int status = std::system(cmd.c_str());
        const double took = seconds_since(start);
        c.expect(status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0,
                 "dck verify exits 0 (see " + (base / ("log" + std::to_string(run))).string() + ")");
        c.le(took, 60.0, "dck verify wall time [s]");
        outputs[run][0] = read_file(dir / "verify.csv");
        outputs[run][1] = read_file(dir / "report.json");
    }
    c.expect(!outputs[0][0].empty() && outputs[0][0] == outputs[1][0], "verify.csv byte-identical across runs");
    c.expect(!outputs[0][1].empty() && outputs[0][1] == outputs[1][1], "report.json byte-identical across runs");
    c.expect(outputs[0][0].find(",false\n") == std::string::npos, "no failed rows in verify.csv");
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<void(Criterion&)> body;
        double time_limit;  // seconds; <= 0 means no separate limit
    };
    const Entry entries[] = {
        {1, "identity suite", identity_suite, 1.0},   {2, "mercer suite", mercer_suite, 30.0},
        {3, "norm suite", norm_suite, 0.0},           {4, "maxent suite", maxent_suite, 0.0},
        {5, "tridiagonal suite", tridiag_suite, 0.0}, {6, "estimator suite", estimator_suite, 0.0},
        {7, "end-to-end determinism", determinism_suite, 0.0},
    };
    int failed = 0;
    for (const auto& e : entries) {
        Criterion c;
        const auto start = Clock::now();
        try {
            e.body(c);
        } catch (const std::exception& ex) {
            c.expect(false, std::string("exception: ") + ex.what());
        }
        const double took = seconds_since(start);
        if (e.time_limit > 0.0) c.le(took, e.time_limit, "runtime [s]");
        std::printf("%s criterion %d (%s): %d checks, %.2f s%s%s\n", c.pass() ? "PASS" : "FAIL", e.id, e.name,
                    c.checks(), took, c.pass() ? "" : ": ", c.failure().c_str());
        failed += !c.pass();
    }
    std::printf("%d of 7 criteria passed\n", 7 - failed);
    return failed == 0 ? 0 : 1;
}
