#include "dck/mercer.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dck/error.hpp"

namespace dck {

namespace {

double spline_eigenfunction(std::size_t i, double tau) {
    return std::numbers::sqrt2 * std::sin((static_cast<double>(i) - 0.5) * std::numbers::pi * tau);
}

void check_index(std::size_t i) {
    if (i == 0) throw InputError("eigen-system indices are 1-based; got 0");
}

void check_domain(const EigenSystem& sys, double x) {
    if (!std::isfinite(x) || x < 0.0 || (!sys.on_half_line() && x > 1.0)) {
        std::ostringstream os;
        os << "eigen-system for " << sys.kernel().describe() << ": point " << x << " outside the domain";
        throw InputError(os.str());
    }
}

// Half-line point carried by nu in (0, 1] under nu = exp(-2 beta s).
double half_line_point(double beta, double nu) { return -std::log(nu) / (2.0 * beta); }

// d iota(s) / d nu, formed in log space so large s neither overflows nor underflows.
double half_line_jacobian(const Measure& mu, double s, double nu) {
    return std::exp(mu.log_density(s) - std::log(2.0 * mu.beta * nu));
}

// Integrates h over (0, 1] at the configured resolution and once refined.
template <class F>
double checked_unit_integral(F&& h, std::span<const double> breaks, bool graded, const QuadratureConfig& cfg,
                             const char* what) {
    const auto coarse_edges = unit_panel_edges(cfg, breaks, graded);
    const auto fine_edges = unit_panel_edges(cfg.refined(), breaks, graded);
    const double coarse = integrate_panels(coarse_edges, h);
    const double fine = integrate_panels(fine_edges, h);
    if (!std::isfinite(fine) || std::abs(fine - coarse) > cfg.tolerance * std::max(1.0, std::abs(fine))) {
        throw QuadratureError(std::string(what) + ": refinement disagreement above tolerance", coarse, fine);
    }
    return fine;
}

}  // namespace

double Measure::density(double x) const {
    switch (kind) {
        case Kind::Lebesgue01: return 1.0;
        case Kind::PowerWeight: return std::pow(x, -2.0 * rho);
        case Kind::ExpWeight: return 2.0 * beta * std::exp(2.0 * beta * (2.0 * rho - 1.0) * x);
    }
    return 0.0;
}

double Measure::log_density(double x) const {
    switch (kind) {
        case Kind::Lebesgue01: return 0.0;
        case Kind::PowerWeight: return -2.0 * rho * std::log(x);
        case Kind::ExpWeight: return std::log(2.0 * beta) + 2.0 * beta * (2.0 * rho - 1.0) * x;
    }
    return 0.0;
}

EigenSystem::EigenSystem(const KernelSpec& kernel, std::size_t truncation)
    : kernel_(kernel), truncation_(truncation) {
    if (truncation == 0) throw InputError("eigen-system truncation must be >= 1");
    switch (kernel.kind()) {
        case KernelKind::Spline1: measure_ = {Measure::Kind::Lebesgue01, 0.0, 0.0}; break;
        case KernelKind::GenSpline1: measure_ = {Measure::Kind::PowerWeight, 0.0, kernel.rho()}; break;
        case KernelKind::DC:
        case KernelKind::TC: measure_ = {Measure::Kind::ExpWeight, kernel.beta(), kernel.rho()}; break;
        default:
            throw InputError("no analytic eigen-system for " + kernel.describe());
    }
}

double eigenvalue(std::size_t i) {
    check_index(i);
    const double k = (static_cast<double>(i) - 0.5) * std::numbers::pi;
    return 1.0 / (k * k);
}

double eigenfunction(const EigenSystem& sys, std::size_t i, double x) {
    check_index(i);
    check_domain(sys, x);
    const double rho = sys.measure().rho;
    double tau = x;
    if (sys.on_half_line()) tau = std::exp(-2.0 * sys.measure().beta * x);
    if (rho == 0.0) return spline_eigenfunction(i, tau);
    // tau^rho sin(c tau) -> 0 at tau = 0 since rho > -1/2.
    if (tau == 0.0) return 0.0;
    return std::pow(tau, rho) * spline_eigenfunction(i, tau);
}

double truncated_expansion(const EigenSystem& sys, double t, double s) {
    double sum = 0.0;
    for (std::size_t i = 1; i <= sys.truncation(); ++i) {
        sum += eigenvalue(i) * eigenfunction(sys, i, t) * eigenfunction(sys, i, s);
    }
    return sum;
}

Eigen::MatrixXd eigenfunction_table(const EigenSystem& sys, std::span<const double> points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    const auto m = static_cast<Eigen::Index>(sys.truncation());
    Eigen::MatrixXd table(n, m);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
            table(r, c) = eigenfunction(sys, static_cast<std::size_t>(c + 1), points[static_cast<std::size_t>(r)]);
        }
    }
    return table;
}

Eigen::MatrixXd truncated_expansion_matrix(const EigenSystem& sys, std::span<const double> points) {
    const Eigen::MatrixXd table = eigenfunction_table(sys, points);
    Eigen::VectorXd lambda(table.cols());
    for (Eigen::Index c = 0; c < table.cols(); ++c) lambda(c) = eigenvalue(static_cast<std::size_t>(c + 1));
    return table * lambda.asDiagonal() * table.transpose();
}

double apply_integral_operator(const EigenSystem& sys, std::size_t i, double x, const QuadratureConfig& cfg) {
    check_index(i);
    check_domain(sys, x);
    cfg.validate();
    const KernelSpec& k = sys.kernel();
    const Measure& mu = sys.measure();
    const bool graded = mu.rho != 0.0;

    if (!sys.on_half_line()) {
        const double breaks[] = {x};
        auto integrand = [&](double nu) { return eval_kernel(k, x, nu) * eigenfunction(sys, i, nu) * mu.density(nu); };
        return checked_unit_integral(integrand, breaks, graded, cfg, "eigen-equation integral");
    }

    // d iota(s) = density(s) ds with ds = d nu / (2 beta nu).
    const double beta = mu.beta;
    const double breaks[] = {std::exp(-2.0 * beta * x)};
    auto integrand = [&](double nu) {
        const double s = half_line_point(beta, nu);
        return eval_kernel(k, x, s) * eigenfunction(sys, i, s) * half_line_jacobian(mu, s, nu);
    };
    return checked_unit_integral(integrand, breaks, graded, cfg, "eigen-equation integral");
}

double verify_eigen_equation(const EigenSystem& sys, std::size_t i, std::span<const double> probes,
                             const QuadratureConfig& cfg) {
    const double lambda = eigenvalue(i);
    double worst = 0.0;
    for (double x : probes) {
        const double lhs = apply_integral_operator(sys, i, x, cfg);
        worst = std::max(worst, std::abs(lhs - lambda * eigenfunction(sys, i, x)));
    }
    return worst;
}

double verify_orthonormality(const EigenSystem& sys, std::size_t i, std::size_t j, const QuadratureConfig& cfg) {
    check_index(i);
    check_index(j);
    cfg.validate();
    const Measure& mu = sys.measure();
    const bool graded = mu.rho != 0.0;
    if (!sys.on_half_line()) {
        auto integrand = [&](double nu) {
            return eigenfunction(sys, i, nu) * eigenfunction(sys, j, nu) * mu.density(nu);
        };
        return checked_unit_integral(integrand, {}, graded, cfg, "orthonormality integral");
    }
    const double beta = mu.beta;
    auto integrand = [&](double nu) {
        const double s = half_line_point(beta, nu);
        return eigenfunction(sys, i, s) * eigenfunction(sys, j, s) * half_line_jacobian(mu, s, nu);
    };
    return checked_unit_integral(integrand, {}, graded, cfg, "orthonormality integral");
}

Eigen::MatrixXd orthonormality_gram(const EigenSystem& sys, std::size_t count, const QuadratureConfig& cfg) {
    const auto n = static_cast<Eigen::Index>(count);
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = r; c < n; ++c) {
            gram(r, c) = verify_orthonormality(sys, static_cast<std::size_t>(r + 1), static_cast<std::size_t>(c + 1), cfg);
            gram(c, r) = gram(r, c);
        }
    }
    return gram;
}

std::vector<double> project_onto_eigenfunctions(const EigenSystem& sys, const std::function<double(double)>& g,
                                                std::size_t count, const QuadratureConfig& cfg,
                                                std::span<const double> breaks) {
    cfg.validate();
    const Measure& mu = sys.measure();
    const bool graded = mu.rho != 0.0;
    std::vector<double> unit_breaks(breaks.begin(), breaks.end());
    if (sys.on_half_line()) {
        for (double& b : unit_breaks) b = std::exp(-2.0 * mu.beta * b);
    }

    // g times the measure weight is shared by every coefficient: tabulate it
    // once per layout, then sweep the eigenfunctions over the same nodes.
    struct Nodes {
        std::vector<double> point;   // system coordinate
        std::vector<double> weight;  // quadrature weight times g times measure weight
    };
    auto tabulate = [&](const QuadratureConfig& c) {
        const auto edges = unit_panel_edges(c, unit_breaks, graded);
        const auto x = gauss_legendre_nodes();
        const auto w = gauss_legendre_weights();
        Nodes n;
        n.point.reserve((edges.size() - 1) * x.size());
        n.weight.reserve(n.point.capacity());
        for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
            const double half = 0.5 * (edges[p + 1] - edges[p]);
            const double mid = 0.5 * (edges[p + 1] + edges[p]);
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double nu = mid + half * x[k];
                if (sys.on_half_line()) {
                    const double s = half_line_point(mu.beta, nu);
                    n.point.push_back(s);
                    n.weight.push_back(half * w[k] * g(s) * half_line_jacobian(mu, s, nu));
                } else {
                    n.point.push_back(nu);
                    n.weight.push_back(half * w[k] * g(nu) * mu.density(nu));
                }
            }
        }
        return n;
    };
    const Nodes coarse = tabulate(cfg);
    const Nodes fine = tabulate(cfg.refined());
    auto integrate = [&](const Nodes& n, std::size_t i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n.point.size(); ++k) sum += n.weight[k] * eigenfunction(sys, i, n.point[k]);
        return sum;
    };

    std::vector<double> coeffs(count);
    for (std::size_t i = 1; i <= count; ++i) {
        const double a = integrate(coarse, i);
        const double b = integrate(fine, i);
        if (!std::isfinite(b) || std::abs(a - b) > cfg.tolerance * std::max(1.0, std::abs(b))) {
            throw QuadratureError("projection coefficient " + std::to_string(i) + ": refinement disagreement", a, b);
        }
        coeffs[i - 1] = b;
    }
    return coeffs;
}

double spline1_tail_bound(std::size_t truncation) {
    return 2.0 / (std::numbers::pi * std::numbers::pi * (static_cast<double>(truncation) - 0.5));
}

}  // namespace dck
