#include "dck/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dck/error.hpp"

namespace dck {

namespace {

constexpr double kRelativeStep = 1e-6;
constexpr double kDerivativeTolerance = 1e-5;
constexpr int kDerivativeProbes = 10;

void require_dc_family(const KernelSpec& spec, const char* what) {
    if (!spec.is_dc_family()) throw InputError(std::string(what) + ": kernel must be DC or TC, got " + spec.describe());
}

// (2 rho + 1) beta, checked against alpha.
double dc_decay_threshold(const KernelSpec& spec) {
    const double threshold = (2.0 * spec.rho() + 1.0) * spec.beta();
    if (std::abs(threshold - spec.alpha()) > 1e-15 * std::max(1.0, spec.alpha())) {
        throw std::logic_error("inconsistent DC hyperparameters: (2 rho + 1) beta != alpha");
    }
    return threshold;
}

void check_derivative(const FunctionHandle& g) {
    if (!g.has_analytic_derivative()) return;
    const double horizon = g.decay_hint() && *g.decay_hint() > 0.0 ? 5.0 / *g.decay_hint() : 10.0;
    std::mt19937_64 gen(0x5eedULL);
    std::uniform_real_distribution<double> pick(0.0, horizon);
    std::vector<double> probes;
    while (static_cast<int>(probes.size()) < kDerivativeProbes) {
        const double t = pick(gen);
        const bool near_kink = std::any_of(g.kinks().begin(), g.kinks().end(),
                                           [t](double k) { return std::abs(t - k) < 1e-3; });
        if (!near_kink) probes.push_back(t);
    }
    const double mismatch = g.derivative_mismatch(probes);
    if (!(mismatch <= kDerivativeTolerance)) {
        std::ostringstream os;
        os << "analytic derivative disagrees with finite differences (relative mismatch " << mismatch << ")";
        throw InputError(os.str());
    }
}

std::vector<double> unit_breaks(std::span<const double> kinks, double beta) {
    std::vector<double> out;
    out.reserve(kinks.size());
    for (double k : kinks) out.push_back(std::exp(-2.0 * beta * k));
    return out;
}

// a * tau^{-power}, formed in log space: tau can be as small as the least
// normal double while a underflows towards zero.
double scaled(double a, double tau, double power) {
    if (a == 0.0) return 0.0;
    return std::copysign(std::exp(std::log(std::abs(a)) - power * std::log(tau)), a);
}

NormResult to_result(const AdaptiveEstimate& est, const char* what) {
    NormResult r;
    r.value = est.value;
    r.previous = est.previous;
    r.refinements = est.levels;
    if (!est.converged) {
        r.status = NormResult::Status::Diverged;
        std::ostringstream os;
        os << what << ": no convergence after " << est.levels << " refinements (last=" << est.value
           << ", previous=" << est.previous << ", innermost panel=" << est.innermost
           << "); integral diverges or converges too slowly";
        r.diagnostic = os.str();
    }
    return r;
}

NormResult screened_out(double gamma, const KernelSpec& spec) {
    NormResult r;
    r.status = NormResult::Status::Diverged;
    std::ostringstream os;
    os << "decay rate " << gamma << " fails the necessary membership condition for " << spec.describe();
    r.diagnostic = os.str();
    return r;
}

}  // namespace

FunctionHandle::FunctionHandle(Fn value, Fn derivative, std::optional<double> decay_hint, std::vector<double> kinks)
    : value_(std::move(value)),
      derivative_(std::move(derivative)),
      decay_hint_(decay_hint),
      kinks_(std::move(kinks)) {
    if (!value_) throw InputError("function handle needs a value evaluator");
}

FunctionHandle FunctionHandle::exp_sum(std::vector<std::pair<double, double>> coeff_rate) {
    std::optional<double> slowest;
    for (const auto& [c, gamma] : coeff_rate) {
        if (!std::isfinite(c) || !std::isfinite(gamma)) throw InputError("exp_sum: non-finite term");
        if (c != 0.0) slowest = slowest ? std::min(*slowest, gamma) : gamma;
    }
    auto value = [coeff_rate](double t) {
        double sum = 0.0;
        for (const auto& [c, gamma] : coeff_rate) sum += c * std::exp(-gamma * t);
        return sum;
    };
    auto derivative = [coeff_rate](double t) {
        double sum = 0.0;
        for (const auto& [c, gamma] : coeff_rate) sum -= c * gamma * std::exp(-gamma * t);
        return sum;
    };
    return FunctionHandle(value, derivative, slowest);
}

FunctionHandle FunctionHandle::kernel_section(const KernelSpec& spec, double t0) {
    require_dc_family(spec, "kernel_section");
    if (!(t0 >= 0.0) || !std::isfinite(t0)) throw InputError("kernel_section: t0 must be >= 0");
    auto value = [spec, t0](double s) { return eval_kernel(spec, t0, s); };
    auto derivative = [spec, t0](double s) {
        const double slope = s < t0 ? spec.beta() - spec.alpha() : -spec.alpha() - spec.beta();
        return slope * eval_kernel(spec, t0, s);
    };
    return FunctionHandle(value, derivative, spec.alpha() + spec.beta(), {t0});
}

FunctionHandle FunctionHandle::pullback(Fn f, Fn df, double beta) {
    if (!(beta > 0.0)) throw InputError("pullback: beta must be > 0");
    auto value = [f, beta](double t) { return f(std::exp(-2.0 * beta * t)); };
    Fn derivative;
    if (df) {
        derivative = [df, beta](double t) {
            const double tau = std::exp(-2.0 * beta * t);
            return -2.0 * beta * tau * df(tau);
        };
    }
    return FunctionHandle(value, derivative);
}

double FunctionHandle::finite_difference(double t) const {
    const double h = kRelativeStep * std::max(1.0, std::abs(t));
    if (t - h < 0.0) {
        return (-3.0 * value_(t) + 4.0 * value_(t + h) - value_(t + 2.0 * h)) / (2.0 * h);
    }
    return (value_(t + h) - value_(t - h)) / (2.0 * h);
}

double FunctionHandle::derivative(double t) const { return derivative_ ? derivative_(t) : finite_difference(t); }

double FunctionHandle::derivative_mismatch(std::span<const double> points) const {
    if (!derivative_) return 0.0;
    double worst = 0.0;
    for (double t : points) {
        const double exact = derivative_(t);
        worst = std::max(worst, std::abs(finite_difference(t) - exact) / (1.0 + std::abs(exact)));
    }
    return worst;
}

Membership membership_necessary_check(double gamma, const KernelSpec& spec) {
    require_dc_family(spec, "membership check");
    if (!(gamma > 0.0)) throw InputError("membership check: decay rate must be > 0");
    const double threshold = spec.kind() == KernelKind::TC ? spec.beta() : dc_decay_threshold(spec);
    return gamma > threshold ? Membership::PassesNecessary : Membership::FailsNecessary;
}

NormResult dc_norm_integral(const FunctionHandle& g, const KernelSpec& spec, const QuadratureConfig& cfg) {
    require_dc_family(spec, "dc_norm_integral");
    cfg.validate();
    if (g.decay_hint() && *g.decay_hint() > 0.0 &&
        membership_necessary_check(*g.decay_hint(), spec) == Membership::FailsNecessary) {
        return screened_out(*g.decay_hint(), spec);
    }
    check_derivative(g);
    const double beta = spec.beta();
    const double rho = spec.rho();
    // tau^{-(2 rho + 2)} (g'(t) / (2 beta) + rho g(t))^2 with t = -log(tau) / (2 beta).
    auto integrand = [&](double tau) {
        const double t = -std::log(tau) / (2.0 * beta);
        const double v = scaled(g.derivative(t) / (2.0 * beta) + rho * g(t), tau, rho + 1.0);
        return v * v;
    };
    const auto breaks = unit_breaks(g.kinks(), beta);
    return to_result(integrate_unit_adaptive(integrand, breaks, cfg), "DC norm integral");
}

NormResult tc_norm_integral(const FunctionHandle& g, const KernelSpec& spec, const QuadratureConfig& cfg) {
    if (!spec.is_dc_family() || spec.rho() != 0.0) {
        throw InputError("tc_norm_integral: kernel must be TC (or DC with alpha == beta), got " + spec.describe());
    }
    cfg.validate();
    if (g.decay_hint() && *g.decay_hint() > 0.0 &&
        membership_necessary_check(*g.decay_hint(), KernelSpec::tc(spec.beta())) == Membership::FailsNecessary) {
        return screened_out(*g.decay_hint(), spec);
    }
    check_derivative(g);
    const double beta = spec.beta();
    // e^{2 beta t} g'(t)^2 / (2 beta) dt = (g'(t) / (2 beta))^2 tau^{-2} d tau.
    auto integrand = [&](double tau) {
        const double t = -std::log(tau) / (2.0 * beta);
        const double v = scaled(g.derivative(t) / (2.0 * beta), tau, 1.0);
        return v * v;
    };
    const auto breaks = unit_breaks(g.kinks(), beta);
    return to_result(integrate_unit_adaptive(integrand, breaks, cfg), "TC norm integral");
}

NormResult genspline_norm_integral(const FunctionHandle::Fn& f, const FunctionHandle::Fn& df, double rho,
                                   const QuadratureConfig& cfg) {
    if (!f || !df) throw InputError("genspline_norm_integral: value and derivative are required");
    if (!(rho > -0.5)) throw InputError("genspline_norm_integral: rho must be > -0.5");
    cfg.validate();
    // d/dtau (f tau^{-rho}) = f' tau^{-rho} - rho f tau^{-rho-1}
    auto integrand = [&](double tau) {
        const double v = scaled(df(tau) - rho * f(tau) / tau, tau, rho);
        return v * v;
    };
    return to_result(integrate_unit_adaptive(integrand, {}, cfg), "generalized spline norm integral");
}

SeriesNorm dc_norm_series(const FunctionHandle& g, const EigenSystem& sys, std::size_t truncation,
                          const QuadratureConfig& cfg) {
    if (!sys.on_half_line()) throw InputError("dc_norm_series: eigen-system must belong to a DC/TC kernel");
    if (truncation == 0) throw InputError("dc_norm_series: truncation must be >= 1");
    SeriesNorm out;
    out.coefficients = project_onto_eigenfunctions(sys, [&g](double t) { return g(t); }, truncation, cfg, g.kinks());
    out.partial_sums.reserve(truncation);
    for (std::size_t i = 0; i < truncation; ++i) {
        const double c = out.coefficients[i];
        out.norm_sq += c * c / eigenvalue(i + 1);
        out.partial_sums.push_back(out.norm_sq);
    }
    return out;
}

}  // namespace dck
