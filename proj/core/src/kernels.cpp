#include "dck/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dck/error.hpp"

namespace dck {

namespace {

void require_positive(double value, const char* name) {
    if (!std::isfinite(value) || !(value > 0.0)) {
        std::ostringstream os;
        os << name << " must be finite and > 0 (got " << value << ")";
        throw InputError(os.str());
    }
}

void check_point(const KernelSpec& spec, double x) {
    if (!std::isfinite(x) || x < 0.0) {
        std::ostringstream os;
        os << spec.describe() << ": point " << x << " is outside [0, inf)";
        throw InputError(os.str());
    }
    if (spec.on_unit_square() && x > 1.0) {
        std::ostringstream os;
        os << spec.describe() << ": point " << x << " is outside [0, 1]";
        throw InputError(os.str());
    }
}

// exp(-a (t + s)) exp(-b |t - s|) with |t - s| taken as hi - lo.
double decaying_correlated(double a, double b, double lo, double hi) {
    return std::exp(-a * (lo + hi)) * std::exp(-b * (hi - lo));
}

}  // namespace

std::string_view to_string(KernelKind kind) noexcept {
    switch (kind) {
        case KernelKind::SS: return "SS";
        case KernelKind::TC: return "TC";
        case KernelKind::DC: return "DC";
        case KernelKind::Spline1: return "Spline1";
        case KernelKind::Spline2: return "Spline2";
        case KernelKind::GenSpline1: return "GenSpline1";
    }
    return "?";
}

KernelSpec KernelSpec::ss(double alpha) {
    require_positive(alpha, "SS alpha");
    return {KernelKind::SS, alpha, 0.0, 0.0};
}

KernelSpec KernelSpec::tc(double beta) {
    require_positive(beta, "TC beta");
    return {KernelKind::TC, beta, beta, 0.0};
}

KernelSpec KernelSpec::dc(double alpha, double beta) {
    require_positive(alpha, "DC alpha");
    require_positive(beta, "DC beta");
    const double rho = (alpha - beta) / (2.0 * beta);
    // rho > -1/2 is equivalent to alpha > 0, already enforced.
    return {KernelKind::DC, alpha, beta, rho};
}

KernelSpec KernelSpec::spline1() { return {KernelKind::Spline1, 0.0, 0.0, 0.0}; }

KernelSpec KernelSpec::spline2() { return {KernelKind::Spline2, 0.0, 0.0, 0.0}; }

KernelSpec KernelSpec::gen_spline1(double rho) {
    if (!std::isfinite(rho) || !(rho > -0.5)) {
        std::ostringstream os;
        os << "GenSpline1 rho must be > -0.5 (got " << rho << ")";
        throw InputError(os.str());
    }
    return {KernelKind::GenSpline1, 0.0, 0.0, rho};
}

bool KernelSpec::on_unit_square() const noexcept {
    return kind_ == KernelKind::Spline1 || kind_ == KernelKind::Spline2 || kind_ == KernelKind::GenSpline1;
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind_);
    switch (kind_) {
        case KernelKind::SS: os << "(alpha=" << alpha_ << ")"; break;
        case KernelKind::TC: os << "(beta=" << beta_ << ")"; break;
        case KernelKind::DC: os << "(alpha=" << alpha_ << ", beta=" << beta_ << ")"; break;
        case KernelKind::GenSpline1: os << "(rho=" << rho_ << ")"; break;
        default: break;
    }
    return os.str();
}

double spline1_kernel(double tau, double nu) { return std::min(tau, nu); }

double spline2_kernel(double tau, double nu) {
    const double lo = std::min(tau, nu);
    const double hi = std::max(tau, nu);
    return 0.5 * lo * hi * lo - lo * lo * lo / 6.0;
}

double gen_spline1_kernel(double tau, double nu, double rho) {
    const double lo = std::min(tau, nu);
    const double hi = std::max(tau, nu);
    // tau^rho nu^rho min -> 0 as min -> 0 whenever rho > -1/2.
    if (lo == 0.0) return 0.0;
    return std::pow(lo, rho) * std::pow(hi, rho) * lo;
}

double eval_kernel(const KernelSpec& spec, double t, double s) {
    check_point(spec, t);
    check_point(spec, s);
    const double lo = std::min(t, s);
    const double hi = std::max(t, s);
    switch (spec.kind()) {
        case KernelKind::SS: {
            const double a = spec.alpha();
            return std::exp(-a * (lo + hi)) * std::exp(-a * hi) / 2.0 - std::exp(-3.0 * a * hi) / 6.0;
        }
        case KernelKind::TC:
        case KernelKind::DC:
            return decaying_correlated(spec.alpha(), spec.beta(), lo, hi);
        case KernelKind::Spline1: return spline1_kernel(lo, hi);
        case KernelKind::Spline2: return spline2_kernel(lo, hi);
        case KernelKind::GenSpline1: return gen_spline1_kernel(lo, hi, spec.rho());
    }
    return 0.0;
}

double verify_stable_spline_identity(const KernelSpec& spec, std::span<const double> grid) {
    if (spec.kind() != KernelKind::SS && !spec.is_dc_family()) {
        throw InputError("stable-spline identity is defined for SS, TC and DC kernels only");
    }
    double worst = 0.0;
    for (double t : grid) {
        for (double s : grid) {
            const double lhs = eval_kernel(spec, t, s);
            double rhs = 0.0;
            switch (spec.kind()) {
                case KernelKind::SS:
                    rhs = spline2_kernel(std::exp(-spec.alpha() * t), std::exp(-spec.alpha() * s));
                    break;
                case KernelKind::TC:
                    rhs = spline1_kernel(std::exp(-2.0 * spec.beta() * t), std::exp(-2.0 * spec.beta() * s));
                    break;
                default:
                    rhs = gen_spline1_kernel(std::exp(-2.0 * spec.beta() * t), std::exp(-2.0 * spec.beta() * s),
                                             spec.rho());
                    break;
            }
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

}  // namespace dck
