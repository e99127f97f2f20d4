#pragma once

#include <span>
#include <string>
#include <string_view>

namespace dck {

enum class KernelKind { SS, TC, DC, Spline1, Spline2, GenSpline1 };

[[nodiscard]] std::string_view to_string(KernelKind kind) noexcept;

/// Kernel family plus hyperparameters.
///
/// Instances can only be obtained through the named constructors, which
/// validate the hyperparameters; evaluation never re-checks them.
///
///   SS(alpha)        alpha > 0                 domain [0, inf)^2
///   TC(beta)         beta > 0                  domain [0, inf)^2
///   DC(alpha, beta)  alpha > 0, beta > 0       domain [0, inf)^2
///   Spline1, Spline2                           domain [0, 1]^2
///   GenSpline1(rho)  rho > -1/2                domain [0, 1]^2
///
/// beta = 0 is not accepted for DC: the exponential coordinate change
/// tau = exp(-2 beta t) degenerates there.
class KernelSpec {
public:
    [[nodiscard]] static KernelSpec ss(double alpha);
    [[nodiscard]] static KernelSpec tc(double beta);
    [[nodiscard]] static KernelSpec dc(double alpha, double beta);
    [[nodiscard]] static KernelSpec spline1();
    [[nodiscard]] static KernelSpec spline2();
    [[nodiscard]] static KernelSpec gen_spline1(double rho);

    [[nodiscard]] KernelKind kind() const noexcept { return kind_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }

    /// Exponent of the generalized first-order spline kernel. For DC this is
    /// (alpha - beta) / (2 beta); for TC it is 0.
    [[nodiscard]] double rho() const noexcept { return rho_; }

    /// True for the kernels living on [0, 1]^2.
    [[nodiscard]] bool on_unit_square() const noexcept;

    /// DC and TC share a representation; TC(beta) behaves like DC(beta, beta).
    [[nodiscard]] bool is_dc_family() const noexcept { return kind_ == KernelKind::DC || kind_ == KernelKind::TC; }

    [[nodiscard]] std::string describe() const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

private:
    KernelSpec(KernelKind kind, double alpha, double beta, double rho) noexcept
        : kind_(kind), alpha_(alpha), beta_(beta), rho_(rho) {}

    KernelKind kind_;
    double alpha_;
    double beta_;
    double rho_;
};

/// k(t, s) for the given kernel. Throws InputError when t or s is outside the
/// kernel's domain (negative, non-finite, or above 1 for the spline kernels).
[[nodiscard]] double eval_kernel(const KernelSpec& spec, double t, double s);

/// First-order spline kernel min(tau, nu).
[[nodiscard]] double spline1_kernel(double tau, double nu);
/// Second-order spline kernel tau nu min / 2 - min^3 / 6.
[[nodiscard]] double spline2_kernel(double tau, double nu);
/// Generalized first-order spline kernel tau^rho nu^rho min(tau, nu).
[[nodiscard]] double gen_spline1_kernel(double tau, double nu, double rho);

/// Largest |k(t, s) - w(c(t), c(s))| over grid x grid, where w is the spline
/// kernel the stable kernel is built from and c the matching exponential
/// coordinate change:
///   SS: w2(exp(-alpha t), exp(-alpha s))
///   TC: w1(exp(-2 beta t), exp(-2 beta s))
///   DC: w1GS(exp(-2 beta t), exp(-2 beta s); (alpha - beta) / (2 beta))
[[nodiscard]] double verify_stable_spline_identity(const KernelSpec& spec, std::span<const double> grid);

}  // namespace dck
