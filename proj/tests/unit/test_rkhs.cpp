#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dck/error.hpp"
#include "dck/rkhs.hpp"
#include "oracles.hpp"

namespace dck {
namespace {

FunctionHandle decaying(double gamma) { return FunctionHandle::exp_sum({{1.0, gamma}}); }

// alpha from (beta, rho)
KernelSpec dc_from(double beta, double rho) { return KernelSpec::dc((2.0 * rho + 1.0) * beta, beta); }

TEST(ClosedForm, Values) {
    EXPECT_NEAR(oracle::dc_exp_norm_sq(0.5, 0.0, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(oracle::dc_exp_norm_sq(0.5, 0.5, 2.0), 1.125, 1e-15);
}

TEST(DcNorm, MatchesClosedForm) {
    auto r = dc_norm_integral(decaying(1.0), KernelSpec::dc(0.5, 0.5));
    ASSERT_TRUE(r.converged()) << r.diagnostic;
    EXPECT_NEAR(r.value, 1.0, 1e-8);
    r = dc_norm_integral(decaying(2.0), KernelSpec::dc(1.0, 0.5));
    ASSERT_TRUE(r.converged()) << r.diagnostic;
    EXPECT_NEAR(r.value, 1.125, 1.125e-8);
}

TEST(DcNorm, RandomTriples) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> beta_d(0.2, 2.0);
    std::uniform_real_distribution<double> rho_d(-0.4, 1.5);
    std::uniform_real_distribution<double> margin_d(0.1, 2.0);
    for (int k = 0; k < 10; ++k) {
        const double beta = beta_d(gen);
        const double rho = rho_d(gen);
        const double gamma = (2.0 * rho + 1.0) * beta * (1.0 + margin_d(gen));
        const double expect = oracle::dc_exp_norm_sq(beta, rho, gamma);
        const auto r = dc_norm_integral(decaying(gamma), dc_from(beta, rho));
        ASSERT_TRUE(r.converged()) << r.diagnostic;
        EXPECT_NEAR(r.value, expect, 1e-8 * expect) << beta << " " << rho << " " << gamma;
    }
}

TEST(DcNorm, BoundaryDecayDiverges) {
    const auto spec = KernelSpec::dc(1.0, 0.5);
    const auto hinted = dc_norm_integral(decaying(1.0), spec);
    EXPECT_FALSE(hinted.converged());
    EXPECT_FALSE(hinted.diagnostic.empty());
    // Same function without the hint: the quadrature itself must notice.
    const FunctionHandle bare([](double t) { return std::exp(-t); }, [](double t) { return -std::exp(-t); });
    const auto r = dc_norm_integral(bare, spec);
    EXPECT_FALSE(r.converged());
    EXPECT_NE(r.diagnostic.find("refinements"), std::string::npos);
}

TEST(DcNorm, WrongAnalyticDerivativeRejected) {
    const FunctionHandle bad([](double t) { return std::exp(-2.0 * t); }, [](double t) { return -std::exp(-2.0 * t); });
    EXPECT_THROW((void)dc_norm_integral(bad, KernelSpec::dc(1.0, 0.5)), InputError);
}

TEST(DcNorm, FiniteDifferenceFallback) {
    const FunctionHandle g([](double t) { return std::exp(-2.0 * t); });
    const auto r = dc_norm_integral(g, KernelSpec::dc(1.0, 0.5));
    ASSERT_TRUE(r.converged()) << r.diagnostic;
    EXPECT_NEAR(r.value, 1.125, 1e-6);
}

TEST(DcNorm, ReproducingProperty) {
    for (const auto& spec : {KernelSpec::dc(1.0, 0.5), KernelSpec::dc(0.3, 0.7), KernelSpec::tc(0.4)}) {
        for (double t0 : {0.0, 0.5, 2.0}) {
            const auto r = dc_norm_integral(FunctionHandle::kernel_section(spec, t0), spec);
            ASSERT_TRUE(r.converged()) << r.diagnostic;
            const double expect = std::exp(-2.0 * spec.alpha() * t0);
            EXPECT_NEAR(r.value, expect, 1e-6 * expect) << spec.describe() << " t0=" << t0;
        }
    }
}

TEST(TcNorm, ValuesAndAgreementWithDc) {
    const auto tc = KernelSpec::tc(0.5);
    const auto r = tc_norm_integral(decaying(1.0), tc);
    ASSERT_TRUE(r.converged());
    EXPECT_NEAR(r.value, 1.0, 1e-8);
    EXPECT_FALSE(tc_norm_integral(decaying(0.4), tc).converged());
    for (double gamma : {0.7, 1.3, 3.0}) {
        const double a = tc_norm_integral(decaying(gamma), tc).value;
        const double b = dc_norm_integral(decaying(gamma), KernelSpec::dc(0.5, 0.5)).value;
        EXPECT_NEAR(a, b, 1e-12 * a);
        EXPECT_NEAR(a, gamma * gamma / (4.0 * 0.5 * (gamma - 0.5)), 1e-8 * a);
    }
    EXPECT_THROW((void)tc_norm_integral(decaying(1.0), KernelSpec::dc(1.0, 0.5)), InputError);
}

TEST(Membership, Verdicts) {
    EXPECT_EQ(membership_necessary_check(1.0, KernelSpec::tc(0.5)), Membership::PassesNecessary);
    EXPECT_EQ(membership_necessary_check(0.9, KernelSpec::dc(1.0, 0.5)), Membership::FailsNecessary);
    EXPECT_EQ(membership_necessary_check(0.6, KernelSpec::dc(0.5, 0.5)),
              membership_necessary_check(0.6, KernelSpec::tc(0.5)));
    EXPECT_EQ(membership_necessary_check(0.6, KernelSpec::dc(0.5, 0.5)), Membership::PassesNecessary);
    EXPECT_THROW((void)membership_necessary_check(0.0, KernelSpec::tc(0.5)), InputError);
    EXPECT_THROW((void)membership_necessary_check(1.0, KernelSpec::ss(0.5)), InputError);
}

TEST(GenSplineNorm, IsometryWithDc) {
    const double beta = 0.5;
    const double rho = 0.5;
    const double gamma = 2.0;
    const double p = gamma / (2.0 * beta);  // g(t) = tau^p
    auto f = [p](double tau) { return std::pow(tau, p); };
    auto df = [p](double tau) { return p * std::pow(tau, p - 1.0); };
    const auto gs = genspline_norm_integral(f, df, rho);
    ASSERT_TRUE(gs.converged()) << gs.diagnostic;
    const auto dc = dc_norm_integral(decaying(gamma), dc_from(beta, rho));
    EXPECT_NEAR(gs.value, dc.value, 1e-9);
    const auto pulled = dc_norm_integral(FunctionHandle::pullback(f, df, beta), dc_from(beta, rho));
    EXPECT_NEAR(pulled.value, dc.value, 1e-9);
}

TEST(GenSplineNorm, ScaledIdentity) {
    // f = tau^{rho + 1}: d/dtau (f / tau^rho) = 1
    const double rho = -0.3;
    const auto r = genspline_norm_integral([rho](double x) { return std::pow(x, rho + 1.0); },
                                           [rho](double x) { return (rho + 1.0) * std::pow(x, rho); }, rho);
    ASSERT_TRUE(r.converged());
    EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(SeriesNorm, EigenfunctionAndZero) {
    const auto spec = KernelSpec::dc(1.0, 0.5);
    const EigenSystem sys(spec);
    const FunctionHandle psi1([&](double t) { return eigenfunction(sys, 1, t); });
    const auto s = dc_norm_series(psi1, sys, 20);
    EXPECT_NEAR(s.coefficients[0], 1.0, 1e-8);
    EXPECT_NEAR(s.norm_sq, std::numbers::pi * std::numbers::pi / 4.0, 1e-6);
    const auto z = dc_norm_series(FunctionHandle([](double) { return 0.0; }), sys, 10);
    EXPECT_EQ(z.norm_sq, 0.0);
    for (double c : z.coefficients) EXPECT_EQ(c, 0.0);
}

TEST(SeriesNorm, ApproachesIntegral) {
    const auto spec = KernelSpec::dc(0.5, 0.5);
    const auto s200 = dc_norm_series(decaying(1.0), EigenSystem(spec), 200);
    EXPECT_NEAR(s200.norm_sq, 1.0, 1e-2);
    const auto s500 = dc_norm_series(decaying(1.0), EigenSystem(spec), 500);
    EXPECT_NEAR(s500.norm_sq, 1.0, 2e-2);
    EXPECT_GE(s500.norm_sq, s200.norm_sq);
    for (std::size_t i = 1; i < s500.partial_sums.size(); ++i) {
        EXPECT_GE(s500.partial_sums[i], s500.partial_sums[i - 1]);
    }
}

TEST(FunctionHandle, DerivativeMismatch) {
    const auto g = decaying(1.5);
    const std::vector<double> pts{0.0, 0.5, 2.0};
    EXPECT_LT(g.derivative_mismatch(pts), 1e-8);
    const auto k = FunctionHandle::kernel_section(KernelSpec::dc(1.0, 0.5), 1.0);
    EXPECT_NEAR(k.derivative(0.5), (0.5 - 1.0) * std::exp(-1.5 - 0.25), 1e-15);
    ASSERT_EQ(k.kinks().size(), 1u);
    EXPECT_THROW(FunctionHandle(nullptr), InputError);
}

}  // namespace
}  // namespace dck
