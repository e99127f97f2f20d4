#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dck/error.hpp"
#include "dck/kernels.hpp"
#include "oracles.hpp"

namespace dck {
namespace {

std::vector<double> uniform_points(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return out;
}

TEST(Kernels, PointValues) {
    EXPECT_NEAR(eval_kernel(KernelSpec::dc(1.0, 0.5), 1.0, 2.0), std::exp(-3.5), 1e-16);
    EXPECT_DOUBLE_EQ(eval_kernel(KernelSpec::spline1(), 0.3, 0.7), 0.3);
    EXPECT_NEAR(eval_kernel(KernelSpec::gen_spline1(0.5), 0.25, 0.25), 0.0625, 1e-16);
    EXPECT_NEAR(eval_kernel(KernelSpec::ss(1.0), 1.0, 1.0), std::exp(-3.0) / 3.0, 1e-16);
    EXPECT_NEAR(eval_kernel(KernelSpec::spline2(), 0.2, 0.6), 0.2 * 0.6 * 0.2 / 2 - 0.008 / 6, 1e-16);
}

TEST(Kernels, Symmetric) {
    const KernelSpec specs[] = {KernelSpec::dc(1.3, 0.4), KernelSpec::ss(0.7), KernelSpec::tc(0.2)};
    for (const auto& k : specs) {
        for (double t : {0.0, 0.3, 2.0, 7.5}) {
            for (double s : {0.0, 1.1, 4.0}) EXPECT_EQ(eval_kernel(k, t, s), eval_kernel(k, s, t));
        }
    }
}

TEST(Kernels, TcIsDcWithEqualRates) {
    const auto tc = KernelSpec::tc(0.5);
    const auto dc = KernelSpec::dc(0.5, 0.5);
    EXPECT_EQ(tc.rho(), 0.0);
    EXPECT_EQ(dc.rho(), 0.0);
    for (double t : {0.0, 1.0, 2.0}) {
        for (double s : {0.0, 1.0, 2.0}) EXPECT_EQ(eval_kernel(tc, t, s), eval_kernel(dc, t, s));
    }
}

TEST(Kernels, RhoFromRates) { EXPECT_DOUBLE_EQ(KernelSpec::dc(1.0, 0.5).rho(), 0.5); }

TEST(Kernels, RejectsInvalidHyperparameters) {
    EXPECT_THROW((void)KernelSpec::dc(1.0, 0.0), InputError);
    EXPECT_THROW((void)KernelSpec::dc(-0.2, 0.3), InputError);
    EXPECT_THROW((void)KernelSpec::tc(0.0), InputError);
    EXPECT_THROW((void)KernelSpec::ss(-1.0), InputError);
    EXPECT_THROW((void)KernelSpec::gen_spline1(-0.5), InputError);
    EXPECT_THROW((void)KernelSpec::dc(NAN, 1.0), InputError);
}

TEST(Kernels, RejectsPointsOutsideDomain) {
    EXPECT_THROW((void)eval_kernel(KernelSpec::dc(1.0, 0.5), -0.1, 1.0), InputError);
    EXPECT_THROW((void)eval_kernel(KernelSpec::spline1(), 0.5, 1.5), InputError);
    EXPECT_THROW((void)eval_kernel(KernelSpec::ss(1.0), INFINITY, 1.0), InputError);
}

TEST(Kernels, GenSplineVanishesOnAxes) {
    EXPECT_EQ(eval_kernel(KernelSpec::gen_spline1(-0.4), 0.0, 0.5), 0.0);
    EXPECT_EQ(eval_kernel(KernelSpec::gen_spline1(2.0), 0.7, 0.0), 0.0);
}

TEST(StableSplineIdentity, SmallGrids) {
    const std::vector<double> g1{0, 0.5, 1, 2, 5};
    EXPECT_LE(verify_stable_spline_identity(KernelSpec::dc(1.0, 0.5), g1), 1e-14);
    const std::vector<double> g2{0, 1, 3};
    EXPECT_LE(verify_stable_spline_identity(KernelSpec::tc(0.7), g2), 1e-14);
}

TEST(StableSplineIdentity, SsAgainstExtendedPrecision) {
    const auto grid = uniform_points(0.0, 10.0, 50);
    const double alpha = 0.4;
    double worst = 0.0;
    for (double t : grid) {
        for (double s : grid) {
            const long double ref = oracle::ss_kernel_ld(alpha, t, s);
            const long double via_spline = oracle::spline2_ld(std::exp(-static_cast<long double>(alpha) * t),
                                                              std::exp(-static_cast<long double>(alpha) * s));
            ASSERT_LE(std::fabs(ref - via_spline), 1e-17L);
            worst = std::max(worst, std::abs(eval_kernel(KernelSpec::ss(alpha), t, s) - static_cast<double>(ref)));
        }
    }
    EXPECT_LE(worst, 1e-15);
    EXPECT_LE(verify_stable_spline_identity(KernelSpec::ss(alpha), grid), 1e-13);
}

TEST(StableSplineIdentity, DcFamilyOnWideGrid) {
    const auto grid = uniform_points(0.0, 10.0, 50);
    for (const auto& spec : {KernelSpec::dc(0.9, 0.3), KernelSpec::dc(0.2, 0.6), KernelSpec::tc(1.5)}) {
        EXPECT_LE(verify_stable_spline_identity(spec, grid), 1e-13) << spec.describe();
    }
}

TEST(StableSplineIdentity, RejectsUnitSquareKernels) {
    const std::vector<double> g{0.1};
    EXPECT_THROW((void)verify_stable_spline_identity(KernelSpec::spline1(), g), InputError);
}

}  // namespace
}  // namespace dck
