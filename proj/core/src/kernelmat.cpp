#include "dck/kernelmat.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dck/error.hpp"
#include "dck/parallel.hpp"

namespace dck {

namespace {

using Index = Eigen::Index;

void require_matching_domain(const KernelSpec& spec, const TimeGrid& grid) {
    const bool unit = grid.domain() == TimeGrid::Domain::Unit01;
    if (unit != spec.on_unit_square()) {
        throw InputError("grid domain does not match kernel " + spec.describe());
    }
}

}  // namespace

KernelMatrix assemble(const KernelSpec& spec, const TimeGrid& grid) {
    require_matching_domain(spec, grid);
    const auto n = static_cast<Index>(grid.size());
    KernelMatrix km{spec, grid, Eigen::MatrixXd(n, n)};
    auto& e = km.entries;
    parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
        for (auto i = static_cast<Index>(begin); i < static_cast<Index>(end); ++i) {
            for (Index j = i; j < n; ++j) {
                e(i, j) = eval_kernel(spec, grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)]);
            }
        }
    });
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < i; ++j) e(i, j) = e(j, i);
    }
    return km;
}

Eigen::MatrixXd TridiagonalMatrix::to_dense() const {
    const Index n = diag.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m.diagonal() = diag;
    for (Index i = 0; i + 1 < n; ++i) {
        m(i, i + 1) = off(i);
        m(i + 1, i) = off(i);
    }
    return m;
}

TridiagonalMatrix tridiagonal_inverse(const KernelMatrix& km) {
    if (!km.spec.is_dc_family()) throw InputError("tridiagonal inverse needs a DC or TC kernel, got " + km.spec.describe());
    const std::size_t n = km.grid.size();
    if (n == 0) throw InputError("tridiagonal inverse of an empty grid");
    const double beta = km.spec.beta();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double gap = -std::exp(-2.0 * beta * km.grid[i]) * std::expm1(-2.0 * beta * (km.grid[i + 1] - km.grid[i]));
        if (gap < kMinExponentialGap) {
            std::ostringstream os;
            os << "grid points too close for a stable inverse: interval " << i << " [" << km.grid[i] << ", "
               << km.grid[i + 1] << "] has exponential gap " << gap;
            throw ConditioningError(os.str());
        }
    }
    const auto mc = dc_markov_coefficients(km.grid, km.spec);
    if (!(mc.innovation_variance[n - 1] > 0.0)) {
        throw ConditioningError("terminal variance underflows at t = " + std::to_string(km.grid[n - 1]));
    }
    TridiagonalMatrix out{Eigen::VectorXd(static_cast<Index>(n)), Eigen::VectorXd(static_cast<Index>(n - 1))};
    for (std::size_t j = 0; j < n; ++j) {
        double v = 1.0 / mc.innovation_variance[j];
        if (j > 0) v += mc.transition[j - 1] * mc.transition[j - 1] / mc.innovation_variance[j - 1];
        out.diag(static_cast<Index>(j)) = v;
        if (j + 1 < n) out.off(static_cast<Index>(j)) = -mc.transition[j] / mc.innovation_variance[j];
    }
    return out;
}

Eigen::MatrixXd markov_factor_product(const TimeGrid& grid, const KernelSpec& spec) {
    const auto mc = dc_markov_coefficients(grid, spec);
    const auto n = static_cast<Index>(grid.size());
    // B^{-1} is upper triangular with (i, j) = a_i a_{i+1} ... a_{j-1}.
    Eigen::MatrixXd binv = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        binv(i, i) = 1.0;
        for (Index j = i + 1; j < n; ++j) binv(i, j) = binv(i, j - 1) * mc.transition[static_cast<std::size_t>(j - 1)];
    }
    const Eigen::Map<const Eigen::VectorXd> d(mc.innovation_variance.data(), n);
    return binv * d.asDiagonal() * binv.transpose();
}

PsdVerdict psd_check(const Eigen::MatrixXd& entries) {
    PsdVerdict v;
    if (entries.size() == 0) {
        v.pass = true;
        return v;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries, Eigen::EigenvaluesOnly);
    v.lambda_min = solver.eigenvalues().minCoeff();
    v.lambda_max = solver.eigenvalues().maxCoeff();
    v.pass = v.lambda_min >= -1e-10 * v.lambda_max;
    return v;
}

Eigen::MatrixXd dense_inverse(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw InputError("dense inverse of a non-square matrix");
    if (static_cast<std::size_t>(m.rows()) > kDenseLimit) {
        throw InputError("dense inverse limited to n <= " + std::to_string(kDenseLimit));
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw ConditioningError("matrix is numerically singular");
    return lu.inverse();
}

double off_band_ratio(const Eigen::MatrixXd& m) {
    const double peak = m.cwiseAbs().maxCoeff();
    if (m.rows() < 3 || peak == 0.0) return 0.0;
    double worst = 0.0;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (std::abs(i - j) >= 2) worst = std::max(worst, std::abs(m(i, j)));
        }
    }
    return worst / peak;
}

double identity_deviation(const Eigen::MatrixXd& m) {
    return (m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

std::vector<double> matlab_default_sorted_uniforms(std::size_t n, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::vector<double> out(n);
    for (auto& x : out) {
        const double hi = static_cast<double>(gen() >> 5);
        const double lo = static_cast<double>(gen() >> 6);
        x = (hi * 67108864.0 + lo) / 9007199254740992.0;
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace dck
