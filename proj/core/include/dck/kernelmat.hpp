#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dck/kernels.hpp"
#include "dck/maxent.hpp"
#include "dck/time_grid.hpp"

namespace dck {

/// Gram matrix k(t_i, t_j) of a kernel on a grid. Entries are computed on
/// the upper triangle and mirrored, so the matrix is symmetric bit for bit.
struct KernelMatrix {
    KernelSpec spec;
    TimeGrid grid;
    Eigen::MatrixXd entries;
};

/// Throws InputError when the grid domain does not match the kernel.
[[nodiscard]] KernelMatrix assemble(const KernelSpec& spec, const TimeGrid& grid);

/// Symmetric tridiagonal matrix stored by its two distinct diagonals.
struct TridiagonalMatrix {
    Eigen::VectorXd diag;  ///< length n
    Eigen::VectorXd off;   ///< length n - 1; entry (i, i+1) and (i+1, i)

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(diag.size()); }
    [[nodiscard]] Eigen::MatrixXd to_dense() const;
};

/// Exponential gaps below this make the Markov innovation variances unusable.
inline constexpr double kMinExponentialGap = 1e-14;

/// Inverse of a DC/TC Gram matrix built from the Markov recursion: with B
/// unit upper bidiagonal, B_{i,i+1} = -a_i, one has B K B^T = D, hence
///   K^{-1} = B^T D^{-1} B,
///   diagonal j:      1 / d_j + a_{j-1}^2 / d_{j-1}
///   off-diagonal j:  -a_j / d_j
/// Throws ConditioningError naming the interval [t_i, t_{i+1}] when
/// e^{-2 beta t_i} - e^{-2 beta t_{i+1}} < kMinExponentialGap.
[[nodiscard]] TridiagonalMatrix tridiagonal_inverse(const KernelMatrix& km);

/// B^{-1} D B^{-T} from the Markov coefficients, i.e. the covariance implied
/// by the factorization; reproduces the Gram matrix.
[[nodiscard]] Eigen::MatrixXd markov_factor_product(const TimeGrid& grid, const KernelSpec& spec);

struct PsdVerdict {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    bool pass = false;  ///< lambda_min >= -1e-10 lambda_max
};

[[nodiscard]] PsdVerdict psd_check(const Eigen::MatrixXd& entries);
[[nodiscard]] inline PsdVerdict psd_check(const KernelMatrix& km) { return psd_check(km.entries); }

/// Largest matrix size accepted by the dense cross-check routines.
inline constexpr std::size_t kDenseLimit = 512;

/// General-purpose LU inverse, for cross-checks only (n <= kDenseLimit).
[[nodiscard]] Eigen::MatrixXd dense_inverse(const Eigen::MatrixXd& m);

/// max_{|i-j| >= 2} |m_ij| / max_ij |m_ij|; 0 for n < 3 or a zero matrix.
[[nodiscard]] double off_band_ratio(const Eigen::MatrixXd& m);

/// max_ij |m_ij - identity_ij|
[[nodiscard]] double identity_deviation(const Eigen::MatrixXd& m);

/// Sorted uniforms reproducing `sort(rand(n, 1))` from Matlab's default
/// generator state (Mersenne twister, seed 5489, 53-bit draws).
[[nodiscard]] std::vector<double> matlab_default_sorted_uniforms(std::size_t n, std::uint32_t seed = 5489u);

}  // namespace dck
