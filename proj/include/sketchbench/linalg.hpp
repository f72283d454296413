#pragma once

#include "sketchbench/matrix.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace sketchbench::linalg {

struct ThinQR {
    DenseMatrix q; ///< m x l, orthonormal columns
    DenseMatrix r; ///< l x l, upper triangular with nonnegative diagonal
};

struct ThinSVD {
    DenseMatrix u;         ///< m x r
    std::vector<double> s; ///< nonincreasing, nonnegative
    DenseMatrix vt;        ///< r x n

    std::size_t rank() const noexcept { return s.size(); }
};

/// Dominant/trailing split of the SVD at target rank k.
///
/// Blocks are thin: with p = min(m, n), `u_perp` is m x (p - k) and
/// `v_perp` is n x (p - k). For m >= n this covers the whole row space, so
/// V_perp^T Omega is exactly the trailing sketch block.
struct SpectrumInfo {
    std::size_t k = 0;
    DenseMatrix uk, u_perp, vk, v_perp;
    std::vector<double> sigma_k;    ///< sigma_1..sigma_k
    std::vector<double> sigma_perp; ///< sigma_{k+1}..sigma_p
    std::vector<double> gamma;      ///< gamma_j = sigma_{k+1} / sigma_j, j = 1..k

    double sigma_perp_norm() const noexcept { return sigma_perp.empty() ? 0.0 : sigma_perp.front(); }
    double gamma_k() const noexcept { return gamma.empty() ? 0.0 : gamma.back(); }
    /// sr(Sigma_perp) = ||Sigma_perp||_F^2 / ||Sigma_perp||_2^2
    double sigma_perp_stable_rank() const;
};

struct SpectralNormResult {
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Householder thin QR. Throws RankDeficientError when a diagonal entry of R
/// falls below max(m, l) * eps * ||Y||_F.
ThinQR thin_qr(const DenseMatrix& y);

/// Thin SVD by QR preprocessing followed by one-sided Jacobi on the
/// triangular factor (wide inputs are transposed first). Converges when every
/// pairwise column cosine is below 1e-14; throws ConvergenceError after 60 sweeps.
ThinSVD thin_svd(const DenseMatrix& a);

ThinSVD truncated_svd(const DenseMatrix& a, std::size_t k);

/// Moore-Penrose pseudoinverse; singular values below rel_tol * sigma_max are
/// dropped. rel_tol <= 0 selects max(m, n) * machine epsilon.
DenseMatrix pseudoinverse(const DenseMatrix& a, double rel_tol = -1.0);

/// Largest singular value by power iteration on A^T A from a fixed seeded
/// start vector. Stops when the estimate changes by less than tol relative.
SpectralNormResult spectral_norm(const DenseMatrix& a, double tol = 1e-10, std::size_t max_iter = 10000);

double stable_rank(const DenseMatrix& a);

SpectrumInfo split_spectrum(const DenseMatrix& a, std::size_t k);
SpectrumInfo split_spectrum(const ThinSVD& svd, std::size_t k);

double coherence(const DenseMatrix& w);
std::vector<double> leverage_scores(const DenseMatrix& vk);

/// Eigenvalues of a symmetric matrix in ascending order (Householder
/// tridiagonalization + implicit QL). Only the lower triangle is read.
std::vector<double> symmetric_eigenvalues(const DenseMatrix& s);

/// Upper-triangular R with R^T R = S, or nullopt if S is not numerically
/// positive definite.
std::optional<DenseMatrix> cholesky_upper(const DenseMatrix& s);

/// X with X * R = B for upper-triangular R.
DenseMatrix solve_right_upper(const DenseMatrix& b, const DenseMatrix& r);

} // namespace sketchbench::linalg
