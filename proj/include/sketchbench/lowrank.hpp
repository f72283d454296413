#pragma once

#include "sketchbench/linalg.hpp"
#include "sketchbench/matrix.hpp"

#include <cstddef>
#include <vector>

namespace sketchbench::lowrank {

struct SketchConfig {
    std::size_t ell = 0;
    std::size_t q = 0;
    /// Re-orthonormalize after every application of A and A^T. With
    /// stabilized = false, Y = (A A^T)^q A Omega is formed literally.
    bool stabilized = true;
};

enum class Form { svd, nystrom };

struct LowRankApprox {
    DenseMatrix u;
    std::vector<double> s;
    DenseMatrix vt;
    Form form = Form::svd;

    std::size_t rank() const noexcept { return s.size(); }
    DenseMatrix dense() const { return reconstruct(u, s, vt); }
};

/// Orthonormal basis Q of range((A A^T)^q A Omega). Throws RankDeficientError
/// if the sketch collapses.
DenseMatrix range_finder(const DenseMatrix& a, const DenseMatrix& omega, std::size_t q, bool stabilized);

/// Randomized SVD with q subspace iterations. Omega must be n x ell with
/// ell <= min(m, n); cfg.ell = 0 takes ell from Omega.
LowRankApprox randomized_svd(const DenseMatrix& a, const DenseMatrix& omega, const SketchConfig& cfg);

/// Shifted Nystrom approximation of a symmetric PSD matrix.
LowRankApprox nystrom(const DenseMatrix& a, const DenseMatrix& omega);

LowRankApprox truncate(const LowRankApprox& approx, std::size_t k);

/// ||A - approx||_2 / ||A||_2.
double relative_error(const DenseMatrix& a, const LowRankApprox& approx);
/// Same, with ||A||_2 supplied by the caller.
double relative_error(const DenseMatrix& a, const LowRankApprox& approx, double norm_a);

/// Quantities of the sketch split Omega_1 = V_k^T Omega, Omega_2 = V_perp^T Omega.
struct SketchTerms {
    double t = 0.0;                ///< ||Sigma_perp Omega_2 Omega_1^+||_2
    double sigma_min_omega1 = 0.0; ///< sigma_k(Omega_1), after isotropic rescaling
    double eta = 0.0;              ///< ||(1/ell) Z Z^T - Sigma_perp^2||_2 / ||Sigma_perp||_2^2
    double eps_cov = 0.0;          ///< ||(1/ell) Omega_1 Omega_1^T - I||_2
    bool full_rank = false;        ///< sigma_k(Omega_1) > 0
};

/// `column_scale` is c with E[omega omega^T] = c I; Omega is divided by sqrt(c)
/// before eta, eps_cov and sigma_min_omega1 are formed. T does not depend on it.
SketchTerms sketch_terms(const linalg::SpectrumInfo& spectrum, const DenseMatrix& omega, double column_scale = 1.0,
                         bool covariance = true);

struct StructuralReport {
    std::size_t k = 0;
    std::size_t q = 0;
    double sigma_perp_norm = 0.0;
    double gamma_k = 0.0;
    double t = 0.0;
    double sigma_min_omega1 = 0.0;
    double eta = 0.0;
    double eps_cov = 0.0;
    bool applicable = false;
    /// ||(I - Q Q^T) A||_2^2
    double projection_residual_sq = 0.0;
    /// ||A - U S V^T||_2^2 from the factored approximation
    double factored_residual_sq = 0.0;
    double rhs = 0.0;
    bool bound_holds = false;
    /// T^2 <= ||Sigma_perp||^2 (1 + eta) / (1 - eps_cov); only checked when eps_cov < 1.
    bool covariance_applicable = false;
    bool covariance_holds = false;
};

StructuralReport structural_report(const DenseMatrix& a, const linalg::SpectrumInfo& spectrum,
                                   const DenseMatrix& omega, std::size_t q, bool stabilized = false,
                                   double column_scale = 1.0);
StructuralReport structural_report(const DenseMatrix& a, const DenseMatrix& omega, std::size_t k, std::size_t q);

inline constexpr double kBoundSlack = 1e-8;

} // namespace sketchbench::lowrank
