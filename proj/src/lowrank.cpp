#include "sketchbench/lowrank.hpp"

#include "sketchbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sketchbench::lowrank {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_sketch_shape(const DenseMatrix& a, const DenseMatrix& omega) {
    if (a.empty()) throw Error(ErrorCode::InvalidInput, "empty input matrix");
    if (omega.rows() != a.cols()) {
        throw Error(ErrorCode::InvalidInput, "sketch has " + std::to_string(omega.rows()) + " rows, A has " +
                                                 std::to_string(a.cols()) + " columns");
    }
    const std::size_t p = std::min(a.rows(), a.cols());
    if (omega.cols() == 0 || omega.cols() > p) {
        throw Error(ErrorCode::InvalidRank,
                    "sketch width " + std::to_string(omega.cols()) + " must be in [1, " + std::to_string(p) + "]");
    }
}

// Orthonormal basis for range(Y) that tolerates rank loss.
DenseMatrix basis_by_svd(const DenseMatrix& y) {
    const linalg::ThinSVD svd = linalg::thin_svd(y);
    if (svd.s.empty() || svd.s.front() == 0.0) return DenseMatrix(y.rows(), 0);
    const double tol = double(std::max(y.rows(), y.cols())) * kEps * svd.s.front();
    std::size_t r = 0;
    while (r < svd.s.size() && svd.s[r] > tol) ++r;
    return svd.u.leading_columns(r);
}

// ||M||_2^2 from the eigenvalues of the smaller Gram matrix.
double spectral_norm_sq(const DenseMatrix& m) {
    if (m.empty()) return 0.0;
    const DenseMatrix g = m.rows() >= m.cols() ? multiply_tn(m, m) : multiply_nt(m, m);
    return std::max(0.0, linalg::symmetric_eigenvalues(g).back());
}

double sym_abs_max_eig(const DenseMatrix& s) {
    if (s.empty()) return 0.0;
    const auto ev = linalg::symmetric_eigenvalues(s);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

LowRankApprox factor_from_basis(const DenseMatrix& a, const DenseMatrix& q) {
    const DenseMatrix b = multiply_tn(q, a);
    linalg::ThinSVD svd = linalg::thin_svd(b);
    return {multiply(q, svd.u), std::move(svd.s), std::move(svd.vt), Form::svd};
}

} // namespace

DenseMatrix range_finder(const DenseMatrix& a, const DenseMatrix& omega, std::size_t q, bool stabilized) {
    check_sketch_shape(a, omega);
    if (!stabilized) {
        DenseMatrix y = multiply(a, omega);
        for (std::size_t i = 0; i < q; ++i) y = multiply(a, multiply_tn(a, y));
        return linalg::thin_qr(y).q;
    }
    DenseMatrix qm = linalg::thin_qr(multiply(a, omega)).q;
    for (std::size_t i = 0; i < q; ++i) {
        const DenseMatrix w = linalg::thin_qr(multiply_tn(a, qm)).q;
        qm = linalg::thin_qr(multiply(a, w)).q;
    }
    return qm;
}

LowRankApprox randomized_svd(const DenseMatrix& a, const DenseMatrix& omega, const SketchConfig& cfg) {
    if (cfg.ell != 0 && cfg.ell != omega.cols()) {
        throw Error(ErrorCode::InvalidInput, "config ell=" + std::to_string(cfg.ell) + " but sketch has " +
                                                 std::to_string(omega.cols()) + " columns");
    }
    return factor_from_basis(a, range_finder(a, omega, cfg.q, cfg.stabilized));
}

LowRankApprox nystrom(const DenseMatrix& a, const DenseMatrix& omega) {
    if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidInput, "Nystrom needs a square matrix");
    check_sketch_shape(a, omega);
    const std::size_t n = a.rows();
    const std::size_t ell = omega.cols();
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
    if (asym > 1e-10 * std::max(max_abs(a), std::numeric_limits<double>::min())) {
        throw Error(ErrorCode::InvalidInput, "Nystrom input is not symmetric (max |A - A^T| = " +
                                                 std::to_string(asym) + ")");
    }

    const DenseMatrix y = multiply(a, omega);
    const double ynorm = linalg::spectral_norm(y).value;
    double nu = std::sqrt(double(n)) * kEps * ynorm;
    if (nu == 0.0) nu = kEps;

    constexpr int kMaxRetries = 3;
    for (int attempt = 0; attempt <= kMaxRetries; ++attempt, nu *= 2.0) {
        const DenseMatrix y_nu = y + nu * omega;
        DenseMatrix g = multiply_tn(omega, y_nu);
        for (std::size_t i = 0; i < ell; ++i)
            for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i) = 0.5 * (g(i, j) + g(j, i));
        const auto c = linalg::cholesky_upper(g);
        if (!c) continue;
        const DenseMatrix b = linalg::solve_right_upper(y_nu, *c);
        linalg::ThinSVD svd = linalg::thin_svd(b);
        for (double& s : svd.s) s = std::max(s * s - nu, 0.0);
        // Clamping can break the ordering only among zeros, so s stays sorted.
        DenseMatrix vt = svd.u.transpose();
        return {std::move(svd.u), std::move(svd.s), std::move(vt), Form::nystrom};
    }
    throw Error(ErrorCode::ShiftRetry, "sketch Gram matrix not positive definite after " +
                                           std::to_string(kMaxRetries) + " shift doublings (final shift " +
                                           std::to_string(nu / 2.0) + ")");
}

LowRankApprox truncate(const LowRankApprox& approx, std::size_t k) {
    if (k == 0 || k > approx.rank()) {
        throw Error(ErrorCode::InvalidRank, "cannot truncate rank-" + std::to_string(approx.rank()) +
                                                " approximation to " + std::to_string(k));
    }
    LowRankApprox out;
    out.form = approx.form;
    out.u = approx.u.leading_columns(k);
    out.s.assign(approx.s.begin(), approx.s.begin() + std::ptrdiff_t(k));
    out.vt = approx.vt.block(0, 0, k, approx.vt.cols());
    return out;
}

double relative_error(const DenseMatrix& a, const LowRankApprox& approx) {
    return relative_error(a, approx, linalg::spectral_norm(a).value);
}

double relative_error(const DenseMatrix& a, const LowRankApprox& approx, double norm_a) {
    if (!(norm_a > 0.0)) throw Error(ErrorCode::InvalidInput, "relative error of a zero matrix");
    if (approx.u.rows() != a.rows() || approx.vt.cols() != a.cols()) {
        throw Error(ErrorCode::InvalidInput, "approximation shape does not match A");
    }
    const DenseMatrix residual = a - approx.dense();
    return linalg::spectral_norm(residual).value / norm_a;
}

SketchTerms sketch_terms(const linalg::SpectrumInfo& spectrum, const DenseMatrix& omega, double column_scale,
                         bool covariance) {
    if (!(column_scale > 0.0)) throw Error(ErrorCode::InvalidParam, "column scale must be positive");
    const std::size_t k = spectrum.k;
    const std::size_t ell = omega.cols();
    if (omega.rows() != spectrum.vk.rows()) {
        throw Error(ErrorCode::InvalidInput, "sketch rows do not match the spectrum dimension");
    }
    if (ell < k) {
        throw Error(ErrorCode::InvalidRank,
                    "sketch width " + std::to_string(ell) + " below target rank " + std::to_string(k));
    }
    const double iso = 1.0 / std::sqrt(column_scale);
    const DenseMatrix om1 = iso * multiply_tn(spectrum.vk, omega);
    DenseMatrix z = iso * multiply_tn(spectrum.v_perp, omega);
    for (std::size_t i = 0; i < z.rows(); ++i)
        for (double& x : z.row(i)) x *= spectrum.sigma_perp[i];

    SketchTerms out;
    const linalg::ThinSVD s1 = linalg::thin_svd(om1);
    out.sigma_min_omega1 = s1.s.back();
    // Relative to Omega itself: an Omega_1 that is pure rounding noise must not count.
    const double tol = double(std::max(k, ell)) * kEps * iso * frobenius_norm(omega);
    out.full_rank = out.sigma_min_omega1 > tol;

    if (out.full_rank) {
        // Omega_1^+ = V S^{-1} U^T with U square, so ||Z Omega_1^+|| = ||Z V S^{-1}||.
        DenseMatrix zv = multiply_nt(z, s1.vt);
        for (std::size_t i = 0; i < zv.rows(); ++i)
            for (std::size_t j = 0; j < k; ++j) zv(i, j) /= s1.s[j];
        out.t = std::sqrt(spectral_norm_sq(zv));
    } else {
        out.t = std::numeric_limits<double>::infinity();
    }

    if (covariance) {
        const double inv_ell = 1.0 / double(ell);
        DenseMatrix c1 = inv_ell * multiply_nt(om1, om1);
        for (std::size_t i = 0; i < k; ++i) c1(i, i) -= 1.0;
        out.eps_cov = sym_abs_max_eig(c1);
        const double sp = spectrum.sigma_perp_norm();
        if (sp > 0.0) {
            DenseMatrix c2 = inv_ell * multiply_nt(z, z);
            for (std::size_t i = 0; i < c2.rows(); ++i) c2(i, i) -= spectrum.sigma_perp[i] * spectrum.sigma_perp[i];
            out.eta = sym_abs_max_eig(c2) / (sp * sp);
        }
    }
    return out;
}

StructuralReport structural_report(const DenseMatrix& a, const linalg::SpectrumInfo& spectrum,
                                   const DenseMatrix& omega, std::size_t q, bool stabilized, double column_scale) {
    check_sketch_shape(a, omega);
    const SketchTerms terms = sketch_terms(spectrum, omega, column_scale, true);
    StructuralReport r;
    r.k = spectrum.k;
    r.q = q;
    r.sigma_perp_norm = spectrum.sigma_perp_norm();
    r.gamma_k = spectrum.gamma_k();
    r.t = terms.t;
    r.sigma_min_omega1 = terms.sigma_min_omega1;
    r.eta = terms.eta;
    r.eps_cov = terms.eps_cov;
    r.applicable = terms.full_rank;

    const double sp2 = r.sigma_perp_norm * r.sigma_perp_norm;
    if (r.eps_cov < 1.0 && terms.full_rank) {
        r.covariance_applicable = true;
        const double chain = sp2 * (1.0 + r.eta) / (1.0 - r.eps_cov);
        r.covariance_holds = r.t * r.t <= chain * (1.0 + kBoundSlack);
    }
    if (!r.applicable) return r;

    DenseMatrix qm;
    try {
        qm = range_finder(a, omega, q, stabilized);
    } catch (const RankDeficientError&) {
        DenseMatrix y = multiply(a, omega);
        for (std::size_t i = 0; i < q; ++i) y = multiply(a, multiply_tn(a, y));
        qm = basis_by_svd(y);
    }
    r.projection_residual_sq = spectral_norm_sq(a - multiply(qm, multiply_tn(qm, a)));
    const LowRankApprox approx = factor_from_basis(a, qm);
    r.factored_residual_sq = spectral_norm_sq(a - approx.dense());

    r.rhs = sp2 + std::pow(r.gamma_k, 4.0 * double(q)) * r.t * r.t;
    const double scale = std::max(r.rhs, max_abs(a) * max_abs(a) * kEps);
    r.bound_holds = r.projection_residual_sq <= r.rhs + kBoundSlack * scale;
    return r;
}

StructuralReport structural_report(const DenseMatrix& a, const DenseMatrix& omega, std::size_t k, std::size_t q) {
    return structural_report(a, linalg::split_spectrum(a, k), omega, q);
}

} // namespace sketchbench::lowrank
