#include "sketchbench/linalg.hpp"

#include "sketchbench/error.hpp"
#include "sketchbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sketchbench::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kJacobiTol = 1e-14;
constexpr int kJacobiMaxSweeps = 60;
constexpr std::uint64_t kPowerIterationSeed = 0x5eed5eed2024ull;

using Columns = std::vector<std::vector<double>>;

Columns to_columns(const DenseMatrix& a) {
    Columns c(a.cols(), std::vector<double>(a.rows()));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) c[j][i] = r[j];
    }
    return c;
}

DenseMatrix from_columns(const Columns& c, std::size_t rows) {
    DenseMatrix a(rows, c.size());
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t i = 0; i < rows; ++i) a(i, j) = c[j][i];
    return a;
}

double dot_from(const std::vector<double>& x, const std::vector<double>& y, std::size_t start) {
    double s = 0.0;
    for (std::size_t i = start; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

/// Householder QR without rank checking; R diagonal made nonnegative.
ThinQR householder_qr(const DenseMatrix& y) {
    const std::size_t m = y.rows();
    const std::size_t l = y.cols();
    if (l > m) {
        throw Error(ErrorCode::InvalidInput, "thin QR needs rows >= cols, got " + std::to_string(m) + "x" +
                                                 std::to_string(l));
    }
    Columns w = to_columns(y);
    Columns vs(l);
    std::vector<double> rdiag(l, 0.0);

    for (std::size_t j = 0; j < l; ++j) {
        std::vector<double>& x = w[j];
        double alpha = 0.0;
        {
            std::span<const double> tail(x.data() + j, m - j);
            alpha = norm2(tail);
        }
        std::vector<double> v(m - j, 0.0);
        if (alpha == 0.0) {
            rdiag[j] = 0.0;
            vs[j] = std::move(v);
            continue;
        }
        const double sign = x[j] >= 0.0 ? 1.0 : -1.0;
        for (std::size_t i = j; i < m; ++i) v[i - j] = x[i];
        v[0] += sign * alpha;
        const double vnorm = norm2(v);
        for (double& t : v) t /= vnorm;
        rdiag[j] = -sign * alpha;
        for (std::size_t c = j; c < l; ++c) {
            std::vector<double>& col = w[c];
            double s = 0.0;
            for (std::size_t i = j; i < m; ++i) s += v[i - j] * col[i];
            s *= 2.0;
            for (std::size_t i = j; i < m; ++i) col[i] -= s * v[i - j];
        }
        vs[j] = std::move(v);
    }

    DenseMatrix r(l, l);
    for (std::size_t j = 0; j < l; ++j) {
        for (std::size_t i = 0; i < j; ++i) r(i, j) = w[j][i];
        r(j, j) = rdiag[j];
    }

    Columns q(l, std::vector<double>(m, 0.0));
    for (std::size_t c = 0; c < l; ++c) q[c][c] = 1.0;
    for (std::size_t jj = l; jj-- > 0;) {
        const std::vector<double>& v = vs[jj];
        for (std::size_t c = jj; c < l; ++c) {
            std::vector<double>& col = q[c];
            double s = 0.0;
            for (std::size_t i = jj; i < m; ++i) s += v[i - jj] * col[i];
            if (s == 0.0) continue;
            s *= 2.0;
            for (std::size_t i = jj; i < m; ++i) col[i] -= s * v[i - jj];
        }
    }
    for (std::size_t j = 0; j < l; ++j) {
        if (r(j, j) < 0.0) {
            for (std::size_t c = j; c < l; ++c) r(j, c) = -r(j, c);
            for (double& t : q[j]) t = -t;
        }
    }
    return {from_columns(q, m), std::move(r)};
}

/// Extends the nonzero columns of `u` (given by `keep`) to an orthonormal set
/// by Gram-Schmidt against coordinate vectors.
void complete_orthonormal(Columns& u, const std::vector<bool>& keep) {
    if (u.empty()) return;
    const std::size_t m = u.front().size();
    std::size_t candidate = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (keep[j]) continue;
        while (candidate < m) {
            std::vector<double> e(m, 0.0);
            e[candidate++] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t c = 0; c < u.size(); ++c) {
                    if (c == j || (!keep[c] && c > j)) continue;
                    const double s = dot_from(u[c], e, 0);
                    for (std::size_t i = 0; i < m; ++i) e[i] -= s * u[c][i];
                }
            }
            const double nrm = norm2(e);
            if (nrm > 0.5) {
                for (double& t : e) t /= nrm;
                u[j] = std::move(e);
                break;
            }
        }
    }
}

/// One-sided Jacobi on a square (or tall) matrix given as columns.
/// On return g holds U*S column-wise and v the right singular vectors.
void one_sided_jacobi(Columns& g, Columns& v) {
    const std::size_t n = g.size();
    // Columns below rounding level carry no direction; rotating them against
    // real columns never drives the cosine down.
    double total = 0.0;
    for (const auto& col : g) total += dot_from(col, col, 0);
    const double floor = double(n) * kEps * double(n) * kEps * total;
    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
        bool rotated = false;
        double worst = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                std::vector<double>& gp = g[p];
                std::vector<double>& gq = g[q];
                const double alpha = dot_from(gp, gp, 0);
                const double beta = dot_from(gq, gq, 0);
                if (alpha <= floor || beta <= floor) continue;
                const double gamma = dot_from(gp, gq, 0);
                const double cosine = std::abs(gamma) / std::sqrt(alpha * beta);
                if (!(cosine > kJacobiTol)) continue;
                worst = std::max(worst, cosine);
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < gp.size(); ++i) {
                    const double a = gp[i], b = gq[i];
                    gp[i] = c * a - s * b;
                    gq[i] = s * a + c * b;
                }
                std::vector<double>& vp = v[p];
                std::vector<double>& vq = v[q];
                for (std::size_t i = 0; i < vp.size(); ++i) {
                    const double a = vp[i], b = vq[i];
                    vp[i] = c * a - s * b;
                    vq[i] = s * a + c * b;
                }
            }
        }
        if (!rotated) return;
        if (sweep + 1 == kJacobiMaxSweeps) {
            throw ConvergenceError("one-sided Jacobi did not converge in " + std::to_string(kJacobiMaxSweeps) +
                                       " sweeps",
                                   worst);
        }
    }
}

ThinSVD svd_tall(const DenseMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    ThinQR qr = householder_qr(a);

    Columns g = to_columns(qr.r);
    Columns v(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;
    one_sided_jacobi(g, v);

    std::vector<double> sigma(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sigma[j] = norm2(g[j]);
        total += sigma[j] * sigma[j];
    }
    // same floor as one_sided_jacobi: such columns were never orthogonalized
    const double floor = double(n) * kEps * std::sqrt(total);
    for (double& x : sigma)
        if (x <= floor) x = 0.0;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    Columns ur(n);
    std::vector<bool> keep(n);
    ThinSVD out;
    out.s.resize(n);
    out.vt = DenseMatrix(n, n);
    for (std::size_t jj = 0; jj < n; ++jj) {
        const std::size_t j = order[jj];
        const double s = sigma[j];
        out.s[jj] = s;
        ur[jj] = g[j];
        keep[jj] = s > 0.0;
        if (keep[jj])
            for (double& t : ur[jj]) t /= s;
        for (std::size_t i = 0; i < n; ++i) out.vt(jj, i) = v[j][i];
    }
    complete_orthonormal(ur, keep);
    out.u = multiply(qr.q, from_columns(ur, n));
    (void)m;
    return out;
}

} // namespace

double SpectrumInfo::sigma_perp_stable_rank() const {
    if (sigma_perp.empty() || sigma_perp.front() == 0.0) {
        throw Error(ErrorCode::InvalidInput, "stable rank of a zero tail");
    }
    double f = 0.0;
    for (double s : sigma_perp) f += s * s;
    return f / (sigma_perp.front() * sigma_perp.front());
}

ThinQR thin_qr(const DenseMatrix& y) {
    ThinQR out = householder_qr(y);
    const double tol = double(std::max(y.rows(), y.cols())) * kEps * frobenius_norm(y);
    for (std::size_t j = 0; j < out.r.rows(); ++j) {
        if (out.r(j, j) <= tol) throw RankDeficientError(j, out.r(j, j));
    }
    return out;
}

ThinSVD thin_svd(const DenseMatrix& a) {
    if (!a.all_finite()) throw Error(ErrorCode::InvalidInput, "thin_svd: non-finite entries");
    if (a.rows() >= a.cols()) return svd_tall(a);
    ThinSVD t = svd_tall(a.transpose());
    return {t.vt.transpose(), std::move(t.s), t.u.transpose()};
}

ThinSVD truncated_svd(const DenseMatrix& a, std::size_t k) {
    const std::size_t p = std::min(a.rows(), a.cols());
    if (k < 1 || k > p) {
        throw Error(ErrorCode::InvalidRank, "k=" + std::to_string(k) + " outside [1, " + std::to_string(p) + "]");
    }
    ThinSVD full = thin_svd(a);
    full.u = full.u.leading_columns(k);
    full.s.resize(k);
    full.vt = full.vt.block(0, 0, k, full.vt.cols());
    return full;
}

DenseMatrix pseudoinverse(const DenseMatrix& a, double rel_tol) {
    if (rel_tol <= 0.0) rel_tol = double(std::max(a.rows(), a.cols())) * kEps;
    DenseMatrix pinv(a.cols(), a.rows());
    if (a.empty()) return pinv;
    const ThinSVD svd = thin_svd(a);
    const double cutoff = rel_tol * (svd.s.empty() ? 0.0 : svd.s.front());
    for (std::size_t r = 0; r < svd.rank(); ++r) {
        const double s = svd.s[r];
        if (!(s > cutoff) || s == 0.0) break;
        const double inv = 1.0 / s;
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double vi = svd.vt(r, i) * inv;
            if (vi == 0.0) continue;
            for (std::size_t j = 0; j < a.rows(); ++j) pinv(i, j) += vi * svd.u(j, r);
        }
    }
    return pinv;
}

SpectralNormResult spectral_norm(const DenseMatrix& a, double tol, std::size_t max_iter) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParam, "spectral_norm tolerance must be positive");
    SpectralNormResult res;
    if (a.empty() || max_abs(a) == 0.0) {
        res.converged = true;
        return res;
    }
    RandomStream stream(SeedSpec{kPowerIterationSeed, 0, 0});
    std::vector<double> x(a.cols());
    for (double& t : x) t = stream.normal();
    double nx = norm2(x);
    for (double& t : x) t /= nx;

    double estimate = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        std::vector<double> y = matvec(a, x);
        const double ny = norm2(y);
        if (ny == 0.0) {
            // Start vector fell into the null space; restart from a coordinate.
            std::fill(x.begin(), x.end(), 0.0);
            x[it % x.size()] = 1.0;
            continue;
        }
        std::vector<double> z = matvec_t(a, y);
        const double nz = norm2(z);
        const double next = nz / ny;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = z[i] / nz;
        res.iterations = it;
        if (std::abs(next - estimate) <= tol * next) {
            res.value = next;
            res.converged = true;
            return res;
        }
        estimate = next;
    }
    res.value = estimate;
    return res;
}

double stable_rank(const DenseMatrix& a) {
    const double f = frobenius_norm(a);
    if (f == 0.0) throw Error(ErrorCode::InvalidInput, "stable rank of the zero matrix");
    const double s = thin_svd(a).s.front();
    return (f * f) / (s * s);
}

SpectrumInfo split_spectrum(const ThinSVD& svd, std::size_t k) {
    const std::size_t p = svd.rank();
    if (k < 1 || k > p) {
        throw Error(ErrorCode::InvalidRank, "k=" + std::to_string(k) + " outside [1, " + std::to_string(p) + "]");
    }
    if (k < p) {
        const double gap_tol = double(p) * kEps * svd.s.front();
        if (svd.s[k - 1] - svd.s[k] <= gap_tol) throw GapViolationError(k, svd.s[k - 1], svd.s[k]);
    }
    SpectrumInfo info;
    info.k = k;
    const std::size_t m = svd.u.rows();
    const std::size_t n = svd.vt.cols();
    info.uk = svd.u.block(0, 0, m, k);
    info.u_perp = svd.u.block(0, k, m, p - k);
    const DenseMatrix v = svd.vt.transpose();
    info.vk = v.block(0, 0, n, k);
    info.v_perp = v.block(0, k, n, p - k);
    info.sigma_k.assign(svd.s.begin(), svd.s.begin() + std::ptrdiff_t(k));
    info.sigma_perp.assign(svd.s.begin() + std::ptrdiff_t(k), svd.s.end());
    const double next = k < p ? svd.s[k] : 0.0;
    info.gamma.resize(k);
    for (std::size_t j = 0; j < k; ++j) info.gamma[j] = next / svd.s[j];
    return info;
}

SpectrumInfo split_spectrum(const DenseMatrix& a, std::size_t k) { return split_spectrum(thin_svd(a), k); }

namespace {

void require_orthonormal(const DenseMatrix& w) {
    const double res = orthogonality_residual(w);
    if (!(res <= 1e-8)) {
        throw Error(ErrorCode::InvalidInput, "columns are not orthonormal (Gram residual " + std::to_string(res) + ")");
    }
}

} // namespace

double coherence(const DenseMatrix& w) {
    require_orthonormal(w);
    double mu = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) mu = std::max(mu, dot(w.row(i), w.row(i)));
    return mu;
}

std::vector<double> leverage_scores(const DenseMatrix& vk) {
    require_orthonormal(vk);
    const double k = double(vk.cols());
    std::vector<double> p(vk.rows());
    for (std::size_t i = 0; i < vk.rows(); ++i) p[i] = dot(vk.row(i), vk.row(i)) / k;
    return p;
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix& s) {
    if (s.rows() != s.cols()) throw Error(ErrorCode::InvalidInput, "symmetric_eigenvalues: matrix not square");
    const std::size_t n = s.rows();
    if (n == 0) return {};
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = s(i, j);

    // Householder reduction to tridiagonal form.
    std::vector<double> v(n), p(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t len = n - k - 1;
        double alpha = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;
        const double x0 = a(k + 1, k);
        const double sign = x0 >= 0.0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < len; ++i) v[i] = a(k + 1 + i, k);
        v[0] += sign * alpha;
        double vn = 0.0;
        for (std::size_t i = 0; i < len; ++i) vn += v[i] * v[i];
        vn = std::sqrt(vn);
        for (std::size_t i = 0; i < len; ++i) v[i] /= vn;
        // p = A_sub v, K = v^T p, q = p - K v
        double kk = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            double t = 0.0;
            auto ri = a.row(k + 1 + i);
            for (std::size_t j = 0; j < len; ++j) t += ri[k + 1 + j] * v[j];
            p[i] = t;
            kk += v[i] * t;
        }
        for (std::size_t i = 0; i < len; ++i) p[i] -= kk * v[i];
        for (std::size_t i = 0; i < len; ++i) {
            auto ri = a.row(k + 1 + i);
            for (std::size_t j = 0; j < len; ++j) ri[k + 1 + j] -= 2.0 * (v[i] * p[j] + p[i] * v[j]);
        }
        a(k + 1, k) = a(k, k + 1) = -sign * alpha;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = a(k, i) = 0.0;
    }

    std::vector<double> d(n), e(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = a(i + 1, i);

    // Implicit QL with Wilkinson-style shifts.
    const long nn = long(n);
    for (long l = 0; l < nn; ++l) {
        int iter = 0;
        long m;
        do {
            for (m = l; m < nn - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= kEps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw ConvergenceError("tridiagonal QL did not converge", std::abs(e[l]));
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, pp = 0.0;
                long i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= pp;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - pp;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    pp = s * r;
                    d[i + 1] = g + pp;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= pp;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::optional<DenseMatrix> cholesky_upper(const DenseMatrix& s) {
    if (s.rows() != s.cols()) throw Error(ErrorCode::InvalidInput, "cholesky: matrix not square");
    const std::size_t n = s.rows();
    DenseMatrix r(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = s(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= r(k, j) * r(k, j);
        if (!(diag > 0.0)) return std::nullopt;
        const double rjj = std::sqrt(diag);
        r(j, j) = rjj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double t = s(j, i);
            for (std::size_t k = 0; k < j; ++k) t -= r(k, j) * r(k, i);
            r(j, i) = t / rjj;
        }
    }
    return r;
}

DenseMatrix solve_right_upper(const DenseMatrix& b, const DenseMatrix& r) {
    const std::size_t n = r.rows();
    if (r.cols() != n || b.cols() != n) throw Error(ErrorCode::InvalidInput, "solve_right_upper: shape mismatch");
    DenseMatrix x(b.rows(), n);
    for (std::size_t row = 0; row < b.rows(); ++row) {
        auto xr = x.row(row);
        auto br = b.row(row);
        for (std::size_t j = 0; j < n; ++j) {
            double t = br[j];
            for (std::size_t k = 0; k < j; ++k) t -= xr[k] * r(k, j);
            xr[j] = t / r(j, j);
        }
    }
    return x;
}

} // namespace sketchbench::linalg
