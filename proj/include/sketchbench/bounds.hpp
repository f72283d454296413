#pragma once

#include "sketchbench/linalg.hpp"
#include "sketchbench/matrix.hpp"
#include "sketchbench/rng.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sketchbench::bounds {

enum class BoundClass { entries, columns, bounded, moment, coordinate, leverage, alpha_subexp, log_concave };

std::string_view to_string(BoundClass c) noexcept;
BoundClass parse_class(std::string_view name);

struct BoundParams {
    double epsilon = 0.5;
    double delta = 0.1;
    /// Absolute constants (C_ES, C_EB, C_CS, C_CB, C_BCS, C_SUBEXP, C_LOGCONCAVE).
    /// Missing entries read as 1.
    std::map<std::string, double, std::less<>> constants;
    /// Distribution parameters (K_E, K_C, K_k, K_perp, K_M, M, alpha, mu, gamma).
    /// Missing entries are an error when a formula needs them.
    std::map<std::string, double, std::less<>> tails;

    double constant(std::string_view name) const;
    double tail(std::string_view name) const;
    void validate() const;
};

/// sqrt(log(4 / delta))
double v_delta(double delta);

struct BoundReport {
    BoundClass cls = BoundClass::entries;
    std::size_t k = 0;
    std::size_t ell = 0;
    std::size_t q = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::size_t ell_required = 0;
    double term_bound = 0.0;
    /// Bound on ||A - U S V^T||_2^2.
    double approx_error_bound = 0.0;
    /// ell is below ell_required; the bound is reported but not guaranteed.
    bool undersampled = false;
    /// The sample count is an O(.) expression times a user constant.
    bool asymptotic = false;
};

double gauss_bound(std::size_t k, std::size_t p, double delta, double sigma_perp_norm, double sr_perp);

std::size_t sample_size(BoundClass cls, std::size_t k, std::size_t n, const BoundParams& params);

/// Term bound of the class's theorem and the matching approximation error
/// bound (with the gamma_k^{4q} damping factor).
BoundReport term_bound(BoundClass cls, const BoundParams& params, const linalg::SpectrumInfo& spectrum,
                       std::size_t ell, std::size_t q = 0);

struct WidthEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
};

/// Monte-Carlo Gaussian width of the ellipsoid H S^{n-1}: mean of ||H^T g||_2.
WidthEstimate mc_gaussian_width(const DenseMatrix& h, std::size_t samples, const SeedSpec& seed);

/// Nystrom error bound from the trailing eigenvalues lambda_{k+1}, ..., lambda_n.
/// Uses C_CB and K_C.
double nystrom_bound(const BoundParams& params, std::span<const double> eigen_perp, std::size_t ell);

// Constants file: one `name = value` per line, `#` starts a comment.
std::map<std::string, double, std::less<>> load_constants(const std::filesystem::path& path);
void save_constants(const std::filesystem::path& path, const std::map<std::string, double, std::less<>>& values);

/// Smallest C_EB and C_CB for which the entries and columns term bounds cover
/// the realized T values in all but a delta fraction of trials.
std::map<std::string, double, std::less<>> calibrate_constants(std::span<const double> realized_t,
                                                               const linalg::SpectrumInfo& spectrum,
                                                               std::size_t ell, const BoundParams& params);

} // namespace sketchbench::bounds
