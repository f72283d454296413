#pragma once

#include "sketchbench/matrix.hpp"
#include "sketchbench/rng.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sketchbench::dist {

// Entrywise laws (independent entries).
struct Gaussian {};
struct Rademacher {};
/// Values {-sqrt(s), 0, sqrt(s)} with probabilities {1/(2s), 1 - 1/s, 1/(2s)}.
struct SparseRademacher { double s = 1.0; };
/// Uniform on [-sqrt(3), sqrt(3)].
struct UniformSym {};
enum class SparseBase { gaussian, rademacher, uniform_sym };
/// alpha^{-1/2} * Bernoulli(alpha) * Z with Z drawn from `base`.
struct SparseSubgaussian { double alpha = 1.0; SparseBase base = SparseBase::rademacher; };

// Column laws (independent columns, dependent entries).
struct SphericalColumns {};
/// sqrt(n/N) times a column with N random +-1 entries at distinct positions.
struct SparseSignColumns { std::size_t nonzeros = 1; };
struct HadamardColumns { bool with_replacement = false; };
struct L1BallColumns {};
struct L2BallColumns {};
struct Coordinate {};
/// Columns e_t / sqrt(ell p_t) with t ~ p. An empty `probabilities` means
/// "mix the leverage scores of V_k with uniform weight 1 - gamma", resolved
/// by with_leverage_scores().
struct LeverageScore { double gamma = 1.0; std::vector<double> probabilities; };

// Entrywise laws beyond sub-Gaussian; centered where the mean is nonzero.
struct Laplace { double scale = 1.0; };
struct PoissonCentered { double lambda = 10.0; };
struct Logistic { double scale = 1.0; };
/// Scale a, shape b; centered by a * Gamma(1 + 1/b).
struct WeibullCentered { double a = 1.0; double b = 0.5; };
struct Cauchy {};
struct StudentT { double nu = 10.0; };
/// Shape a, scale b; centered by a * b.
struct GammaCentered { double a = 3.0; double b = 5.0; };
/// S(alpha, beta, gamma, delta) in the Chambers-Mallows-Stuck parameterisation.
struct Stable { double alpha = 1.0; double beta = 0.0; double gamma = 1.0; double delta = 0.0; };

using Kind = std::variant<Gaussian, Rademacher, SparseRademacher, UniformSym, SparseSubgaussian, SphericalColumns,
                          SparseSignColumns, HadamardColumns, L1BallColumns, L2BallColumns, Coordinate, LeverageScore,
                          Laplace, PoissonCentered, Logistic, WeibullCentered, Cauchy, StudentT, GammaCentered,
                          Stable>;

struct DistributionSpec {
    Kind kind;
    /// Rescale entrywise laws with finite variance to unit variance.
    bool normalize = true;

    friend bool operator==(const DistributionSpec& a, const DistributionSpec& b);
};

/// Canonical text form, e.g. `sparse_rademacher{s=10}`; parse() inverts it exactly.
std::string to_string(const DistributionSpec& spec);
DistributionSpec parse(std::string_view text);
/// Splits a comma-separated list, ignoring commas inside braces.
std::vector<DistributionSpec> parse_list(std::string_view text);

std::string_view kind_name(const DistributionSpec& spec);
bool is_entrywise(const DistributionSpec& spec);
bool has_finite_variance(const DistributionSpec& spec);

/// Validates parameters for an n-row sketch; throws InvalidParam,
/// UnsupportedSize or InvalidProbabilities.
void validate(const DistributionSpec& spec, std::size_t n);

/// Resolves a LeverageScore spec without explicit probabilities into
/// p = gamma * p_lev + (1 - gamma) / n. Other kinds are returned unchanged.
DistributionSpec with_leverage_scores(const DistributionSpec& spec, const DenseMatrix& vk);

/// c such that E[x x^T] = c I for one column x of an n x ell sketch.
/// Throws Unsupported for laws without finite variance.
double column_scale(const DistributionSpec& spec, std::size_t n, std::size_t ell);

/// Draws Omega (n x ell) column by column from the stream named by `seed`.
/// The first j columns do not depend on ell, so sketches of different
/// widths from one stream are nested.
DenseMatrix sample(const DistributionSpec& spec, std::size_t n, std::size_t ell, const SeedSpec& seed);

/// Uniform in the Euclidean ball of radius sqrt(n).
std::vector<double> sample_l2_ball_column(std::size_t n, RandomStream& stream);
/// Uniform in the unit l1 ball.
std::vector<double> sample_l1_ball_column(std::size_t n, RandomStream& stream);

/// Sylvester Hadamard matrix; n must be a power of two.
DenseMatrix hadamard_matrix(std::size_t n);

/// ||(1/T) sum x_t x_t^T - c I||_2 / c over T sampled columns.
double empirical_isotropy_deficit(const DistributionSpec& spec, std::size_t n, std::size_t trials,
                                  const SeedSpec& seed);

/// Empirical psi_2 norm: the t solving mean(exp(x^2 / t^2)) = 2, by bisection.
double estimate_subgaussian_norm(std::span<const double> samples);

} // namespace sketchbench::dist
