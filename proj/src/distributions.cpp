#include "sketchbench/distributions.hpp"

#include "sketchbench/error.hpp"
#include "sketchbench/linalg.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>

namespace sketchbench::dist {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidParam, what); }

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string_view base_name(SparseBase b) {
    switch (b) {
    case SparseBase::gaussian: return "gaussian";
    case SparseBase::rademacher: return "rademacher";
    case SparseBase::uniform_sym: return "uniform_sym";
    }
    return "?";
}

constexpr double kSqrt3 = 1.7320508075688772;

double weibull_mean(const WeibullCentered& w) { return w.a * std::tgamma(1.0 + 1.0 / w.b); }
double weibull_sd(const WeibullCentered& w) {
    const double g1 = std::tgamma(1.0 + 1.0 / w.b);
    return w.a * std::sqrt(std::tgamma(1.0 + 2.0 / w.b) - g1 * g1);
}

double stable_draw(const Stable& p, RandomStream& rs) {
    const double v = std::numbers::pi * (rs.uniform_open() - 0.5);
    const double w = rs.exponential();
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (p.alpha == 1.0) {
        const double x = ((half_pi + p.beta * v) * std::tan(v) -
                          p.beta * std::log(half_pi * w * std::cos(v) / (half_pi + p.beta * v))) /
                         half_pi;
        return p.gamma * x + p.beta * p.gamma * std::log(p.gamma) / half_pi + p.delta;
    }
    const double tan_term = p.beta * std::tan(half_pi * p.alpha);
    const double b = std::atan(tan_term) / p.alpha;
    const double s = std::pow(1.0 + tan_term * tan_term, 1.0 / (2.0 * p.alpha));
    const double x = s * std::sin(p.alpha * (v + b)) / std::pow(std::cos(v), 1.0 / p.alpha) *
                     std::pow(std::cos(v - p.alpha * (v + b)) / w, (1.0 - p.alpha) / p.alpha);
    return p.gamma * x + p.delta;
}

double draw_base(SparseBase base, RandomStream& rs) {
    switch (base) {
    case SparseBase::gaussian: return rs.normal();
    case SparseBase::rademacher: return (rs.next_u64() >> 63) ? 1.0 : -1.0;
    case SparseBase::uniform_sym: return (2.0 * rs.uniform() - 1.0) * kSqrt3;
    }
    return 0.0;
}

bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

/// Fills columns one at a time. Holds per-sketch state (the Hadamard
/// permutation, leverage CDF) so it must not be shared between streams.
class ColumnSampler {
public:
    ColumnSampler(const DistributionSpec& spec, std::size_t n, std::size_t ell)
        : spec_(spec), n_(n), ell_(ell) {
        validate(spec_, n_);
        if (const auto* lev = std::get_if<LeverageScore>(&spec_.kind)) {
            cdf_.resize(n_);
            std::partial_sum(lev->probabilities.begin(), lev->probabilities.end(), cdf_.begin());
        }
        if (std::holds_alternative<HadamardColumns>(spec_.kind) ||
            std::holds_alternative<SparseSignColumns>(spec_.kind)) {
            perm_.resize(n_);
            std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        }
    }

    void next(RandomStream& rs, std::span<double> out) {
        const bool norm = spec_.normalize;
        std::visit(
            overloaded{
                [&](const Gaussian&) {
                    for (double& x : out) x = rs.normal();
                },
                [&](const Rademacher&) {
                    for (double& x : out) x = (rs.next_u64() >> 63) ? 1.0 : -1.0;
                },
                [&](const SparseRademacher& p) {
                    const double mag = std::sqrt(p.s);
                    const double half = 1.0 / (2.0 * p.s);
                    for (double& x : out) {
                        const double u = rs.uniform();
                        x = u < half ? -mag : (u < 2.0 * half ? mag : 0.0);
                    }
                },
                [&](const UniformSym&) {
                    for (double& x : out) x = (2.0 * rs.uniform() - 1.0) * kSqrt3;
                },
                [&](const SparseSubgaussian& p) {
                    const double scale = 1.0 / std::sqrt(p.alpha);
                    for (double& x : out) {
                        const bool on = rs.uniform() < p.alpha;
                        const double z = draw_base(p.base, rs);
                        x = on ? scale * z : 0.0;
                    }
                },
                [&](const SphericalColumns&) {
                    for (double& x : out) x = rs.normal();
                    const double r = std::sqrt(double(n_)) / norm2(out);
                    for (double& x : out) x *= r;
                },
                [&](const SparseSignColumns& p) {
                    std::fill(out.begin(), out.end(), 0.0);
                    const double mag = std::sqrt(double(n_) / double(p.nonzeros));
                    // Partial Fisher-Yates over a persistent permutation: any
                    // arrangement of perm_ is a valid starting point.
                    for (std::size_t i = 0; i < p.nonzeros; ++i) {
                        const std::size_t j = i + rs.uniform_index(n_ - i);
                        std::swap(perm_[i], perm_[j]);
                        out[perm_[i]] = (rs.next_u64() >> 63) ? mag : -mag;
                    }
                },
                [&](const HadamardColumns& p) {
                    std::size_t col;
                    if (p.with_replacement) {
                        col = rs.uniform_index(n_);
                    } else {
                        if (drawn_ >= n_) {
                            throw Error(ErrorCode::InvalidParam,
                                        "hadamard_columns without replacement exhausted all " + std::to_string(n_) +
                                            " columns");
                        }
                        const std::size_t j = drawn_ + rs.uniform_index(n_ - drawn_);
                        std::swap(perm_[drawn_], perm_[j]);
                        col = perm_[drawn_++];
                    }
                    for (std::size_t i = 0; i < n_; ++i) out[i] = (std::popcount(i & col) & 1) ? -1.0 : 1.0;
                },
                [&](const L1BallColumns&) {
                    auto v = sample_l1_ball_column(n_, rs);
                    std::copy(v.begin(), v.end(), out.begin());
                },
                [&](const L2BallColumns&) {
                    auto v = sample_l2_ball_column(n_, rs);
                    std::copy(v.begin(), v.end(), out.begin());
                },
                [&](const Coordinate&) {
                    std::fill(out.begin(), out.end(), 0.0);
                    out[rs.uniform_index(n_)] = std::sqrt(double(n_));
                },
                [&](const LeverageScore& p) {
                    std::fill(out.begin(), out.end(), 0.0);
                    const double u = rs.uniform() * cdf_.back();
                    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
                    std::size_t t = std::size_t(it - cdf_.begin());
                    if (t >= n_) t = n_ - 1;
                    // Guard against landing on a zero-width bin at the CDF tail.
                    while (p.probabilities[t] == 0.0 && t > 0) --t;
                    out[t] = 1.0 / std::sqrt(double(ell_) * p.probabilities[t]);
                },
                [&](const Laplace& p) {
                    const double s = norm ? 1.0 / std::numbers::sqrt2 : p.scale;
                    for (double& x : out) {
                        const double e = rs.exponential();
                        x = (rs.next_u64() >> 63) ? s * e : -s * e;
                    }
                },
                [&](const PoissonCentered& p) {
                    const double s = norm ? 1.0 / std::sqrt(p.lambda) : 1.0;
                    for (double& x : out) x = s * (double(rs.poisson(p.lambda)) - p.lambda);
                },
                [&](const Logistic& p) {
                    const double s = norm ? kSqrt3 / std::numbers::pi : p.scale;
                    for (double& x : out) {
                        const double u = rs.uniform_open();
                        x = s * std::log(u / (1.0 - u));
                    }
                },
                [&](const WeibullCentered& p) {
                    const double mean = weibull_mean(p);
                    const double s = norm ? 1.0 / weibull_sd(p) : 1.0;
                    for (double& x : out) x = s * (p.a * std::pow(rs.exponential(), 1.0 / p.b) - mean);
                },
                [&](const Cauchy&) {
                    for (double& x : out) x = std::tan(std::numbers::pi * (rs.uniform_open() - 0.5));
                },
                [&](const StudentT& p) {
                    const double s = (norm && p.nu > 2.0) ? std::sqrt((p.nu - 2.0) / p.nu) : 1.0;
                    for (double& x : out) {
                        const double z = rs.normal();
                        const double chi2 = 2.0 * rs.gamma(p.nu / 2.0);
                        x = s * z / std::sqrt(chi2 / p.nu);
                    }
                },
                [&](const GammaCentered& p) {
                    const double s = norm ? 1.0 / (std::sqrt(p.a) * p.b) : 1.0;
                    for (double& x : out) x = s * (p.b * rs.gamma(p.a) - p.a * p.b);
                },
                [&](const Stable& p) {
                    for (double& x : out) x = stable_draw(p, rs);
                },
            },
            spec_.kind);
    }

private:
    DistributionSpec spec_;
    std::size_t n_;
    std::size_t ell_;
    std::vector<double> cdf_;
    std::vector<std::size_t> perm_;
    std::size_t drawn_ = 0;
};

// --- text form -------------------------------------------------------------

using Params = std::map<std::string, std::string, std::less<>>;

double get_double(Params& p, const std::string& key, std::optional<double> fallback, std::string_view kind) {
    auto it = p.find(key);
    if (it == p.end()) {
        if (!fallback) invalid(std::string(kind) + " requires parameter '" + key + "'");
        return *fallback;
    }
    double v = 0.0;
    const std::string& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        invalid(std::string(kind) + ": parameter '" + key + "' is not a number: '" + s + "'");
    }
    p.erase(it);
    return v;
}

bool get_bool(Params& p, const std::string& key, bool fallback) {
    auto it = p.find(key);
    if (it == p.end()) return fallback;
    const std::string s = it->second;
    p.erase(it);
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    invalid("parameter '" + key + "' must be true or false, got '" + s + "'");
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

bool operator==(const DistributionSpec& a, const DistributionSpec& b) { return to_string(a) == to_string(b); }

std::string_view kind_name(const DistributionSpec& spec) {
    return std::visit(overloaded{
                          [](const Gaussian&) { return std::string_view("gaussian"); },
                          [](const Rademacher&) { return std::string_view("rademacher"); },
                          [](const SparseRademacher&) { return std::string_view("sparse_rademacher"); },
                          [](const UniformSym&) { return std::string_view("uniform_sym"); },
                          [](const SparseSubgaussian&) { return std::string_view("sparse_subgaussian"); },
                          [](const SphericalColumns&) { return std::string_view("spherical_columns"); },
                          [](const SparseSignColumns&) { return std::string_view("sparse_sign_columns"); },
                          [](const HadamardColumns&) { return std::string_view("hadamard_columns"); },
                          [](const L1BallColumns&) { return std::string_view("l1_ball_columns"); },
                          [](const L2BallColumns&) { return std::string_view("l2_ball_columns"); },
                          [](const Coordinate&) { return std::string_view("coordinate"); },
                          [](const LeverageScore&) { return std::string_view("leverage_score"); },
                          [](const Laplace&) { return std::string_view("laplace"); },
                          [](const PoissonCentered&) { return std::string_view("poisson_centered"); },
                          [](const Logistic&) { return std::string_view("logistic"); },
                          [](const WeibullCentered&) { return std::string_view("weibull_centered"); },
                          [](const Cauchy&) { return std::string_view("cauchy"); },
                          [](const StudentT&) { return std::string_view("student_t"); },
                          [](const GammaCentered&) { return std::string_view("gamma_centered"); },
                          [](const Stable&) { return std::string_view("stable"); },
                      },
                      spec.kind);
}

std::string to_string(const DistributionSpec& spec) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::visit(overloaded{
                   [&](const SparseRademacher& p) { kv.emplace_back("s", fmt_double(p.s)); },
                   [&](const SparseSubgaussian& p) {
                       kv.emplace_back("alpha", fmt_double(p.alpha));
                       kv.emplace_back("base", std::string(base_name(p.base)));
                   },
                   [&](const SparseSignColumns& p) { kv.emplace_back("N", std::to_string(p.nonzeros)); },
                   [&](const HadamardColumns& p) {
                       if (p.with_replacement) kv.emplace_back("replace", "true");
                   },
                   [&](const LeverageScore& p) {
                       kv.emplace_back("gamma", fmt_double(p.gamma));
                       if (!p.probabilities.empty()) {
                           std::string s;
                           for (std::size_t i = 0; i < p.probabilities.size(); ++i) {
                               if (i) s += ':';
                               s += fmt_double(p.probabilities[i]);
                           }
                           kv.emplace_back("p", s);
                       }
                   },
                   [&](const Laplace& p) { kv.emplace_back("scale", fmt_double(p.scale)); },
                   [&](const PoissonCentered& p) { kv.emplace_back("lambda", fmt_double(p.lambda)); },
                   [&](const Logistic& p) { kv.emplace_back("scale", fmt_double(p.scale)); },
                   [&](const WeibullCentered& p) {
                       kv.emplace_back("a", fmt_double(p.a));
                       kv.emplace_back("b", fmt_double(p.b));
                   },
                   [&](const StudentT& p) { kv.emplace_back("nu", fmt_double(p.nu)); },
                   [&](const GammaCentered& p) {
                       kv.emplace_back("a", fmt_double(p.a));
                       kv.emplace_back("b", fmt_double(p.b));
                   },
                   [&](const Stable& p) {
                       kv.emplace_back("alpha", fmt_double(p.alpha));
                       kv.emplace_back("beta", fmt_double(p.beta));
                       kv.emplace_back("gamma", fmt_double(p.gamma));
                       kv.emplace_back("delta", fmt_double(p.delta));
                   },
                   [](const auto&) {},
               },
               spec.kind);
    if (!spec.normalize) kv.emplace_back("normalize", "false");
    std::string out(kind_name(spec));
    if (!kv.empty()) {
        out += '{';
        for (std::size_t i = 0; i < kv.size(); ++i) {
            if (i) out += ',';
            out += kv[i].first + '=' + kv[i].second;
        }
        out += '}';
    }
    return out;
}

DistributionSpec parse(std::string_view text) {
    const std::string t = trim(text);
    if (t.empty()) invalid("empty distribution spec");
    std::string name = t;
    Params params;
    if (const auto brace = t.find('{'); brace != std::string::npos) {
        if (t.back() != '}') invalid("unterminated parameter list in '" + t + "'");
        name = trim(std::string_view(t).substr(0, brace));
        const std::string body = t.substr(brace + 1, t.size() - brace - 2);
        std::size_t pos = 0;
        while (pos <= body.size()) {
            const std::size_t comma = std::min(body.find(',', pos), body.size());
            const std::string item = trim(std::string_view(body).substr(pos, comma - pos));
            if (!item.empty()) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) invalid("expected key=value in '" + item + "'");
                params[trim(std::string_view(item).substr(0, eq))] = trim(std::string_view(item).substr(eq + 1));
            }
            pos = comma + 1;
        }
    }

    DistributionSpec spec{Gaussian{}};
    spec.normalize = get_bool(params, "normalize", true);
    const std::string_view k = name;
    if (k == "gaussian") {
        spec.kind = Gaussian{};
    } else if (k == "rademacher") {
        spec.kind = Rademacher{};
    } else if (k == "sparse_rademacher") {
        spec.kind = SparseRademacher{get_double(params, "s", std::nullopt, k)};
    } else if (k == "uniform_sym") {
        spec.kind = UniformSym{};
    } else if (k == "sparse_subgaussian") {
        SparseSubgaussian p{get_double(params, "alpha", std::nullopt, k), SparseBase::rademacher};
        if (auto it = params.find("base"); it != params.end()) {
            if (it->second == "gaussian") p.base = SparseBase::gaussian;
            else if (it->second == "rademacher") p.base = SparseBase::rademacher;
            else if (it->second == "uniform_sym") p.base = SparseBase::uniform_sym;
            else invalid("unknown sparse_subgaussian base '" + it->second + "'");
            params.erase(it);
        }
        spec.kind = p;
    } else if (k == "spherical_columns") {
        spec.kind = SphericalColumns{};
    } else if (k == "sparse_sign_columns") {
        const double nz = get_double(params, "N", std::nullopt, k);
        if (!(nz >= 1.0) || nz != std::floor(nz)) invalid("sparse_sign_columns: N must be a positive integer");
        spec.kind = SparseSignColumns{std::size_t(nz)};
    } else if (k == "hadamard_columns") {
        spec.kind = HadamardColumns{get_bool(params, "replace", false)};
    } else if (k == "l1_ball_columns") {
        spec.kind = L1BallColumns{};
    } else if (k == "l2_ball_columns") {
        spec.kind = L2BallColumns{};
    } else if (k == "coordinate") {
        spec.kind = Coordinate{};
    } else if (k == "leverage_score") {
        LeverageScore p{get_double(params, "gamma", 1.0, k), {}};
        if (auto it = params.find("p"); it != params.end()) {
            std::string_view s = it->second;
            while (!s.empty()) {
                const auto colon = std::min(s.find(':'), s.size());
                const std::string item = trim(s.substr(0, colon));
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
                if (ec != std::errc() || ptr != item.data() + item.size()) {
                    invalid("leverage_score: bad probability '" + item + "'");
                }
                p.probabilities.push_back(v);
                s = colon < s.size() ? s.substr(colon + 1) : std::string_view{};
            }
            params.erase(it);
        }
        spec.kind = std::move(p);
    } else if (k == "laplace") {
        spec.kind = Laplace{get_double(params, "scale", 1.0, k)};
    } else if (k == "poisson_centered") {
        spec.kind = PoissonCentered{get_double(params, "lambda", 10.0, k)};
    } else if (k == "logistic") {
        spec.kind = Logistic{get_double(params, "scale", 1.0, k)};
    } else if (k == "weibull_centered") {
        const double a = get_double(params, "a", 1.0, k);
        spec.kind = WeibullCentered{a, get_double(params, "b", 0.5, k)};
    } else if (k == "cauchy") {
        spec.kind = Cauchy{};
    } else if (k == "student_t") {
        spec.kind = StudentT{get_double(params, "nu", 10.0, k)};
    } else if (k == "gamma_centered") {
        const double a = get_double(params, "a", 3.0, k);
        spec.kind = GammaCentered{a, get_double(params, "b", 5.0, k)};
    } else if (k == "stable") {
        Stable p;
        p.alpha = get_double(params, "alpha", 1.0, k);
        p.beta = get_double(params, "beta", 0.0, k);
        p.gamma = get_double(params, "gamma", 1.0, k);
        p.delta = get_double(params, "delta", 0.0, k);
        spec.kind = p;
    } else {
        invalid("unknown distribution '" + name + "'");
    }
    if (!params.empty()) invalid("unknown parameter '" + params.begin()->first + "' for " + name);
    return spec;
}

std::vector<DistributionSpec> parse_list(std::string_view text) {
    std::vector<DistributionSpec> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        const char c = i < text.size() ? text[i] : ',';
        if (c == '{') ++depth;
        if (c == '}') --depth;
        if (c == ',' && depth == 0) {
            const std::string item = trim(text.substr(start, i - start));
            if (!item.empty()) out.push_back(parse(item));
            start = i + 1;
        }
    }
    if (depth != 0) invalid("unbalanced braces in distribution list");
    return out;
}

bool is_entrywise(const DistributionSpec& spec) {
    return std::visit(overloaded{
                          [](const SphericalColumns&) { return false; },
                          [](const SparseSignColumns&) { return false; },
                          [](const HadamardColumns&) { return false; },
                          [](const L1BallColumns&) { return false; },
                          [](const L2BallColumns&) { return false; },
                          [](const Coordinate&) { return false; },
                          [](const LeverageScore&) { return false; },
                          [](const auto&) { return true; },
                      },
                      spec.kind);
}

bool has_finite_variance(const DistributionSpec& spec) {
    return std::visit(overloaded{
                          [](const Cauchy&) { return false; },
                          [](const StudentT& p) { return p.nu > 2.0; },
                          [](const Stable& p) { return p.alpha == 2.0; },
                          [](const auto&) { return true; },
                      },
                      spec.kind);
}

void validate(const DistributionSpec& spec, std::size_t n) {
    if (n == 0) invalid("sketch needs at least one row");
    std::visit(overloaded{
                   [](const SparseRademacher& p) {
                       if (!(p.s >= 1.0)) invalid("sparse_rademacher: s must be >= 1");
                   },
                   [](const SparseSubgaussian& p) {
                       if (!(p.alpha > 0.0 && p.alpha <= 1.0)) invalid("sparse_subgaussian: alpha must be in (0, 1]");
                   },
                   [n](const SparseSignColumns& p) {
                       if (p.nonzeros < 1 || p.nonzeros > n) invalid("sparse_sign_columns: N must be in [1, n]");
                   },
                   [n](const HadamardColumns&) {
                       if (!is_power_of_two(n)) {
                           throw Error(ErrorCode::UnsupportedSize,
                                       "hadamard_columns needs n a power of two, got " + std::to_string(n));
                       }
                   },
                   [n](const LeverageScore& p) {
                       if (!(p.gamma > 0.0 && p.gamma <= 1.0)) invalid("leverage_score: gamma must be in (0, 1]");
                       if (p.probabilities.empty()) {
                           throw Error(ErrorCode::InvalidProbabilities,
                                       "leverage_score probabilities not resolved; derive them from V_k first");
                       }
                       if (p.probabilities.size() != n) {
                           throw Error(ErrorCode::InvalidProbabilities,
                                       "expected " + std::to_string(n) + " probabilities, got " +
                                           std::to_string(p.probabilities.size()));
                       }
                       double sum = 0.0;
                       for (std::size_t i = 0; i < n; ++i) {
                           const double pi = p.probabilities[i];
                           if (!(pi > 0.0) || !std::isfinite(pi)) {
                               throw Error(ErrorCode::InvalidProbabilities,
                                           "p_" + std::to_string(i) + " = " + fmt_double(pi) + " is not positive");
                           }
                           sum += pi;
                       }
                       if (std::abs(sum - 1.0) > 1e-9) {
                           throw Error(ErrorCode::InvalidProbabilities, "probabilities sum to " + fmt_double(sum));
                       }
                   },
                   [](const Laplace& p) {
                       if (!(p.scale > 0.0)) invalid("laplace: scale must be positive");
                   },
                   [](const PoissonCentered& p) {
                       if (!(p.lambda > 0.0)) invalid("poisson_centered: lambda must be positive");
                   },
                   [](const Logistic& p) {
                       if (!(p.scale > 0.0)) invalid("logistic: scale must be positive");
                   },
                   [](const WeibullCentered& p) {
                       if (!(p.a > 0.0 && p.b > 0.0)) invalid("weibull_centered: a and b must be positive");
                   },
                   [](const StudentT& p) {
                       if (!(p.nu > 0.0)) invalid("student_t: nu must be positive");
                   },
                   [](const GammaCentered& p) {
                       if (!(p.a > 0.0 && p.b > 0.0)) invalid("gamma_centered: a and b must be positive");
                   },
                   [](const Stable& p) {
                       if (!(p.alpha > 0.0 && p.alpha <= 2.0)) invalid("stable: alpha must be in (0, 2]");
                       if (!(p.beta >= -1.0 && p.beta <= 1.0)) invalid("stable: beta must be in [-1, 1]");
                       if (!(p.gamma > 0.0)) invalid("stable: gamma must be positive");
                   },
                   [](const auto&) {},
               },
               spec.kind);
}

DistributionSpec with_leverage_scores(const DistributionSpec& spec, const DenseMatrix& vk) {
    const auto* lev = std::get_if<LeverageScore>(&spec.kind);
    if (!lev || !lev->probabilities.empty()) return spec;
    const std::vector<double> plev = linalg::leverage_scores(vk);
    LeverageScore out{lev->gamma, {}};
    out.probabilities.resize(plev.size());
    const double uniform = 1.0 / double(plev.size());
    for (std::size_t i = 0; i < plev.size(); ++i) {
        out.probabilities[i] = lev->gamma * plev[i] + (1.0 - lev->gamma) * uniform;
    }
    return DistributionSpec{std::move(out), spec.normalize};
}

double column_scale(const DistributionSpec& spec, std::size_t n, std::size_t ell) {
    if (!has_finite_variance(spec)) {
        throw Error(ErrorCode::Unsupported, std::string(kind_name(spec)) + " has no finite variance");
    }
    const bool norm = spec.normalize;
    const double dn = double(n);
    return std::visit(overloaded{
                          [&](const L1BallColumns&) { return 2.0 / ((dn + 1.0) * (dn + 2.0)); },
                          [&](const L2BallColumns&) { return dn / (dn + 2.0); },
                          [&](const LeverageScore&) { return 1.0 / double(ell); },
                          [&](const Laplace& p) { return norm ? 1.0 : 2.0 * p.scale * p.scale; },
                          [&](const PoissonCentered& p) { return norm ? 1.0 : p.lambda; },
                          [&](const Logistic& p) {
                              return norm ? 1.0 : p.scale * p.scale * std::numbers::pi * std::numbers::pi / 3.0;
                          },
                          [&](const WeibullCentered& p) {
                              const double sd = weibull_sd(p);
                              return norm ? 1.0 : sd * sd;
                          },
                          [&](const StudentT& p) { return norm ? 1.0 : p.nu / (p.nu - 2.0); },
                          [&](const GammaCentered& p) { return norm ? 1.0 : p.a * p.b * p.b; },
                          [&](const Stable& p) { return 2.0 * p.gamma * p.gamma; },
                          [](const auto&) { return 1.0; },
                      },
                      spec.kind);
}

DenseMatrix sample(const DistributionSpec& spec, std::size_t n, std::size_t ell, const SeedSpec& seed) {
    const bool with_replacement =
        std::holds_alternative<Coordinate>(spec.kind) || std::holds_alternative<LeverageScore>(spec.kind) ||
        (std::holds_alternative<HadamardColumns>(spec.kind) && std::get<HadamardColumns>(spec.kind).with_replacement);
    if (ell < 1 || (!with_replacement && ell > n)) {
        invalid("sketch width ell=" + std::to_string(ell) + " must be in [1, n=" + std::to_string(n) + "]");
    }
    ColumnSampler sampler(spec, n, ell);
    RandomStream rs(seed);
    DenseMatrix omega(n, ell);
    std::vector<double> col(n);
    for (std::size_t j = 0; j < ell; ++j) {
        sampler.next(rs, col);
        omega.set_column(j, col);
    }
    return omega;
}

std::vector<double> sample_l2_ball_column(std::size_t n, RandomStream& stream) {
    if (n == 0) invalid("l2 ball needs n >= 1");
    std::vector<double> x(n);
    double nrm = 0.0;
    do {
        for (double& v : x) v = stream.normal();
        nrm = norm2(x);
    } while (nrm == 0.0);
    const double radius = std::sqrt(double(n)) * std::pow(stream.uniform(), 1.0 / double(n));
    for (double& v : x) v *= radius / nrm;
    return x;
}

std::vector<double> sample_l1_ball_column(std::size_t n, RandomStream& stream) {
    if (n == 0) invalid("l1 ball needs n >= 1");
    std::vector<double> x(n);
    double l1 = 0.0;
    do {
        l1 = 0.0;
        for (double& v : x) {
            const double e = stream.exponential();
            v = (stream.next_u64() >> 63) ? e : -e;
            l1 += e;
        }
    } while (l1 == 0.0);
    const double radius = std::pow(stream.uniform(), 1.0 / double(n));
    for (double& v : x) v *= radius / l1;
    return x;
}

DenseMatrix hadamard_matrix(std::size_t n) {
    if (!is_power_of_two(n)) {
        throw Error(ErrorCode::UnsupportedSize, "Hadamard order must be a power of two, got " + std::to_string(n));
    }
    DenseMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = (std::popcount(i & j) & 1) ? -1.0 : 1.0;
    return h;
}

double empirical_isotropy_deficit(const DistributionSpec& spec, std::size_t n, std::size_t trials,
                                  const SeedSpec& seed) {
    if (!has_finite_variance(spec)) {
        throw Error(ErrorCode::Unsupported, std::string(kind_name(spec)) + " has no finite variance");
    }
    if (trials == 0) invalid("isotropy deficit needs at least one column");
    // Columns are drawn independently, so Hadamard columns are taken with
    // replacement here; the marginal law of each column is the same.
    DistributionSpec s = spec;
    if (auto* h = std::get_if<HadamardColumns>(&s.kind)) h->with_replacement = true;
    const std::size_t ell = trials;
    const double c = column_scale(s, n, ell);
    ColumnSampler sampler(s, n, ell);
    RandomStream rs(seed);
    DenseMatrix acc(n, n);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < trials; ++t) {
        sampler.next(rs, x);
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] == 0.0) continue;
            auto row = acc.row(i);
            for (std::size_t j = 0; j <= i; ++j) row[j] += x[i] * x[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = acc(i, j) / double(trials) - (i == j ? c : 0.0);
            acc(i, j) = acc(j, i) = v;
        }
    }
    const auto ev = linalg::symmetric_eigenvalues(acc);
    return std::max(std::abs(ev.front()), std::abs(ev.back())) / c;
}

double estimate_subgaussian_norm(std::span<const double> samples) {
    if (samples.size() < 10000) {
        throw Error(ErrorCode::InvalidInput, "need at least 10^4 samples, got " + std::to_string(samples.size()));
    }
    double max_sq = 0.0;
    for (double x : samples) {
        if (!std::isfinite(x)) throw Error(ErrorCode::InvalidInput, "non-finite sample");
        max_sq = std::max(max_sq, x * x);
    }
    if (max_sq == 0.0) return 0.0;
    auto excess = [&](double t) {
        const double inv = 1.0 / (t * t);
        double s = 0.0;
        for (double x : samples) s += std::exp(x * x * inv);
        return s / double(samples.size()) - 2.0;
    };
    // exp(x^2/t^2) <= exp(max^2/t^2) = 2 at the upper end, so the root is below.
    double hi = std::sqrt(max_sq / std::numbers::ln2);
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    return hi;
}

} // namespace sketchbench::dist
