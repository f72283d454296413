#include "oracle.hpp"

#include "sketchbench/distributions.hpp"
#include "sketchbench/error.hpp"
#include "sketchbench/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <set>

namespace dist = sketchbench::dist;
using sketchbench::DenseMatrix;
using sketchbench::ErrorCode;
using sketchbench::SeedSpec;

namespace {

const char* kFiniteVariance[] = {
    "gaussian",
    "rademacher",
    "sparse_rademacher{s=3}",
    "uniform_sym",
    "sparse_subgaussian{alpha=0.3,base=gaussian}",
    "sparse_subgaussian{alpha=0.5,base=uniform_sym}",
    "spherical_columns",
    "sparse_sign_columns{N=2}",
    "hadamard_columns",
    "l1_ball_columns",
    "l2_ball_columns",
    "coordinate",
    "laplace",
    "poisson_centered{lambda=10}",
    "logistic",
    "weibull_centered{a=1,b=0.5}",
    "student_t{nu=10}",
    "gamma_centered{a=3,b=5}",
};

std::optional<ErrorCode> code_of(auto&& fn) {
    try {
        fn();
    } catch (const sketchbench::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

} // namespace

TEST(DistributionText, RoundTrip) {
    for (const char* text : kFiniteVariance) {
        const auto spec = dist::parse(text);
        EXPECT_EQ(dist::parse(dist::to_string(spec)), spec) << text;
        EXPECT_EQ(dist::to_string(dist::parse(dist::to_string(spec))), dist::to_string(spec));
    }
    for (const char* text : {"leverage_score{gamma=1}", "leverage_score{gamma=0.5}", "cauchy",
                             "stable{alpha=1.5,beta=0.5,gamma=2,delta=0}", "hadamard_columns{replace=true}",
                             "laplace{normalize=false,scale=2}", "leverage_score{p=0.25:0.75}"}) {
        const auto spec = dist::parse(text);
        EXPECT_EQ(dist::parse(dist::to_string(spec)), spec) << text;
    }
    const auto lev = dist::parse("leverage_score{gamma=1.0}");
    ASSERT_TRUE(std::holds_alternative<dist::LeverageScore>(lev.kind));
    EXPECT_EQ(std::get<dist::LeverageScore>(lev.kind).gamma, 1.0);
}

TEST(DistributionText, Errors) {
    EXPECT_EQ(code_of([] { dist::parse("no_such_law"); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { dist::parse("gaussian{s=2}"); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { dist::parse("sparse_rademacher{s=abc}"); }), ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { dist::parse("sparse_rademacher"); }), ErrorCode::InvalidParam);
}

TEST(DistributionText, ListSplitsOutsideBraces) {
    const auto list = dist::parse_list("gaussian, stable{alpha=1.5,beta=0,gamma=1,delta=0},coordinate");
    ASSERT_EQ(list.size(), 3u);
    EXPECT_EQ(dist::kind_name(list[1]), "stable");
    EXPECT_EQ(dist::kind_name(list[2]), "coordinate");
}

TEST(DistributionFlags, VarianceAndShape) {
    EXPECT_TRUE(dist::is_entrywise(dist::parse("gaussian")));
    EXPECT_FALSE(dist::is_entrywise(dist::parse("spherical_columns")));
    EXPECT_FALSE(dist::has_finite_variance(dist::parse("cauchy")));
    EXPECT_FALSE(dist::has_finite_variance(dist::parse("stable{alpha=1.5,beta=0,gamma=1,delta=0}")));
    EXPECT_TRUE(dist::has_finite_variance(dist::parse("stable{alpha=2,beta=0,gamma=1,delta=0}")));
    EXPECT_EQ(code_of([] { dist::column_scale(dist::parse("cauchy"), 4, 4); }), ErrorCode::Unsupported);
    EXPECT_EQ(code_of([] { dist::empirical_isotropy_deficit(dist::parse("cauchy"), 4, 10, SeedSpec{1, 0, 0}); }),
              ErrorCode::Unsupported);
}

TEST(Sample, Supports) {
    const SeedSpec seed{11, 0, 0};
    const std::size_t n = 16, ell = 12;

    const auto rad = dist::sample(dist::parse("rademacher"), n, ell, seed);
    for (double x : rad.data()) EXPECT_EQ(std::abs(x), 1.0);

    const auto sr = dist::sample(dist::parse("sparse_rademacher{s=3}"), n, ell, seed);
    for (double x : sr.data()) EXPECT_TRUE(x == 0.0 || std::abs(std::abs(x) - std::sqrt(3.0)) < 1e-15);

    const auto uni = dist::sample(dist::parse("uniform_sym"), n, ell, seed);
    for (double x : uni.data())
        EXPECT_LE(std::abs(x), std::sqrt(3.0));

    const auto sph = dist::sample(dist::parse("spherical_columns"), n, ell, seed);
    for (std::size_t j = 0; j < ell; ++j) EXPECT_NEAR(sketchbench::norm2(sph.column(j)), 4.0, 1e-12);

    const auto coord = dist::sample(dist::parse("coordinate"), n, 40, seed);
    for (std::size_t j = 0; j < 40; ++j) {
        int nz = 0;
        for (double x : coord.column(j)) {
            if (x != 0.0) {
                ++nz;
                EXPECT_EQ(x, 4.0);
            }
        }
        EXPECT_EQ(nz, 1);
    }

    const auto sign = dist::sample(dist::parse("sparse_sign_columns{N=3}"), n, ell, seed);
    for (std::size_t j = 0; j < ell; ++j) {
        int nz = 0;
        for (double x : sign.column(j)) {
            if (x != 0.0) {
                ++nz;
                EXPECT_NEAR(std::abs(x), std::sqrt(16.0 / 3.0), 1e-15);
            }
        }
        EXPECT_EQ(nz, 3);
    }

    const auto l1 = dist::sample(dist::parse("l1_ball_columns"), n, ell, seed);
    for (std::size_t j = 0; j < ell; ++j) {
        double s = 0.0;
        for (double x : l1.column(j)) s += std::abs(x);
        EXPECT_LE(s, 1.0);
    }
    const auto l2 = dist::sample(dist::parse("l2_ball_columns"), n, ell, seed);
    for (std::size_t j = 0; j < ell; ++j) EXPECT_LE(sketchbench::norm2(l2.column(j)), 4.0);
}

TEST(Sample, SparseRademacherFrequency) {
    const auto m = dist::sample(dist::parse("sparse_rademacher{s=4}"), 1000, 200, SeedSpec{3, 0, 0});
    double nz = 0.0;
    for (double x : m.data()) nz += x != 0.0;
    const double p = 0.25, total = double(m.size());
    EXPECT_NEAR(nz / total, p, 4.0 * std::sqrt(p * (1 - p) / total));
}

TEST(Sample, LeverageColumns) {
    auto spec = dist::parse("leverage_score{p=0.1:0.2:0.3:0.4}");
    const std::size_t ell = 5;
    const auto m = dist::sample(spec, 4, ell, SeedSpec{4, 0, 0});
    const double p[] = {0.1, 0.2, 0.3, 0.4};
    for (std::size_t j = 0; j < ell; ++j) {
        int nz = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            if (m(i, j) == 0.0) continue;
            ++nz;
            EXPECT_NEAR(m(i, j), 1.0 / std::sqrt(double(ell) * p[i]), 1e-14);
        }
        EXPECT_EQ(nz, 1);
    }
    EXPECT_DOUBLE_EQ(dist::column_scale(spec, 4, ell), 0.2);
}

TEST(Sample, LeverageFromVk) {
    const DenseMatrix vk = DenseMatrix::identity(4).leading_columns(2);
    const auto r = dist::with_leverage_scores(dist::parse("leverage_score{gamma=0.5}"), vk);
    const auto& p = std::get<dist::LeverageScore>(r.kind).probabilities;
    ASSERT_EQ(p.size(), 4u);
    EXPECT_DOUBLE_EQ(p[0], 0.5 * 0.5 + 0.5 * 0.25);
    EXPECT_DOUBLE_EQ(p[3], 0.5 * 0.25);
    // gamma = 1 with a coherent V_k leaves zero-probability rows.
    const auto bad = dist::with_leverage_scores(dist::parse("leverage_score{gamma=1}"), vk);
    EXPECT_EQ(code_of([&] { dist::validate(bad, 4); }), ErrorCode::InvalidProbabilities);
    EXPECT_EQ(code_of([] { dist::validate(dist::parse("leverage_score"), 4); }),
              ErrorCode::InvalidProbabilities);
    EXPECT_EQ(code_of([] { dist::validate(dist::parse("leverage_score{p=0.5:0.6}"), 2); }),
              ErrorCode::InvalidProbabilities);
    EXPECT_EQ(code_of([] { dist::validate(dist::parse("leverage_score{p=0.5:0.5}"), 3); }),
              ErrorCode::InvalidProbabilities);
}

TEST(Hadamard, SmallOrders) {
    EXPECT_EQ(dist::hadamard_matrix(1), (DenseMatrix{{1}}));
    EXPECT_EQ(dist::hadamard_matrix(2), (DenseMatrix{{1, 1}, {1, -1}}));
    const auto h = dist::hadamard_matrix(8);
    EXPECT_EQ(sketchbench::multiply_tn(h, h), 8.0 * DenseMatrix::identity(8));
    EXPECT_EQ(code_of([] { dist::hadamard_matrix(6); }), ErrorCode::UnsupportedSize);
    EXPECT_EQ(code_of([] { dist::sample(dist::parse("hadamard_columns"), 12, 2, SeedSpec{1, 0, 0}); }),
              ErrorCode::UnsupportedSize);
}

TEST(Hadamard, ColumnsAreDistinctWithoutReplacement) {
    const auto h = dist::hadamard_matrix(16);
    const auto m = dist::sample(dist::parse("hadamard_columns"), 16, 16, SeedSpec{5, 0, 0});
    std::set<std::size_t> seen;
    for (std::size_t j = 0; j < 16; ++j) {
        const auto c = m.column(j);
        for (std::size_t t = 0; t < 16; ++t) {
            if (h.column(t) == c) seen.insert(t);
        }
    }
    EXPECT_EQ(seen.size(), 16u);
    EXPECT_EQ(code_of([] { dist::sample(dist::parse("hadamard_columns"), 16, 17, SeedSpec{5, 0, 0}); }),
              ErrorCode::InvalidParam);
    EXPECT_NO_THROW(dist::sample(dist::parse("hadamard_columns{replace=true}"), 16, 40, SeedSpec{5, 0, 0}));
}

TEST(Balls, L2MeanRadius) {
    sketchbench::RandomStream rs(SeedSpec{6, 0, 0});
    const int t = 200000;
    double s = 0.0;
    // radius sqrt(2) * U^{1/2}: E = sqrt(2) * 2/3
    for (int i = 0; i < t; ++i) s += sketchbench::norm2(dist::sample_l2_ball_column(2, rs));
    EXPECT_NEAR(s / t / std::sqrt(2.0), 2.0 / 3.0, 0.005);
}

TEST(Balls, L1CovarianceMatchesScale) {
    for (std::size_t n : {1u, 3u, 8u}) {
        sketchbench::RandomStream rs(SeedSpec{7, std::uint32_t(n), 0});
        const int t = 200000;
        double diag = 0.0, off = 0.0;
        for (int i = 0; i < t; ++i) {
            const auto x = dist::sample_l1_ball_column(n, rs);
            double l1 = 0.0;
            for (double v : x) l1 += std::abs(v);
            ASSERT_LE(l1, 1.0);
            diag += x[0] * x[0];
            if (n > 1) off += x[0] * x[1];
        }
        const double c = dist::column_scale(dist::parse("l1_ball_columns"), n, 1);
        EXPECT_NEAR(c, 2.0 / ((n + 1.0) * (n + 2.0)), 1e-15);
        EXPECT_NEAR(diag / t, c, 0.02 * c);
        EXPECT_NEAR(off / t, 0.0, 0.02 * c);
    }
}

TEST(Moments, NormalizedEntrywiseLawsHaveUnitVariance) {
    for (const char* text : {"gaussian", "uniform_sym", "sparse_rademacher{s=5}", "laplace",
                             "poisson_centered{lambda=10}", "logistic", "weibull_centered{a=1,b=0.5}",
                             "student_t{nu=10}", "gamma_centered{a=3,b=5}",
                             "sparse_subgaussian{alpha=0.2,base=gaussian}"}) {
        const auto m = dist::sample(dist::parse(text), 500, 500, SeedSpec{8, 0, 0});
        const double n = double(m.size());
        double s = 0.0, s2 = 0.0, s4 = 0.0;
        for (double x : m.data()) {
            s += x;
            s2 += x * x;
            s4 += x * x * x * x;
        }
        const double mean = s / n, var = s2 / n;
        EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(n)) << text;
        EXPECT_NEAR(var, 1.0, 4.0 * std::sqrt((s4 / n - var * var) / n)) << text;
    }
}

TEST(Moments, UnnormalizedScales) {
    struct Case {
        const char* text;
        double variance;
    };
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (const Case c : {Case{"laplace{normalize=false,scale=2}", 8.0}, Case{"poisson_centered{lambda=4,normalize=false}", 4.0},
                         Case{"logistic{normalize=false,scale=0.5}", 0.25 * pi2 / 3.0},
                         Case{"gamma_centered{a=3,b=5,normalize=false}", 75.0},
                         Case{"student_t{normalize=false,nu=10}", 1.25}}) {
        const auto spec = dist::parse(c.text);
        EXPECT_NEAR(dist::column_scale(spec, 3, 3), c.variance, 1e-12 * c.variance) << c.text;
        const auto m = dist::sample(spec, 500, 400, SeedSpec{9, 0, 0});
        double s2 = 0.0, s4 = 0.0;
        for (double x : m.data()) {
            s2 += x * x;
            s4 += x * x * x * x;
        }
        const double n = double(m.size()), var = s2 / n;
        EXPECT_NEAR(var, c.variance, 4.0 * std::sqrt((s4 / n - var * var) / n)) << c.text;
    }
}

TEST(Isotropy, DeficitIsSmallForFiniteVarianceLaws) {
    for (const char* text : kFiniteVariance) {
        const auto spec = dist::parse(text);
        const std::size_t n = std::holds_alternative<dist::HadamardColumns>(spec.kind) ? 8 : 10;
        const double d = dist::empirical_isotropy_deficit(spec, n, 1000000, SeedSpec{10, 0, 0});
        EXPECT_LE(d, 0.02) << text;
    }
    const double d = dist::empirical_isotropy_deficit(dist::parse("leverage_score{p=0.05:0.05:0.1:0.1:0.1:0.1:0.1:0.1:0.1:0.2}"),
                                                      10, 1000000, SeedSpec{10, 0, 0});
    EXPECT_LE(d, 0.02);
}

TEST(Isotropy, ScaleAndInvariantLaws) {
    EXPECT_DOUBLE_EQ(dist::column_scale(dist::parse("l2_ball_columns"), 8, 3), 0.8);
    EXPECT_DOUBLE_EQ(dist::column_scale(dist::parse("gaussian"), 8, 3), 1.0);
    EXPECT_DOUBLE_EQ(dist::column_scale(dist::parse("coordinate"), 8, 3), 1.0);
}

TEST(SubgaussianNorm, ConstantAndGaussian) {
    std::vector<double> c(10000, 3.0);
    EXPECT_NEAR(dist::estimate_subgaussian_norm(c), 3.0 / std::sqrt(std::numbers::ln2), 1e-10);
    std::vector<double> neg(10000, -2.0);
    EXPECT_NEAR(dist::estimate_subgaussian_norm(neg), 2.0 / std::sqrt(std::numbers::ln2), 1e-10);

    const auto g = dist::sample(dist::parse("gaussian"), 1000, 200, SeedSpec{12, 0, 0});
    const double est = dist::estimate_subgaussian_norm(g.data());
    EXPECT_NEAR(est, std::sqrt(8.0 / 3.0), 0.1 * std::sqrt(8.0 / 3.0));

    std::vector<double> few(100, 1.0);
    EXPECT_THROW(dist::estimate_subgaussian_norm(few), sketchbench::Error);
}

TEST(Sample, NestedPrefixes) {
    for (const char* text : kFiniteVariance) {
        const auto spec = dist::parse(text);
        const auto big = dist::sample(spec, 16, 12, SeedSpec{13, 2, 5});
        const auto small = dist::sample(spec, 16, 7, SeedSpec{13, 2, 5});
        EXPECT_EQ(big.leading_columns(7), small) << text;
    }
}

TEST(Sample, Determinism) {
    const auto spec = dist::parse("student_t{nu=5}");
    EXPECT_EQ(dist::sample(spec, 9, 4, SeedSpec{1, 2, 3}), dist::sample(spec, 9, 4, SeedSpec{1, 2, 3}));
    EXPECT_NE(dist::sample(spec, 9, 4, SeedSpec{1, 2, 3}), dist::sample(spec, 9, 4, SeedSpec{1, 3, 3}));
}

TEST(Sample, InvalidParameters) {
    EXPECT_EQ(code_of([] { dist::sample(dist::parse("sparse_rademacher{s=0.5}"), 4, 2, SeedSpec{}); }),
              ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { dist::sample(dist::parse("sparse_sign_columns{N=5}"), 4, 2, SeedSpec{}); }),
              ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { dist::sample(dist::parse("gaussian"), 4, 5, SeedSpec{}); }),
              ErrorCode::InvalidParam);
    EXPECT_EQ(code_of([] { dist::sample(dist::parse("stable{alpha=3,beta=0,gamma=1,delta=0}"), 4, 2, SeedSpec{}); }),
              ErrorCode::InvalidParam);
    EXPECT_NO_THROW(dist::sample(dist::parse("coordinate"), 4, 9, SeedSpec{}));
}

TEST(Sample, StableAlphaTwoIsGaussianWithVarianceTwo) {
    const auto spec = dist::parse("stable{alpha=2,beta=0,gamma=1,delta=0}");
    EXPECT_DOUBLE_EQ(dist::column_scale(spec, 4, 4), 2.0);
    const auto m = dist::sample(spec, 400, 400, SeedSpec{14, 0, 0});
    double s2 = 0.0;
    for (double x : m.data()) s2 += x * x;
    EXPECT_NEAR(s2 / double(m.size()), 2.0, 4.0 * 2.0 * std::sqrt(2.0 / double(m.size())));
}
