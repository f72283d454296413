#include "oracle.hpp"

#include "sketchbench/bounds.hpp"
#include "sketchbench/error.hpp"
#include "sketchbench/test_matrices.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

namespace bd = sketchbench::bounds;
namespace la = sketchbench::linalg;
using sketchbench::DenseMatrix;
using sketchbench::SeedSpec;

namespace {

// Frozen with mpmath at 40 digits from the closed forms.
constexpr double kGaussK10P5 = 17.327573495240633231;
constexpr double kBoundedTerm = 0.61328192612022466371;
constexpr double kBoundedError = 0.44084416271719810791;
constexpr double kFastDecaySr = 1.3171713653883689295;
constexpr double kNystromL50 = 0.57653658061920782917;

bd::BoundParams unit_params() {
    bd::BoundParams p;
    p.tails = {{"K_E", 1.0}, {"K_C", 1.0}, {"K_perp", 1.0}, {"K_k", 1.0}, {"K_M", 1.0},
               {"M", 1.0},   {"alpha", 1.0}, {"mu", 1.0}, {"gamma", 1.0}};
    return p;
}

// Spectrum split built from singular values only; U and V are identity blocks.
la::SpectrumInfo diag_spectrum(const std::vector<double>& s, std::size_t k) {
    return la::split_spectrum(DenseMatrix::diagonal(s), k);
}

} // namespace

TEST(GaussBound, FrozenValue) {
    EXPECT_NEAR(bd::gauss_bound(10, 5, 0.1, 1.0, 1.0), kGaussK10P5, 1e-12 * kGaussK10P5);
}

TEST(GaussBound, HomogeneousAndMonotone) {
    const double b = bd::gauss_bound(10, 8, 0.2, 1.0, 3.0);
    EXPECT_NEAR(bd::gauss_bound(10, 8, 0.2, 2.0, 3.0), 2.0 * b, 1e-12 * b);
    double prev = 1e300;
    for (std::size_t p = 4; p <= 400; p += 20) {
        const double pref = bd::gauss_bound(1, p, 0.9, 1.0, 0.0) /
                            (std::sqrt(3.0 / (p + 1.0)) + std::numbers::e * std::sqrt(1.0 + p) / (p + 1.0) *
                                                              std::sqrt(2.0 * std::log(2.0 / 0.9)));
        EXPECT_LT(pref, prev);
        EXPECT_GT(pref, 1.0);
        prev = pref;
    }
}

TEST(GaussBound, RejectsBadInput) {
    EXPECT_THROW(bd::gauss_bound(10, 3, 0.1, 1, 1), sketchbench::Error);
    EXPECT_THROW(bd::gauss_bound(10, 5, 1.0, 1, 1), sketchbench::Error);
    EXPECT_THROW(bd::gauss_bound(10, 5, 0.0, 1, 1), sketchbench::Error);
}

TEST(SampleSize, BoundedClassExplicit) {
    auto p = unit_params();
    p.epsilon = 0.5;
    p.delta = 0.05;
    p.tails["K_k"] = std::sqrt(10.0);
    EXPECT_EQ(bd::sample_size(bd::BoundClass::bounded, 10, 256, p), 535u);
    EXPECT_EQ(bd::sample_size(bd::BoundClass::bounded, 10, 256, p), std::size_t(std::ceil(80.0 * std::log(800.0))));
    // leverage uses K_k^2 = k / gamma
    EXPECT_EQ(bd::sample_size(bd::BoundClass::leverage, 10, 256, p), 535u);
    p.tails["gamma"] = 0.5;
    EXPECT_EQ(bd::sample_size(bd::BoundClass::leverage, 10, 256, p), std::size_t(std::ceil(160.0 * std::log(800.0))));
}

TEST(SampleSize, EntriesPlugIn) {
    // epsilon = 1 and delta = 4/e lie outside the parameter domain; check V_delta = 1 there
    // and the formula's shape at legal values.
    EXPECT_NEAR(bd::v_delta(4.0 / std::numbers::e), 1.0, 1e-15);
    auto p = unit_params();
    p.delta = 0.1;
    p.epsilon = 0.5;
    const double vd = bd::v_delta(0.1);
    for (std::size_t k : {1u, 9u, 25u}) {
        const double root = std::sqrt(double(k)) + vd;
        EXPECT_EQ(bd::sample_size(bd::BoundClass::entries, k, 100, p), std::size_t(std::ceil(4.0 * root * root)));
    }
    p.tails["K_E"] = 2.0;
    p.constants["C_ES"] = 0.5;
    EXPECT_EQ(bd::sample_size(bd::BoundClass::entries, 9, 100, p),
              std::size_t(std::ceil(0.5 * 16.0 * 4.0 * (3.0 + vd) * (3.0 + vd))));
}

TEST(SampleSize, OtherClasses) {
    auto p = unit_params();
    p.epsilon = 0.5;
    p.delta = 0.1;
    p.tails["mu"] = 0.05;
    EXPECT_EQ(bd::sample_size(bd::BoundClass::coordinate, 5, 200, p),
              std::size_t(std::ceil(2.0 * 200 * 0.05 / 0.25 * std::log(100.0))));
    p.tails["K_M"] = 3.0;
    EXPECT_EQ(bd::sample_size(bd::BoundClass::moment, 5, 200, p),
              std::size_t(std::ceil(3.0 / (0.25 * 0.01) * std::log(5.0))));
    EXPECT_EQ(bd::sample_size(bd::BoundClass::log_concave, 5, 200, p),
              std::size_t(std::ceil((5.0 + std::log(200.0)) * std::log(5.0))));
    p.tails["M"] = 2.0;
    p.tails["alpha"] = 1.0;
    EXPECT_EQ(bd::sample_size(bd::BoundClass::alpha_subexp, 5, 200, p),
              std::size_t(std::ceil((5.0 + 4.0 * (std::sqrt(5.0 * std::log(200.0)) + 4.0)) * std::log(5.0))));
}

TEST(SampleSize, MissingTailNamesSymbol) {
    bd::BoundParams p;
    try {
        bd::sample_size(bd::BoundClass::entries, 5, 10, p);
        FAIL();
    } catch (const sketchbench::Error& e) {
        EXPECT_EQ(e.code(), sketchbench::ErrorCode::InvalidParam);
        EXPECT_NE(std::string(e.what()).find("K_E"), std::string::npos);
    }
    p.epsilon = 1.5;
    EXPECT_THROW(bd::sample_size(bd::BoundClass::log_concave, 5, 10, p), sketchbench::Error);
}

TEST(TermBound, BoundedFrozenOnFastDecay) {
    const auto sp = la::split_spectrum(sketchbench::testmat::fast_decay(256, 15, 2.0, 1), 15);
    EXPECT_NEAR(sp.sigma_perp_stable_rank(), kFastDecaySr, 1e-10);
    auto p = unit_params();
    p.delta = 0.1;
    p.epsilon = 0.5;
    const auto r = bd::term_bound(bd::BoundClass::bounded, p, sp, 200);
    EXPECT_NEAR(r.term_bound, kBoundedTerm, 1e-10);
    EXPECT_NEAR(r.approx_error_bound, kBoundedError, 1e-10);
    EXPECT_EQ(r.ell, 200u);
    EXPECT_EQ(r.k, 15u);
    EXPECT_FALSE(r.asymptotic);
}

TEST(TermBound, MomentWithUnitStableRank) {
    auto p = unit_params();
    p.epsilon = 0.25;
    p.delta = 0.2;
    // a single trailing singular value gives sr = 1
    const auto sp = diag_spectrum({5, 4, 2}, 2);
    const auto r = bd::term_bound(bd::BoundClass::moment, p, sp, 10);
    EXPECT_NEAR(r.term_bound, 2.0 * 3.0 / (0.75 * 0.2), 1e-12);
    EXPECT_NEAR(r.approx_error_bound, 4.0 + r.term_bound * r.term_bound, 1e-10);
}

TEST(TermBound, HomogeneityAndDamping) {
    auto p = unit_params();
    const std::vector<double> s{10, 8, 3, 1, 0.5, 0.25};
    std::vector<double> s2 = s;
    for (double& x : s2) x *= 3.0;
    for (auto cls : {bd::BoundClass::entries, bd::BoundClass::columns, bd::BoundClass::bounded,
                     bd::BoundClass::moment, bd::BoundClass::alpha_subexp}) {
        const auto a = bd::term_bound(cls, p, diag_spectrum(s, 2), 20);
        const auto b = bd::term_bound(cls, p, diag_spectrum(s2, 2), 20);
        EXPECT_NEAR(b.term_bound, 3.0 * a.term_bound, 1e-12 * b.term_bound) << bd::to_string(cls);
        EXPECT_NEAR(b.approx_error_bound, 9.0 * a.approx_error_bound, 1e-12 * b.approx_error_bound);
        EXPECT_GE(a.approx_error_bound, 9.0);
        EXPECT_GE(a.term_bound, 0.0);

        const auto q2 = bd::term_bound(cls, p, diag_spectrum(s, 2), 20, 2);
        const double gamma = 3.0 / 8.0;
        EXPECT_NEAR(q2.approx_error_bound - 9.0, std::pow(gamma, 8.0) * (a.approx_error_bound - 9.0),
                    1e-12 * a.approx_error_bound);
    }
}

TEST(TermBound, EntriesAndColumnsMonotoneInEll) {
    auto p = unit_params();
    const auto sp = la::split_spectrum(sketchbench::testmat::fast_decay(128, 10, 2.0, 2), 10);
    double prev_e = 1e300, prev_c = 1e300;
    for (std::size_t ell = 10; ell <= 120; ell += 10) {
        const double e = bd::term_bound(bd::BoundClass::entries, p, sp, ell).term_bound;
        const double c = bd::term_bound(bd::BoundClass::columns, p, sp, ell).term_bound;
        EXPECT_LT(e, prev_e);
        EXPECT_LE(c, prev_c);
        prev_e = e;
        prev_c = c;
    }
}

TEST(TermBound, UndersampledFlagAndLabels) {
    auto p = unit_params();
    const auto sp = diag_spectrum({5, 4, 2, 1}, 2);
    EXPECT_TRUE(bd::term_bound(bd::BoundClass::entries, p, sp, 3).undersampled);
    EXPECT_TRUE(bd::term_bound(bd::BoundClass::log_concave, p, sp, 3).asymptotic);
    EXPECT_FALSE(bd::term_bound(bd::BoundClass::entries, p, sp, 3).asymptotic);
    EXPECT_EQ(bd::parse_class("alpha_subexp"), bd::BoundClass::alpha_subexp);
    EXPECT_THROW(bd::parse_class("gaussian"), sketchbench::Error);
    p.tails["K_perp"] = 0.5;
    EXPECT_THROW(bd::term_bound(bd::BoundClass::bounded, p, sp, 30), sketchbench::Error);
}

TEST(Nystrom, FrozenOnFastDecayPsdTail) {
    const auto a = sketchbench::testmat::fast_decay_psd(256, 10, 2.0, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::to_eigen(a));
    std::vector<double> tail;
    for (int i = 256 - 11; i >= 0; --i) tail.push_back(std::max(es.eigenvalues()(i), 0.0));
    auto p = unit_params();
    p.delta = 0.1;
    p.epsilon = 0.5;
    EXPECT_NEAR(bd::nystrom_bound(p, tail, 50), kNystromL50, 1e-10);
}

TEST(Nystrom, ZeroAndHomogeneity) {
    auto p = unit_params();
    const std::vector<double> zero(5, 0.0);
    EXPECT_EQ(bd::nystrom_bound(p, zero, 10), 0.0);
    const std::vector<double> l{0.5, 0.2, 0.1};
    const std::vector<double> l4{2.0, 0.8, 0.4};
    EXPECT_NEAR(bd::nystrom_bound(p, l4, 10), 4.0 * bd::nystrom_bound(p, l, 10), 1e-12);
    EXPECT_THROW(bd::nystrom_bound(p, std::vector<double>{-1.0}, 10), sketchbench::Error);
}

TEST(GaussianWidth, Cases) {
    EXPECT_EQ(bd::mc_gaussian_width(DenseMatrix(4, 3), 1000, SeedSpec{1, 0, 0}).estimate, 0.0);
    DenseMatrix e11(5, 5);
    e11(0, 0) = 1.0;
    const auto w = bd::mc_gaussian_width(e11, 100000, SeedSpec{2, 0, 0});
    EXPECT_NEAR(w.estimate, std::sqrt(2.0 / std::numbers::pi), 3.0 * w.stderr_);
    EXPECT_GT(w.stderr_, 0.0);
    EXPECT_THROW(bd::mc_gaussian_width(e11, 999, SeedSpec{}), sketchbench::Error);
}

TEST(GaussianWidth, BelowFrobeniusNorm) {
    for (unsigned c = 0; c < 20; ++c) {
        const std::size_t rows = 1 + (c * 37) % 100, cols = 1 + (c * 53) % 100;
        const auto h = oracle::gaussian(rows, cols, 100 + c);
        const auto w = bd::mc_gaussian_width(h, 2000, SeedSpec{3, c, 0});
        EXPECT_LE(w.estimate, oracle::to_eigen(h).norm() + 3.0 * w.stderr_);
    }
}

TEST(Constants, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "sketchbench_constants_test.txt";
    const std::map<std::string, double, std::less<>> c{{"C_EB", 0.123456789012345678}, {"C_CB", 4.5e-7}};
    bd::save_constants(path, c);
    EXPECT_EQ(bd::load_constants(path), c);
    {
        std::ofstream out(path);
        out << "# header\n  C_ES = 2.5  # trailing\n\nC_CS=3\n";
    }
    const auto loaded = bd::load_constants(path);
    EXPECT_EQ(loaded.at("C_ES"), 2.5);
    EXPECT_EQ(loaded.at("C_CS"), 3.0);
    {
        std::ofstream out(path);
        out << "C_ES = two\n";
    }
    EXPECT_THROW(bd::load_constants(path), sketchbench::ParseError);
    std::filesystem::remove(path);
    try {
        bd::load_constants(path);
        FAIL();
    } catch (const sketchbench::Error& e) {
        EXPECT_EQ(e.code(), sketchbench::ErrorCode::IoError);
    }
}

TEST(Constants, CalibrationCoversAllButDeltaFraction) {
    const auto sp = diag_spectrum({4, 3, 1, 0.5, 0.25}, 2);
    auto p = unit_params();
    p.delta = 0.1;
    std::vector<double> t;
    for (int i = 1; i <= 100; ++i) t.push_back(0.05 * i);
    const auto c = bd::calibrate_constants(t, sp, 8, p);
    p.constants = c;
    const double bound = bd::term_bound(bd::BoundClass::entries, p, sp, 8).term_bound;
    int exceed = 0;
    for (double x : t) exceed += x > bound * (1 + 1e-12);
    EXPECT_LE(exceed, 10);
    EXPECT_GE(exceed, 9);
    EXPECT_GT(c.at("C_CB"), 0.0);
    EXPECT_THROW(bd::calibrate_constants(std::vector<double>{}, sp, 8, p), sketchbench::Error);
}
