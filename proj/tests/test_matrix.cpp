#include "oracle.hpp"

#include "sketchbench/error.hpp"
#include "sketchbench/matrix.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <sstream>

using sketchbench::DenseMatrix;

TEST(DenseMatrix, ShapeAndAccess) {
    DenseMatrix a{{1, 2, 3}, {4, 5, 6}};
    EXPECT_EQ(a.rows(), 2u);
    EXPECT_EQ(a.cols(), 3u);
    EXPECT_EQ(a(1, 2), 6.0);
    EXPECT_EQ(a.column(1), (std::vector<double>{2, 5}));
    EXPECT_EQ(a.transpose()(2, 0), 3.0);
    EXPECT_EQ(a.block(0, 1, 2, 2), (DenseMatrix{{2, 3}, {5, 6}}));
}

TEST(DenseMatrix, RejectsWrongDataLength) {
    EXPECT_THROW(DenseMatrix(2, 2, std::vector<double>(3)), sketchbench::Error);
}

TEST(DenseMatrix, ProductsAgreeWithEigen) {
    const auto a = oracle::gaussian(7, 5, 1);
    const auto b = oracle::gaussian(5, 4, 2);
    const auto c = oracle::gaussian(7, 4, 3);
    const Eigen::MatrixXd ea = oracle::to_eigen(a), eb = oracle::to_eigen(b), ec = oracle::to_eigen(c);
    EXPECT_LT((oracle::to_eigen(sketchbench::multiply(a, b)) - ea * eb).norm(), 1e-13);
    EXPECT_LT((oracle::to_eigen(sketchbench::multiply_tn(a, c)) - ea.transpose() * ec).norm(), 1e-13);
    const auto d = oracle::gaussian(3, 5, 4);
    EXPECT_LT((oracle::to_eigen(sketchbench::multiply_nt(a, d)) - ea * oracle::to_eigen(d).transpose()).norm(), 1e-13);
    EXPECT_NEAR(sketchbench::frobenius_norm(a), ea.norm(), 1e-13);
}

TEST(DenseMatrix, ReconstructUsesLeadingFactors) {
    const DenseMatrix u = DenseMatrix::identity(3);
    const std::vector<double> s{3, 2};
    const DenseMatrix vt = DenseMatrix::identity(3);
    const DenseMatrix a = sketchbench::reconstruct(u, s, vt);
    EXPECT_EQ(a, (DenseMatrix{{3, 0, 0}, {0, 2, 0}, {0, 0, 0}}));
}

TEST(DenseMatrix, Norm2AvoidsOverflow) {
    const double big = 1e300;
    const std::vector<double> x{big, big};
    EXPECT_NEAR(sketchbench::norm2(x) / big, std::sqrt(2.0), 1e-15);
}

TEST(MatrixText, RoundTripIsBitExact) {
    DenseMatrix a = oracle::gaussian(6, 4, 9);
    a(0, 0) = std::numeric_limits<double>::denorm_min();
    a(1, 1) = -0.0;
    a(2, 2) = 1.0 / 3.0;
    std::stringstream ss;
    sketchbench::write_matrix(ss, a);
    const DenseMatrix b = sketchbench::read_matrix(ss);
    ASSERT_EQ(b.rows(), 6u);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(std::bit_cast<std::uint64_t>(a.data()[i]), std::bit_cast<std::uint64_t>(b.data()[i]));
}

TEST(MatrixText, ReportsBadInput) {
    std::stringstream missing("2 2\n1 2\n");
    EXPECT_THROW(sketchbench::read_matrix(missing), sketchbench::ParseError);
    std::stringstream bad("1 2\n1 x\n");
    try {
        sketchbench::read_matrix(bad);
        FAIL();
    } catch (const sketchbench::NonNumericError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 2u);
    }
    std::stringstream ragged("2 2\n1 2\n3\n");
    EXPECT_THROW(sketchbench::read_matrix(ragged), sketchbench::ParseError);
}

TEST(MatrixText, FileErrorsNameThePath) {
    try {
        sketchbench::load_matrix("/nonexistent/dir/m.txt");
        FAIL();
    } catch (const sketchbench::Error& e) {
        EXPECT_EQ(e.code(), sketchbench::ErrorCode::IoError);
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/m.txt"), std::string::npos);
    }
}

TEST(MatrixText, SaveLoad) {
    const auto path = std::filesystem::temp_directory_path() / "sketchbench_matrix_roundtrip.txt";
    const DenseMatrix a = oracle::gaussian(3, 5, 4);
    sketchbench::save_matrix(path, a);
    EXPECT_EQ(sketchbench::load_matrix(path), a);
    std::filesystem::remove(path);
}
