#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace sketchbench {

/// Row-major dense real matrix. Every other module passes data around in
/// this form; sketches with structural sparsity are still stored densely.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> values);
    /// rows x cols matrix with `values` on the leading diagonal.
    static DenseMatrix diagonal(std::size_t rows, std::size_t cols, std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    std::vector<double> column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> values);

    DenseMatrix transpose() const;
    /// Copy of the nr x nc block starting at (r0, c0).
    DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    DenseMatrix leading_columns(std::size_t nc) const { return block(0, 0, rows_, nc); }

    bool all_finite() const noexcept;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

/// A * B
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// A^T * B
DenseMatrix multiply_tn(const DenseMatrix& a, const DenseMatrix& b);
/// A * B^T
DenseMatrix multiply_nt(const DenseMatrix& a, const DenseMatrix& b);
/// U * diag(s) * Vt, using the first s.size() columns of U and rows of Vt.
DenseMatrix reconstruct(const DenseMatrix& u, std::span<const double> s, const DenseMatrix& vt);

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);
std::vector<double> matvec_t(const DenseMatrix& a, std::span<const double> x);

double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

/// ||Q^T Q - I||_F
double orthogonality_residual(const DenseMatrix& q);

// Text format: first line "rows cols", then one row per line with 17
// significant digits, which round-trips every finite double exactly.
void write_matrix(std::ostream& out, const DenseMatrix& a);
DenseMatrix read_matrix(std::istream& in);
void save_matrix(const std::filesystem::path& path, const DenseMatrix& a);
DenseMatrix load_matrix(const std::filesystem::path& path);

} // namespace sketchbench
