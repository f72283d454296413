#include "sketchbench/matrix.hpp"

#include "sketchbench/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace sketchbench {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidRank: return "InvalidRank";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::Convergence: return "Convergence";
    case ErrorCode::GapViolation: return "GapViolation";
    case ErrorCode::UnsupportedSize: return "UnsupportedSize";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::InvalidProbabilities: return "InvalidProbabilities";
    case ErrorCode::ShiftRetry: return "ShiftRetry";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw Error(ErrorCode::InvalidInput, "data length " + std::to_string(data_.size()) +
                                                 " does not match shape " + std::to_string(rows_) + "x" +
                                                 std::to_string(cols_));
    }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw Error(ErrorCode::InvalidInput, "ragged initializer list");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> values) {
    return diagonal(values.size(), values.size(), values);
}

DenseMatrix DenseMatrix::diagonal(std::size_t rows, std::size_t cols, std::span<const double> values) {
    DenseMatrix m(rows, cols);
    const std::size_t n = std::min({rows, cols, values.size()});
    for (std::size_t i = 0; i < n; ++i) m(i, i) = values[i];
    return m;
}

std::vector<double> DenseMatrix::column(std::size_t j) const {
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

void DenseMatrix::set_column(std::size_t j, std::span<const double> values) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix DenseMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) {
        throw Error(ErrorCode::InvalidInput, "block out of range");
    }
    DenseMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i) {
        auto src = row(r0 + i).subspan(c0, nc);
        std::copy(src.begin(), src.end(), b.row(i).begin());
    }
    return b;
}

bool DenseMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::InvalidInput, std::string(op) + ": shape mismatch " +
                                                 std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                                 " vs " + std::to_string(b.rows()) + "x" +
                                                 std::to_string(b.cols()));
    }
}

} // namespace

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "add");
    DenseMatrix c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < cd.size(); ++i) cd[i] += bd[i];
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "subtract");
    DenseMatrix c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
    return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (double& v : c.data()) v *= s;
    return c;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw Error(ErrorCode::InvalidInput, "multiply: inner dimensions differ");
    }
    DenseMatrix c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i).data();
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const double aip = a(i, p);
            if (aip == 0.0) continue;
            const double* bp = b.row(p).data();
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
    return c;
}

DenseMatrix multiply_tn(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) {
        throw Error(ErrorCode::InvalidInput, "multiply_tn: row counts differ");
    }
    DenseMatrix c(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t p = 0; p < a.rows(); ++p) {
        const double* ap = a.row(p).data();
        const double* bp = b.row(p).data();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double api = ap[i];
            if (api == 0.0) continue;
            double* ci = c.row(i).data();
            for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
        }
    }
    return c;
}

DenseMatrix multiply_nt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) {
        throw Error(ErrorCode::InvalidInput, "multiply_nt: column counts differ");
    }
    DenseMatrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(a.row(i), b.row(j));
    return c;
}

DenseMatrix reconstruct(const DenseMatrix& u, std::span<const double> s, const DenseMatrix& vt) {
    const std::size_t r = s.size();
    if (u.cols() < r || vt.rows() < r) {
        throw Error(ErrorCode::InvalidInput, "reconstruct: factor ranks too small");
    }
    DenseMatrix us(u.rows(), r);
    for (std::size_t i = 0; i < u.rows(); ++i)
        for (std::size_t j = 0; j < r; ++j) us(i, j) = u(i, j) * s[j];
    return multiply(us, vt.block(0, 0, r, vt.cols()));
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
    std::vector<double> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

std::vector<double> matvec_t(const DenseMatrix& a, std::span<const double> x) {
    std::vector<double> y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        const double* ai = a.row(i).data();
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * ai[j];
    }
    return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) {
    // Scaled accumulation avoids overflow for entries near the double range.
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double v : x) {
        const double t = v / scale;
        s += t * t;
    }
    return scale * std::sqrt(s);
}

double frobenius_norm(const DenseMatrix& a) { return norm2(a.data()); }

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

double orthogonality_residual(const DenseMatrix& q) {
    DenseMatrix g = multiply_tn(q, q);
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
    return frobenius_norm(g);
}

void write_matrix(std::ostream& out, const DenseMatrix& a) {
    out << a.rows() << ' ' << a.cols() << '\n';
    char buf[32];
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
            if (j) out << ' ';
            out << buf;
        }
        out << '\n';
    }
}

DenseMatrix read_matrix(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line()) throw ParseError(1, "missing shape header");
    std::istringstream header(line);
    std::size_t rows = 0, cols = 0;
    if (!(header >> rows >> cols)) throw ParseError(line_no, "expected 'rows cols'");

    std::vector<double> data;
    data.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!next_line()) throw ParseError(line_no + 1, "missing row " + std::to_string(i));
        const char* p = line.data();
        const char* end = p + line.size();
        std::size_t count = 0;
        while (true) {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
            if (p == end) break;
            double v = 0.0;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc()) throw NonNumericError(line_no, count + 1, std::string(p, end));
            data.push_back(v);
            ++count;
            p = next;
        }
        if (count != cols) {
            throw ParseError(line_no, "expected " + std::to_string(cols) + " values, found " +
                                          std::to_string(count));
        }
    }
    return DenseMatrix(rows, cols, std::move(data));
}

void save_matrix(const std::filesystem::path& path, const DenseMatrix& a) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    write_matrix(out, a);
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_matrix(in);
}

} // namespace sketchbench
