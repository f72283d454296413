#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sketchbench {

enum class ErrorCode {
    InvalidInput,
    InvalidRank,
    InvalidParam,
    RankDeficient,
    Convergence,
    GapViolation,
    UnsupportedSize,
    Unsupported,
    InvalidProbabilities,
    ShiftRetry,
    ParseError,
    NonNumeric,
    EmptyInput,
    IoError,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Thin QR met a column whose residual norm fell below the rank tolerance.
class RankDeficientError : public Error {
public:
    RankDeficientError(std::size_t column, double residual, const std::string& context = {})
        : Error(ErrorCode::RankDeficient,
                "column " + std::to_string(column) + " has residual norm " + std::to_string(residual) +
                    (context.empty() ? std::string() : " (" + context + ")")),
          column_(column), residual_(residual) {}

    std::size_t column() const noexcept { return column_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t column_;
    double residual_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(ErrorCode::Convergence, what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// sigma_k == sigma_{k+1}: the dominant subspace is not well defined.
class GapViolationError : public Error {
public:
    GapViolationError(std::size_t k, double sigma_k, double sigma_k1)
        : Error(ErrorCode::GapViolation, "no spectral gap at k=" + std::to_string(k) +
                                             ": sigma_k=" + std::to_string(sigma_k) +
                                             ", sigma_{k+1}=" + std::to_string(sigma_k1)),
          sigma_k_(sigma_k), sigma_k1_(sigma_k1) {}

    double sigma_k() const noexcept { return sigma_k_; }
    double sigma_k1() const noexcept { return sigma_k1_; }

private:
    double sigma_k_;
    double sigma_k1_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class NonNumericError : public Error {
public:
    NonNumericError(std::size_t line, std::size_t column, const std::string& cell)
        : Error(ErrorCode::NonNumeric, "line " + std::to_string(line) + ", column " +
                                           std::to_string(column) + ": '" + cell + "'"),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace sketchbench
