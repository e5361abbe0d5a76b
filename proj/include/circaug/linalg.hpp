#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "circaug/rng.hpp"

namespace circaug {

/// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Takes ownership of `data`; its length must equal rows * cols.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> values);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix random_normal(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& storage() const noexcept { return data_; }

    std::vector<double> column(std::size_t c) const;
    bool all_finite() const noexcept;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s) noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);

Matrix transpose(const Matrix& a);
/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * bᵀ
Matrix matmul_nt(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& a) noexcept;
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Throws ValidationError naming `what` if any entry is NaN/Inf.
void require_finite(const Matrix& m, const char* what);

struct SvdResult {
    Matrix u;                   // m x r, orthonormal columns
    std::vector<double> sigma;  // r values, descending, >= 0
    Matrix v;                   // n x r, orthonormal columns
};

/// Thin SVD, r = min(rows, cols), by one-sided Jacobi rotations.
SvdResult svd(const Matrix& w);

/// Same result contract; rotations start from the orthogonal basis of a
/// previous decomposition of a nearby matrix of the same shape, which
/// typically converges in one or two sweeps.
SvdResult svd(const Matrix& w, const SvdResult& warm_start);

/// U * diag(sigma) * Vᵀ
Matrix reconstruct(const SvdResult& s);

/// Left vector of a persistent power iteration (length = matrix rows).
struct PowerIterState {
    std::vector<double> u;

    static PowerIterState random(std::size_t rows, Rng& rng);
};

struct SpectralNormEstimate {
    double sigma = 0.0;
    PowerIterState state;
};

/// Largest singular value by `iters` rounds of power iteration, warm-started
/// from `state`. A zero matrix yields sigma = 0 and leaves the state as is.
SpectralNormEstimate spectral_norm(const Matrix& w, const PowerIterState& state, std::size_t iters);

}  // namespace circaug
