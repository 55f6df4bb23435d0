#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aafp {

using Vector = std::vector<double>;

/// Thrown on shape errors (A.cols != x.len and friends).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a value leaves the finite range.
class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static DenseMatrix identity(std::size_t n);
    /// Builds a matrix whose columns are the given vectors (all of equal length).
    static DenseMatrix from_columns(std::span<const Vector> columns);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> entries() const noexcept { return data_; }
    Vector column(std::size_t j) const;
    DenseMatrix transposed() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// One (row, col, value) entry used to assemble sparse matrices.
struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
              std::vector<std::size_t> col_idx, std::vector<double> values);

    /// Sorts entries and sums duplicates. Throws DimensionError on out-of-range indices.
    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);
    static CsrMatrix identity(std::size_t n);
    static CsrMatrix from_dense(const DenseMatrix& dense, double drop_tol = 0.0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Value at (i, j); zero when not stored.
    double at(std::size_t i, std::size_t j) const;
    Vector diagonal() const;
    CsrMatrix transposed() const;
    DenseMatrix to_dense() const;

    /// Left-multiplies by diag(scale): row i is multiplied by scale[i].
    CsrMatrix scale_rows(std::span<const double> scale) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

// Vector kernels. Binary kernels throw DimensionError on length mismatch.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);
Vector add(std::span<const double> x, std::span<const double> y);
Vector subtract(std::span<const double> x, std::span<const double> y);
Vector scaled(std::span<const double> x, double alpha);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
bool all_finite(std::span<const double> x) noexcept;

Vector mat_vec(const CsrMatrix& a, std::span<const double> x);
Vector mat_vec(const DenseMatrix& a, std::span<const double> x);
Vector mat_transpose_vec(const CsrMatrix& a, std::span<const double> x);
Vector mat_transpose_vec(const DenseMatrix& a, std::span<const double> x);
DenseMatrix mat_mul(const DenseMatrix& a, const DenseMatrix& b);
/// AᵀA as a dense matrix.
DenseMatrix gram(const CsrMatrix& a);

struct LeastSquaresSolution {
    Vector coefficients;
    std::size_t numerical_rank = 0;
    bool truncated = false;
};

inline constexpr double kDefaultRankTol = 1e-14;

/// Minimizes ‖rhs + Bγ‖₂ with Householder QR and column pivoting.
///
/// Columns whose pivot |R_jj| falls at or below rank_tol·|R_11| are dropped:
/// their coefficients are zero and `truncated` is set. A matrix with no columns
/// yields an empty coefficient vector.
LeastSquaresSolution qr_least_squares(const DenseMatrix& b, std::span<const double> rhs,
                                      double rank_tol = kDefaultRankTol);

/// Dense Cholesky factor of a symmetric positive definite matrix.
class Cholesky {
public:
    /// Throws std::domain_error if the matrix is not numerically SPD.
    explicit Cholesky(const DenseMatrix& spd);

    Vector solve(std::span<const double> rhs) const;
    std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_ = 0;
    std::vector<double> lower_; // row-major, lower triangle
};

/// Scaled system (D⁻¹A, D⁻¹b) with D = diag(A).
struct ScaledSystem {
    CsrMatrix matrix;
    Vector rhs;
};

/// Throws std::domain_error naming the first row with a zero diagonal entry.
ScaledSystem jacobi_scale(const CsrMatrix& a, std::span<const double> b);

/// Error raised while parsing Matrix Market input. `line()` is 1-based, 0 if unknown.
class MatrixMarketError : public std::runtime_error {
public:
    MatrixMarketError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

CsrMatrix read_matrix_market(const std::filesystem::path& path);
CsrMatrix parse_matrix_market(std::istream& in);
/// Reads an n×1 "array" (or one-column "coordinate") file as a dense vector.
Vector read_matrix_market_vector(const std::filesystem::path& path);
Vector parse_matrix_market_vector(std::istream& in);
/// Writes a coordinate real general file with full round-trip precision.
void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& a);

} // namespace aafp
