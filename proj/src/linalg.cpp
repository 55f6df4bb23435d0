#include "aafp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace aafp {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* where)
{
    if (a != b) {
        throw DimensionError(std::string(where) + ": length mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
    }
}

} // namespace

// ---------------------------------------------------------------- DenseMatrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
{
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries))
{
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("DenseMatrix: expected " + std::to_string(rows_ * cols_) +
                             " entries, got " + std::to_string(data_.size()));
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n)
{
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
}

DenseMatrix DenseMatrix::from_columns(std::span<const Vector> columns)
{
    if (columns.empty()) return {};
    const std::size_t rows = columns.front().size();
    DenseMatrix out(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        require_same_length(columns[j].size(), rows, "DenseMatrix::from_columns");
        for (std::size_t i = 0; i < rows; ++i) out(i, j) = columns[j][i];
    }
    return out;
}

Vector DenseMatrix::column(std::size_t j) const
{
    Vector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

DenseMatrix DenseMatrix::transposed() const
{
    DenseMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

// ------------------------------------------------------------------ CsrMatrix

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values))
{
    if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != values_.size() ||
        col_idx_.size() != values_.size()) {
        throw DimensionError("CsrMatrix: inconsistent row_ptr/col_idx/values");
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        if (row_ptr_[i] > row_ptr_[i + 1]) throw DimensionError("CsrMatrix: row_ptr decreasing");
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            if (col_idx_[p] >= cols_) throw DimensionError("CsrMatrix: column index out of range");
            if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1]) {
                throw DimensionError("CsrMatrix: column indices not strictly increasing in row " +
                                     std::to_string(i));
            }
        }
    }
}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
{
    for (const auto& e : entries) {
        if (e.row >= rows || e.col >= cols) {
            throw DimensionError("CsrMatrix::from_triplets: entry (" + std::to_string(e.row) + ", " +
                                 std::to_string(e.col) + ") outside " + std::to_string(rows) + "x" +
                                 std::to_string(cols));
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    std::vector<std::size_t> row_ptr(rows + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(entries.size());
    values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& e = entries[k];
        if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
            values.back() += e.value;
            continue;
        }
        col_idx.push_back(e.col);
        values.push_back(e.value);
        ++row_ptr[e.row + 1];
    }
    std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
    return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::identity(std::size_t n)
{
    std::vector<std::size_t> row_ptr(n + 1);
    std::vector<std::size_t> col_idx(n);
    std::iota(row_ptr.begin(), row_ptr.end(), std::size_t{0});
    std::iota(col_idx.begin(), col_idx.end(), std::size_t{0});
    return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), Vector(n, 1.0));
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix& dense, double drop_tol)
{
    std::vector<Triplet> entries;
    for (std::size_t i = 0; i < dense.rows(); ++i)
        for (std::size_t j = 0; j < dense.cols(); ++j)
            if (std::abs(dense(i, j)) > drop_tol) entries.push_back({i, j, dense(i, j)});
    return from_triplets(dense.rows(), dense.cols(), std::move(entries));
}

double CsrMatrix::at(std::size_t i, std::size_t j) const
{
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Vector CsrMatrix::diagonal() const
{
    Vector out(std::min(rows_, cols_));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, i);
    return out;
}

CsrMatrix CsrMatrix::transposed() const
{
    std::vector<Triplet> entries;
    entries.reserve(nnz());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            entries.push_back({col_idx_[p], i, values_[p]});
    return from_triplets(cols_, rows_, std::move(entries));
}

DenseMatrix CsrMatrix::to_dense() const
{
    DenseMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out(i, col_idx_[p]) = values_[p];
    return out;
}

CsrMatrix CsrMatrix::scale_rows(std::span<const double> scale) const
{
    require_same_length(scale.size(), rows_, "CsrMatrix::scale_rows");
    auto values = values_;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) values[p] *= scale[i];
    return CsrMatrix(rows_, cols_, row_ptr_, col_idx_, std::move(values));
}

// -------------------------------------------------------------------- kernels

double dot(std::span<const double> x, std::span<const double> y)
{
    require_same_length(x.size(), y.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x)
{
    // Scaled accumulation so that huge or tiny entries neither overflow nor underflow.
    double scale = 0.0;
    double ssq = 1.0;
    for (double v : x) {
        if (v == 0.0) continue;
        const double a = std::abs(v);
        if (scale < a) {
            ssq = 1.0 + ssq * (scale / a) * (scale / a);
            scale = a;
        } else {
            ssq += (a / scale) * (a / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

double norm_inf(std::span<const double> x)
{
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

Vector add(std::span<const double> x, std::span<const double> y)
{
    require_same_length(x.size(), y.size(), "add");
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

Vector subtract(std::span<const double> x, std::span<const double> y)
{
    require_same_length(x.size(), y.size(), "subtract");
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

Vector scaled(std::span<const double> x, double alpha)
{
    Vector out(x.begin(), x.end());
    for (double& v : out) v *= alpha;
    return out;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    require_same_length(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(std::span<const double> x) noexcept
{
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

Vector mat_vec(const CsrMatrix& a, std::span<const double> x)
{
    require_same_length(a.cols(), x.size(), "mat_vec");
    const auto row_ptr = a.row_ptr();
    const auto col_idx = a.col_idx();
    const auto values = a.values();
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += values[p] * x[col_idx[p]];
        y[i] = s;
    }
    return y;
}

Vector mat_vec(const DenseMatrix& a, std::span<const double> x)
{
    require_same_length(a.cols(), x.size(), "mat_vec");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vector mat_transpose_vec(const CsrMatrix& a, std::span<const double> x)
{
    require_same_length(a.rows(), x.size(), "mat_transpose_vec");
    const auto row_ptr = a.row_ptr();
    const auto col_idx = a.col_idx();
    const auto values = a.values();
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) y[col_idx[p]] += values[p] * x[i];
    return y;
}

Vector mat_transpose_vec(const DenseMatrix& a, std::span<const double> x)
{
    require_same_length(a.rows(), x.size(), "mat_transpose_vec");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
    return y;
}

DenseMatrix mat_mul(const DenseMatrix& a, const DenseMatrix& b)
{
    require_same_length(a.cols(), b.rows(), "mat_mul");
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

DenseMatrix gram(const CsrMatrix& a)
{
    const auto row_ptr = a.row_ptr();
    const auto col_idx = a.col_idx();
    const auto values = a.values();
    DenseMatrix out(a.cols(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
            for (std::size_t q = row_ptr[i]; q < row_ptr[i + 1]; ++q)
                out(col_idx[p], col_idx[q]) += values[p] * values[q];
    return out;
}

// ------------------------------------------------------------- least squares

LeastSquaresSolution qr_least_squares(const DenseMatrix& b, std::span<const double> rhs, double rank_tol)
{
    require_same_length(b.rows(), rhs.size(), "qr_least_squares");
    if (!(rank_tol > 0.0)) throw std::invalid_argument("qr_least_squares: rank_tol must be positive");

    const std::size_t rows = b.rows();
    const std::size_t cols = b.cols();
    LeastSquaresSolution out;
    out.coefficients.assign(cols, 0.0);
    if (cols == 0) return out;

    // Column-major working copy; target is -rhs since we minimize ‖rhs + Bγ‖.
    std::vector<double> work(rows * cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) work[j * rows + i] = b(i, j);
    Vector target = scaled(rhs, -1.0);
    std::vector<std::size_t> perm(cols);
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    auto col = [&](std::size_t j) { return std::span<double>(work.data() + j * rows, rows); };

    const std::size_t steps = std::min(rows, cols);
    std::size_t rank = 0;
    double leading = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        // Pivot: the trailing column with the largest remaining norm.
        std::size_t pivot = k;
        double pivot_norm = -1.0;
        for (std::size_t j = k; j < cols; ++j) {
            const double nj = norm2(col(j).subspan(k));
            if (nj > pivot_norm) {
                pivot_norm = nj;
                pivot = j;
            }
        }
        if (k == 0) leading = pivot_norm;
        if (pivot_norm == 0.0 || pivot_norm <= rank_tol * leading) break;
        if (pivot != k) {
            std::swap_ranges(col(k).begin(), col(k).end(), col(pivot).begin());
            std::swap(perm[k], perm[pivot]);
        }

        // Householder reflector H = I - 2 v vᵀ / (vᵀv) mapping col(k)[k:] to alpha e₁.
        auto v = col(k).subspan(k);
        const double alpha = v[0] > 0.0 ? -pivot_norm : pivot_norm;
        v[0] -= alpha;
        const double vtv = dot(v, v);
        auto reflect = [&](std::span<double> y) {
            const double s = 2.0 * dot(v, y) / vtv;
            for (std::size_t i = 0; i < v.size(); ++i) y[i] -= s * v[i];
        };
        if (vtv > 0.0) {
            for (std::size_t j = k + 1; j < cols; ++j) reflect(col(j).subspan(k));
            reflect(std::span<double>(target).subspan(k));
        }
        // Store R_kk in place; the reflector is no longer needed.
        v[0] = alpha;
        ++rank;
    }

    // Back substitution on the leading rank × rank block of R.
    Vector z(rank, 0.0);
    for (std::size_t ii = rank; ii-- > 0;) {
        double s = target[ii];
        for (std::size_t j = ii + 1; j < rank; ++j) s -= work[j * rows + ii] * z[j];
        z[ii] = s / work[ii * rows + ii];
    }
    for (std::size_t i = 0; i < rank; ++i) out.coefficients[perm[i]] = z[i];
    out.numerical_rank = rank;
    out.truncated = rank < cols;
    return out;
}

// ------------------------------------------------------------------- Cholesky

Cholesky::Cholesky(const DenseMatrix& spd) : n_(spd.rows()), lower_(spd.rows() * spd.rows(), 0.0)
{
    if (spd.rows() != spd.cols()) throw DimensionError("Cholesky: matrix is not square");
    for (std::size_t j = 0; j < n_; ++j) {
        double d = spd(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= lower_[j * n_ + k] * lower_[j * n_ + k];
        if (!(d > 0.0)) {
            throw std::domain_error("Cholesky: matrix is not positive definite (pivot " +
                                    std::to_string(j) + ")");
        }
        const double ljj = std::sqrt(d);
        lower_[j * n_ + j] = ljj;
        for (std::size_t i = j + 1; i < n_; ++i) {
            double s = spd(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= lower_[i * n_ + k] * lower_[j * n_ + k];
            lower_[i * n_ + j] = s / ljj;
        }
    }
}

Vector Cholesky::solve(std::span<const double> rhs) const
{
    require_same_length(rhs.size(), n_, "Cholesky::solve");
    Vector y(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n_; ++i) {
        double s = y[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower_[i * n_ + k] * y[k];
        y[i] = s / lower_[i * n_ + i];
    }
    for (std::size_t i = n_; i-- > 0;) {
        double s = y[i];
        for (std::size_t k = i + 1; k < n_; ++k) s -= lower_[k * n_ + i] * y[k];
        y[i] = s / lower_[i * n_ + i];
    }
    return y;
}

// --------------------------------------------------------------------- Jacobi

ScaledSystem jacobi_scale(const CsrMatrix& a, std::span<const double> b)
{
    if (a.rows() != a.cols()) throw DimensionError("jacobi_scale: matrix is not square");
    require_same_length(a.rows(), b.size(), "jacobi_scale");
    const Vector diag = a.diagonal();
    Vector inverse(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
        if (diag[i] == 0.0) throw std::domain_error("jacobi_scale: zero diagonal entry in row " + std::to_string(i));
        inverse[i] = 1.0 / diag[i];
    }
    Vector rhs(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) rhs[i] = inverse[i] * b[i];
    return {a.scale_rows(inverse), std::move(rhs)};
}

} // namespace aafp
