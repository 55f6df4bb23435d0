#pragma once

// Hand-rolled generators and comparison helpers shared by the test suites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>

#include "aafp/fixed_point.hpp"
#include "aafp/linalg.hpp"
#include "aafp/problems.hpp"

namespace testing {

using aafp::CsrMatrix;
using aafp::DenseMatrix;
using aafp::SeededRng;
using aafp::Vector;

inline std::size_t uniform_int(SeededRng& rng, std::size_t lo, std::size_t hi)
{
    return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

inline double uniform_real(SeededRng& rng, double lo, double hi)
{
    return lo + (hi - lo) * rng.uniform();
}

inline Vector random_vector(SeededRng& rng, std::size_t n)
{
    return aafp::rng_normal(rng, n);
}

inline DenseMatrix random_dense(SeededRng& rng, std::size_t rows, std::size_t cols)
{
    DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

inline CsrMatrix diagonal_matrix(const Vector& d)
{
    std::vector<aafp::Triplet> t;
    for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
    return CsrMatrix::from_triplets(d.size(), d.size(), std::move(t));
}

/// Linear map q(x) = Mx + b with M = diag(spectrum), as a Richardson map on
/// A = I − M.
inline aafp::FixedPointMap diagonal_linear_map(const Vector& spectrum, Vector b)
{
    Vector a_diag(spectrum.size());
    for (std::size_t i = 0; i < spectrum.size(); ++i) a_diag[i] = 1.0 - spectrum[i];
    return aafp::richardson_map(diagonal_matrix(a_diag), std::move(b));
}

inline double relative_error(std::span<const double> x, std::span<const double> y)
{
    const double scale = std::max(aafp::norm2(y), 1e-300);
    return aafp::norm2(aafp::subtract(x, y)) / scale;
}

inline double relative_diff(double x, double y)
{
    const double scale = std::max({std::abs(x), std::abs(y), 1e-300});
    return std::abs(x - y) / scale;
}

} // namespace testing
