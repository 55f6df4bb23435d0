#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>

#include "aafp/fixed_point.hpp"
#include "aafp/linalg.hpp"
#include "aafp/problems.hpp"

namespace aafp {

/// Samples (one per row) with ±1 labels for
/// h(x) = (1/n₁) Σ log(1 + exp(−yᵢ xᵀcᵢ)) + (β/2)‖x‖².
struct LogisticDataset {
    CsrMatrix samples;
    Vector labels;
    double beta = 1e-2;
    double eta = 1.0;

    /// Throws std::invalid_argument on non-±1 labels, row/label count
    /// mismatch, or non-positive beta/eta.
    void validate() const;
};

double logistic_objective(const LogisticDataset& data, std::span<const double> x);
Vector logistic_gradient(const LogisticDataset& data, std::span<const double> x);

/// Gradient descent as a fixed-point map: q(x) = x − η∇h(x).
FixedPointMap gd_map(LogisticDataset data);

/// Samples with standard normal features scaled by 1/√n₂ and labels drawn
/// from a logistic model around a random planted weight vector.
LogisticDataset synthetic_logistic(SeededRng& rng, std::size_t rows, std::size_t features, double beta, double eta);

class LibsvmError : public std::runtime_error {
public:
    LibsvmError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct LibsvmData {
    CsrMatrix samples;
    Vector labels;
};

/// Reads `label idx:val idx:val ...` lines with 1-based feature indices.
/// Two-class labels map to ±1: a {−1, +1} file is kept as is, otherwise the
/// smaller label becomes +1 and the larger −1 (covtype's 1/2 → +1/−1).
/// `features` widens the column count beyond the largest index seen.
LibsvmData parse_libsvm(std::istream& in, std::size_t features = 0);
LibsvmData read_libsvm(const std::filesystem::path& path, std::size_t features = 0);

} // namespace aafp
