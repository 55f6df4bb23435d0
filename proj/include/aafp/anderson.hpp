#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "aafp/fixed_point.hpp"
#include "aafp/linalg.hpp"

namespace aafp {

/// Raised for invalid solver configurations, including an unbounded window
/// that outgrows its hard column cap.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Anderson window size m. `unbounded()` stands for m = ∞, which is still
/// limited to `hard_cap` difference columns.
class WindowSize {
public:
    static constexpr std::size_t kDefaultHardCap = 500;

    static WindowSize bounded(std::size_t m) { return WindowSize(m); }
    static WindowSize unbounded(std::size_t hard_cap = kDefaultHardCap)
    {
        WindowSize w(hard_cap);
        w.unbounded_ = true;
        return w;
    }
    /// Accepts a non-negative integer or "inf".
    static WindowSize parse(const std::string& text);

    bool is_unbounded() const noexcept { return unbounded_; }
    /// m for bounded windows, the hard cap otherwise.
    std::size_t columns() const noexcept { return columns_; }
    std::string to_string() const;

    friend bool operator==(const WindowSize&, const WindowSize&) = default;

private:
    explicit WindowSize(std::size_t m) : columns_(m) {}
    std::size_t columns_;
    bool unbounded_ = false;
};

/// Sliding window of fixed-point evaluations q(x_j) and residuals r(x_j),
/// newest first. Holds at most m + 1 entries, i.e. m difference columns.
class AndersonHistory {
public:
    AndersonHistory(std::size_t dimension, WindowSize window);

    /// Adds the newest pair, dropping the oldest beyond m + 1 entries.
    /// Throws DimensionError on length mismatch and ConfigurationError when an
    /// unbounded window would exceed its hard cap.
    void push(Vector q_value, Vector r_value);

    std::size_t size() const noexcept { return q_values_.size(); }
    /// m_k: the number of difference columns currently available.
    std::size_t columns() const noexcept { return q_values_.empty() ? 0 : q_values_.size() - 1; }
    std::size_t dimension() const noexcept { return dimension_; }
    WindowSize window() const noexcept { return window_; }

    const Vector& q_value(std::size_t age) const { return q_values_.at(age); }
    const Vector& residual(std::size_t age) const { return residuals_.at(age); }

private:
    std::size_t dimension_;
    WindowSize window_;
    std::deque<Vector> q_values_;
    std::deque<Vector> residuals_;
};

/// Diagnostics for one Anderson update.
struct AaStepReport {
    /// γ for the difference-to-newest form, τ for the consecutive-difference form.
    Vector coefficients;
    /// ‖r_k + Bγ‖ at the returned coefficients.
    double ls_residual_norm = 0.0;
    std::size_t numerical_rank = 0;
    bool truncated = false;
};

struct AaStep {
    Vector x_next;
    AaStepReport report;
};

/// x_next = q̄_k + C γ with γ = argmin ‖r_k + B γ‖, where the i-th columns of
/// B and C are r_k − r_{k−i} and q̄_k − q̄_{k−i}. With an empty window this is
/// the plain fixed-point step q̄_k. Requires a non-empty history.
AaStep aa_step_gamma(const AndersonHistory& history, double rank_tol = kDefaultRankTol);

/// Same update written over consecutive differences r_{k−i+1} − r_{k−i} and
/// q̄_{k−i+1} − q̄_{k−i}; the coefficients satisfy τ_j = Σ_{i≥j} γ_i.
AaStep aa_step_tau(const AndersonHistory& history, double rank_tol = kDefaultRankTol);

/// AA(m): x₁ = q(x₀), then an Anderson update every iteration.
/// m = 0 reproduces fp_solve exactly.
SolveResult aa_solve(const FixedPointMap& q, std::span<const double> x0, WindowSize m, const StopRule& stop,
                     double rank_tol = kDefaultRankTol);

namespace detail {

/// Decides, for iteration k ≥ 2, whether x_k is produced by an Anderson
/// update (true) or by a plain fixed-point step (false).
using AndersonSchedule = std::function<bool(std::size_t k)>;

/// Shared driver: every evaluation q(x_{k−1}) and residual r(x_{k−1}) enters
/// the window before the schedule picks how x_k is formed. Iteration 1 is
/// always x₁ = q(x₀). Steps taken with an empty window are labeled FP.
SolveResult accelerated_solve(const FixedPointMap& q, std::span<const double> x0, WindowSize m,
                              const StopRule& stop, double rank_tol, const AndersonSchedule& use_anderson);

} // namespace detail

} // namespace aafp
