#pragma once

#include <cstddef>

#include "aafp/anderson.hpp"
#include "aafp/fixed_point.hpp"

namespace aafp {

/// aAA(m)[s]–FP[t]: t fixed-point steps followed by s Anderson steps with
/// window m, repeated with period p = s + t.
struct ScheduleConfig {
    WindowSize m = WindowSize::bounded(1);
    std::size_t s = 1;
    std::size_t t = 0;
    double rank_tol = kDefaultRankTol;

    /// Throws ConfigurationError if s == 0 or rank_tol <= 0.
    void validate() const;
    std::size_t period() const noexcept { return s + t; }
};

/// Kind of step producing x_k for k ≥ 2: FP iff (k − 1) mod (s + t) < t.
/// Iteration 1 is always the plain start x₁ = q(x₀) and is not covered here.
StepKind step_kind(std::size_t k, std::size_t s, std::size_t t);

/// The alternating scheme. With t = 0 this is aa_solve with the same window.
SolveResult aafp_solve(const FixedPointMap& q, std::span<const double> x0, const ScheduleConfig& cfg,
                       const StopRule& stop);

} // namespace aafp
