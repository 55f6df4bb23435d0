#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "aafp/linalg.hpp"

namespace aafp {

/// A map q: ℝⁿ → ℝⁿ whose fixed point x* = q(x*) is sought.
///
/// Instances are immutable after construction; any state the evaluation
/// closure captures must be read-only so that a map can be shared by
/// concurrent solves.
class FixedPointMap {
public:
    struct Evaluation {
        Vector value;    // q(x)
        Vector residual; // r(x) = q(x) − x
    };
    using Eval = std::function<Vector(std::span<const double>)>;
    using EvalWithResidual = std::function<Evaluation(std::span<const double>)>;

    /// The residual is formed as q(x) − x.
    FixedPointMap(std::size_t dimension, Eval eval);
    /// For maps that can produce r(x) more accurately than q(x) − x
    /// (Richardson: b − Ax directly).
    FixedPointMap(std::size_t dimension, EvalWithResidual eval);

    std::size_t dimension() const noexcept { return dimension_; }

    /// q(x). Throws DimensionError if x or the result has the wrong length.
    Vector operator()(std::span<const double> x) const;
    Evaluation evaluate(std::span<const double> x) const;

private:
    std::size_t dimension_;
    EvalWithResidual eval_;
};

/// r(x) = q(x) − x.
Vector residual(const FixedPointMap& q, std::span<const double> x);

/// Stop when ‖r_k‖ ≤ max(rel_tol·‖r₀‖, abs_tol) or after max_iters iterations.
struct StopRule {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    std::size_t max_iters = 1000;

    /// Throws std::invalid_argument on negative tolerances or max_iters == 0.
    void validate() const;
    double threshold(double initial_residual) const noexcept;
};

enum class StepKind { FixedPoint, Anderson, Krylov };

std::string_view to_string(StepKind kind) noexcept;

/// Per-iteration record of a solve. Entry k of `residual_norms` and
/// `elapsed_seconds` belongs to iterate x_k; entry k of `step_kinds` says how
/// x_{k+1} was produced.
struct IterationTrace {
    std::vector<double> residual_norms;
    std::vector<double> elapsed_seconds;
    std::vector<StepKind> step_kinds;
    /// Iterations whose least-squares problem was rank-truncated.
    std::vector<std::size_t> truncated_iterations;
    bool converged = false;
    std::size_t iterations = 0;
    double elapsed = 0.0;
};

struct SolveResult {
    Vector solution;
    IterationTrace trace;
};

/// Raised when an iterate or residual becomes NaN/Inf. Carries the trace up
/// to (and including) the last finite residual.
class DivergenceError : public NonFiniteError {
public:
    DivergenceError(const std::string& what, IterationTrace partial);
    const IterationTrace& trace() const noexcept { return trace_; }

private:
    IterationTrace trace_;
};

/// Plain fixed-point iteration x_{k+1} = q(x_k).
SolveResult fp_solve(const FixedPointMap& q, std::span<const double> x0, const StopRule& stop);

/// Richardson map q(x) = x + (b − Ax), i.e. (I − A)x + b.
FixedPointMap richardson_map(std::shared_ptr<const CsrMatrix> a, Vector b);
FixedPointMap richardson_map(const CsrMatrix& a, Vector b);

/// Jacobi map q(x) = x + D⁻¹(b − Ax): Richardson on the diagonally scaled system.
FixedPointMap jacobi_map(const CsrMatrix& a, std::span<const double> b);

namespace detail {

/// Wall-clock bookkeeping shared by the iteration drivers.
class TraceRecorder {
public:
    TraceRecorder();
    /// Appends ‖r‖ and returns it. Throws DivergenceError on non-finite input.
    double record(std::span<const double> x, std::span<const double> r);
    void step(StepKind kind) { trace_.step_kinds.push_back(kind); }
    IterationTrace& trace() noexcept { return trace_; }
    IterationTrace finish(bool converged);

private:
    std::chrono::steady_clock::time_point start_;
    IterationTrace trace_;
};

} // namespace detail

} // namespace aafp
