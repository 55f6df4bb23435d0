#include "aafp/fixed_point.hpp"

#include <cmath>
#include <string>

namespace aafp {

FixedPointMap::FixedPointMap(std::size_t dimension, Eval eval) : dimension_(dimension)
{
    if (!eval) throw std::invalid_argument("FixedPointMap: empty evaluation function");
    eval_ = [eval = std::move(eval)](std::span<const double> x) {
        Evaluation out{eval(x), {}};
        if (out.value.size() == x.size()) out.residual = subtract(out.value, x);
        return out;
    };
}

FixedPointMap::FixedPointMap(std::size_t dimension, EvalWithResidual eval)
    : dimension_(dimension), eval_(std::move(eval))
{
    if (!eval_) throw std::invalid_argument("FixedPointMap: empty evaluation function");
}

FixedPointMap::Evaluation FixedPointMap::evaluate(std::span<const double> x) const
{
    if (x.size() != dimension_) {
        throw DimensionError("fixed-point map expects dimension " + std::to_string(dimension_) + ", got " +
                             std::to_string(x.size()));
    }
    Evaluation out = eval_(x);
    if (out.value.size() != dimension_ || out.residual.size() != dimension_) {
        throw DimensionError("fixed-point map changed the dimension");
    }
    return out;
}

Vector FixedPointMap::operator()(std::span<const double> x) const
{
    return evaluate(x).value;
}

Vector residual(const FixedPointMap& q, std::span<const double> x)
{
    return q.evaluate(x).residual;
}

void StopRule::validate() const
{
    if (!(rel_tol >= 0.0) || !(abs_tol >= 0.0)) throw std::invalid_argument("stop rule tolerances must be >= 0");
    if (max_iters < 1) throw std::invalid_argument("stop rule max_iters must be >= 1");
}

double StopRule::threshold(double initial_residual) const noexcept
{
    return std::max(rel_tol * initial_residual, abs_tol);
}

std::string_view to_string(StepKind kind) noexcept
{
    switch (kind) {
    case StepKind::FixedPoint: return "FP";
    case StepKind::Anderson: return "AA";
    case StepKind::Krylov: return "GMRES";
    }
    return "?";
}

DivergenceError::DivergenceError(const std::string& what, IterationTrace partial)
    : NonFiniteError(what), trace_(std::move(partial))
{
}

namespace detail {

TraceRecorder::TraceRecorder() : start_(std::chrono::steady_clock::now()) {}

double TraceRecorder::record(std::span<const double> x, std::span<const double> r)
{
    const double norm = norm2(r);
    if (!all_finite(x) || !std::isfinite(norm)) {
        const auto k = trace_.residual_norms.size();
        throw DivergenceError("non-finite iterate at iteration " + std::to_string(k), finish(false));
    }
    trace_.residual_norms.push_back(norm);
    trace_.elapsed_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
    return norm;
}

IterationTrace TraceRecorder::finish(bool converged)
{
    trace_.converged = converged;
    trace_.iterations = trace_.residual_norms.empty() ? 0 : trace_.residual_norms.size() - 1;
    // A trailing step whose iterate never got a finite residual is dropped.
    trace_.step_kinds.resize(trace_.iterations);
    trace_.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return trace_;
}

} // namespace detail

SolveResult fp_solve(const FixedPointMap& q, std::span<const double> x0, const StopRule& stop)
{
    stop.validate();
    if (x0.size() != q.dimension()) throw DimensionError("fp_solve: x0 has the wrong dimension");

    detail::TraceRecorder rec;
    Vector x(x0.begin(), x0.end());
    auto eval = q.evaluate(x);
    const double tol = stop.threshold(rec.record(x, eval.residual));
    if (rec.trace().residual_norms.back() <= tol) return {std::move(x), rec.finish(true)};

    for (std::size_t k = 1; k <= stop.max_iters; ++k) {
        rec.step(StepKind::FixedPoint);
        x = std::move(eval.value);
        eval = q.evaluate(x);
        if (rec.record(x, eval.residual) <= tol) return {std::move(x), rec.finish(true)};
    }
    return {std::move(x), rec.finish(false)};
}

FixedPointMap richardson_map(std::shared_ptr<const CsrMatrix> a, Vector b)
{
    if (a->rows() != a->cols()) throw DimensionError("richardson_map: matrix is not square");
    if (b.size() != a->rows()) throw DimensionError("richardson_map: rhs has the wrong length");
    const std::size_t n = a->rows();
    return FixedPointMap(n, [a = std::move(a), b = std::move(b)](std::span<const double> x) {
        FixedPointMap::Evaluation out{Vector(x.size()), subtract(b, mat_vec(*a, x))};
        for (std::size_t i = 0; i < x.size(); ++i) out.value[i] = x[i] + out.residual[i];
        return out;
    });
}

FixedPointMap richardson_map(const CsrMatrix& a, Vector b)
{
    return richardson_map(std::make_shared<const CsrMatrix>(a), std::move(b));
}

FixedPointMap jacobi_map(const CsrMatrix& a, std::span<const double> b)
{
    auto scaled_system = jacobi_scale(a, b);
    return richardson_map(std::make_shared<const CsrMatrix>(std::move(scaled_system.matrix)),
                          std::move(scaled_system.rhs));
}

} // namespace aafp
