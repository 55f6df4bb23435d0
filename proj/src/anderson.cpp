#include "aafp/anderson.hpp"

#include <charconv>

namespace aafp {

WindowSize WindowSize::parse(const std::string& text)
{
    if (text == "inf" || text == "Inf" || text == "infinity") return unbounded();
    std::size_t m = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, m);
    if (text.empty() || ec != std::errc() || ptr != last) {
        throw ConfigurationError("window size must be a non-negative integer or 'inf', got '" + text + "'");
    }
    return bounded(m);
}

std::string WindowSize::to_string() const
{
    return unbounded_ ? std::string("inf") : std::to_string(columns_);
}

AndersonHistory::AndersonHistory(std::size_t dimension, WindowSize window) : dimension_(dimension), window_(window) {}

void AndersonHistory::push(Vector q_value, Vector r_value)
{
    if (q_value.size() != dimension_ || r_value.size() != dimension_) {
        throw DimensionError("AndersonHistory::push: expected vectors of length " + std::to_string(dimension_));
    }
    if (window_.is_unbounded() && q_values_.size() > window_.columns()) {
        throw ConfigurationError("unbounded Anderson window exceeded its hard cap of " +
                                 std::to_string(window_.columns()) + " columns");
    }
    q_values_.push_front(std::move(q_value));
    residuals_.push_front(std::move(r_value));
    if (!window_.is_unbounded()) {
        while (q_values_.size() > window_.columns() + 1) {
            q_values_.pop_back();
            residuals_.pop_back();
        }
    }
}

namespace {

enum class DifferenceForm { ToNewest, Consecutive };

AaStep anderson_update(const AndersonHistory& history, double rank_tol, DifferenceForm form)
{
    if (history.size() == 0) throw std::logic_error("Anderson update on an empty history");
    const std::size_t n = history.dimension();
    const std::size_t mk = history.columns();
    const Vector& q_new = history.q_value(0);
    const Vector& r_new = history.residual(0);

    AaStep out;
    out.x_next = q_new;
    out.report.ls_residual_norm = norm2(r_new);
    if (mk == 0) return out;

    // Column i-1 of B (residual differences) and C (q differences).
    DenseMatrix b(n, mk);
    DenseMatrix c(n, mk);
    for (std::size_t i = 1; i <= mk; ++i) {
        const Vector& r_hi = form == DifferenceForm::ToNewest ? r_new : history.residual(i - 1);
        const Vector& q_hi = form == DifferenceForm::ToNewest ? q_new : history.q_value(i - 1);
        const Vector& r_lo = history.residual(i);
        const Vector& q_lo = history.q_value(i);
        for (std::size_t row = 0; row < n; ++row) {
            b(row, i - 1) = r_hi[row] - r_lo[row];
            c(row, i - 1) = q_hi[row] - q_lo[row];
        }
    }

    auto ls = qr_least_squares(b, r_new, rank_tol);
    const Vector bg = mat_vec(b, ls.coefficients);
    const Vector cg = mat_vec(c, ls.coefficients);
    axpy(1.0, cg, out.x_next);
    out.report.ls_residual_norm = norm2(add(r_new, bg));
    out.report.numerical_rank = ls.numerical_rank;
    out.report.truncated = ls.truncated;
    out.report.coefficients = std::move(ls.coefficients);
    return out;
}

} // namespace

AaStep aa_step_gamma(const AndersonHistory& history, double rank_tol)
{
    return anderson_update(history, rank_tol, DifferenceForm::ToNewest);
}

AaStep aa_step_tau(const AndersonHistory& history, double rank_tol)
{
    return anderson_update(history, rank_tol, DifferenceForm::Consecutive);
}

namespace detail {

SolveResult accelerated_solve(const FixedPointMap& q, std::span<const double> x0, WindowSize m,
                              const StopRule& stop, double rank_tol, const AndersonSchedule& use_anderson)
{
    stop.validate();
    if (x0.size() != q.dimension()) throw DimensionError("x0 has the wrong dimension");
    if (!(rank_tol > 0.0)) throw ConfigurationError("rank_tol must be positive");

    TraceRecorder rec;
    AndersonHistory history(q.dimension(), m);
    Vector x(x0.begin(), x0.end());
    auto eval = q.evaluate(x);
    const double tol = stop.threshold(rec.record(x, eval.residual));
    if (rec.trace().residual_norms.back() <= tol) return {std::move(x), rec.finish(true)};

    for (std::size_t k = 1; k <= stop.max_iters; ++k) {
        history.push(std::move(eval.value), std::move(eval.residual));
        if (k >= 2 && history.columns() > 0 && use_anderson(k)) {
            auto step = aa_step_gamma(history, rank_tol);
            if (step.report.truncated) rec.trace().truncated_iterations.push_back(k);
            x = std::move(step.x_next);
            rec.step(StepKind::Anderson);
        } else {
            x = history.q_value(0);
            rec.step(StepKind::FixedPoint);
        }
        eval = q.evaluate(x);
        if (rec.record(x, eval.residual) <= tol) return {std::move(x), rec.finish(true)};
    }
    return {std::move(x), rec.finish(false)};
}

} // namespace detail

SolveResult aa_solve(const FixedPointMap& q, std::span<const double> x0, WindowSize m, const StopRule& stop,
                     double rank_tol)
{
    return detail::accelerated_solve(q, x0, m, stop, rank_tol, [](std::size_t) { return true; });
}

} // namespace aafp
