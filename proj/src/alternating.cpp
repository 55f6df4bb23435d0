#include "aafp/alternating.hpp"

namespace aafp {

void ScheduleConfig::validate() const
{
    if (s < 1) throw ConfigurationError("aAA-FP needs s >= 1");
    if (!(rank_tol > 0.0)) throw ConfigurationError("rank_tol must be positive");
}

StepKind step_kind(std::size_t k, std::size_t s, std::size_t t)
{
    if (k < 2) throw std::invalid_argument("step_kind is defined for k >= 2");
    if (s < 1) throw std::invalid_argument("step_kind needs s >= 1");
    return (k - 1) % (s + t) < t ? StepKind::FixedPoint : StepKind::Anderson;
}

SolveResult aafp_solve(const FixedPointMap& q, std::span<const double> x0, const ScheduleConfig& cfg,
                       const StopRule& stop)
{
    cfg.validate();
    const std::size_t s = cfg.s;
    const std::size_t t = cfg.t;
    return detail::accelerated_solve(q, x0, cfg.m, stop, cfg.rank_tol, [s, t](std::size_t k) {
        return step_kind(k, s, t) == StepKind::Anderson;
    });
}

} // namespace aafp
