#include <doctest.h>

#include "aafp/alternating.hpp"
#include "aafp/experiment.hpp"
#include "aafp/problems.hpp"
#include "support.hpp"

using namespace aafp;
using testing::random_vector;
using testing::uniform_int;

namespace {

constexpr StepKind FP = StepKind::FixedPoint;
constexpr StepKind AA = StepKind::Anderson;

} // namespace

TEST_CASE("step schedule")
{
    // s = 1, t = 2: x₂ = q(x₁), x₃ ← AA, x₄ = q(x₃), x₅ = q(x₄), x₆ ← AA.
    std::vector<StepKind> got;
    for (std::size_t k = 2; k <= 6; ++k) got.push_back(step_kind(k, 1, 2));
    CHECK(got == std::vector<StepKind>{FP, AA, FP, FP, AA});

    // t = 0 is Anderson every step.
    for (std::size_t k = 2; k < 10; ++k) CHECK(step_kind(k, 3, 0) == AA);

    // s = 2, t = 3, period 5: k−1 ≡ 0,1,2 (mod 5) are FP, 3,4 are AA.
    got.clear();
    for (std::size_t k = 2; k <= 11; ++k) got.push_back(step_kind(k, 2, 3));
    CHECK(got == std::vector<StepKind>{FP, FP, AA, AA, FP, FP, FP, AA, AA, FP});

    CHECK_THROWS_AS(step_kind(1, 1, 1), std::invalid_argument);
}

TEST_CASE("schedule validation")
{
    ScheduleConfig cfg;
    cfg.s = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigurationError);
    ScheduleConfig bad_tol;
    bad_tol.rank_tol = 0.0;
    CHECK_THROWS_AS(bad_tol.validate(), ConfigurationError);
    ScheduleConfig ok{WindowSize::bounded(3), 2, 5};
    CHECK(ok.period() == 7);
}

TEST_CASE("solver step labels follow the schedule")
{
    const LinearSystem sys = build_permutation_system(12);
    const ScheduleConfig cfg{WindowSize::unbounded(), 1, 2};
    const auto r = aafp_solve(richardson_map(sys.matrix, sys.rhs), Vector(12, 1.0), cfg, StopRule{0.0, 0.0, 8});
    // x₁ = q(x₀) first, then the schedule from k = 2.
    CHECK(r.trace.step_kinds == std::vector<StepKind>{FP, FP, AA, FP, FP, AA, FP, FP});
}

TEST_CASE("t = 0 reproduces AA(m) bit for bit")
{
    SeededRng rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = uniform_int(rng, 3, 30);
        Vector spectrum(n);
        for (double& v : spectrum) v = testing::uniform_real(rng, -1.5, 1.5);
        const FixedPointMap q = testing::diagonal_linear_map(spectrum, random_vector(rng, n));
        const Vector x0 = random_vector(rng, n);
        const WindowSize m = WindowSize::bounded(uniform_int(rng, 0, 5));
        const StopRule stop{1e-10, 0.0, 100};
        const auto aa = aa_solve(q, x0, m, stop);
        const auto alt = aafp_solve(q, x0, ScheduleConfig{m, uniform_int(rng, 1, 4), 0}, stop);
        CHECK(alt.trace.residual_norms == aa.trace.residual_norms);
        CHECK(alt.trace.step_kinds == aa.trace.step_kinds);
        CHECK(alt.solution == aa.solution);
    }
}

TEST_CASE("permutation system: aAA(inf)[1]-FP[3] converges at iteration 28")
{
    const LinearSystem sys = build_permutation_system(26);
    const auto r = aafp_solve(richardson_map(sys.matrix, sys.rhs), Vector(26, 1.0),
                              ScheduleConfig{WindowSize::unbounded(), 1, 3}, StopRule{1e-8, 0.0, 100});
    CHECK(r.trace.converged);
    CHECK(r.trace.iterations == 28);
    CHECK(r.trace.residual_norms.front() == doctest::Approx(5.0));
}

TEST_CASE("residuals contract for contractive maps under any schedule")
{
    SeededRng rng(1234);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = uniform_int(rng, 3, 30);
        const double c = testing::uniform_real(rng, 0.1, 0.95);
        Vector spectrum(n);
        for (double& v : spectrum) v = testing::uniform_real(rng, -c, c);
        spectrum[0] = rng.uniform() < 0.5 ? c : -c;
        const FixedPointMap q = testing::diagonal_linear_map(spectrum, random_vector(rng, n));
        const ScheduleConfig cfg{WindowSize::bounded(uniform_int(rng, 0, 3)), uniform_int(rng, 1, 3),
                                 uniform_int(rng, 0, 3)};
        const auto r = aafp_solve(q, random_vector(rng, n), cfg, StopRule{1e-10, 0.0, 400});
        const auto& res = r.trace.residual_norms;
        for (std::size_t k = 0; k + 1 < res.size(); ++k) CHECK(res[k + 1] <= c * res[k] + 1e-12);
    }
}

TEST_CASE("period-boundary residuals align with GMRES")
{
    SUBCASE("Jacobi-scaled Poisson, 9x9 interior")
    {
        ExperimentConfig cfg;
        cfg.problem = ProblemKind::Poisson;
        cfg.n = 9;
        for (std::size_t t : {0, 1, 3}) {
            const AlignmentReport rep = check_alignment(cfg, t);
            CAPTURE(t);
            CHECK(rep.points.size() >= 3);
            CHECK(rep.max_mismatch <= 1e-6);
        }
    }
    SUBCASE("permutation n = 32 from ones, every boundary until convergence")
    {
        const LinearSystem sys = build_permutation_system(32);
        for (std::size_t t : {0, 1, 3}) {
            const AlignmentReport rep = check_alignment(sys, Vector(32, 1.0), t, StopRule{1e-8, 0.0, 200});
            CAPTURE(t);
            CHECK(rep.aafp_converged);
            CHECK(rep.points.size() == 32 / (t + 1));
            CHECK(rep.max_mismatch <= 1e-6);
        }
    }
}
