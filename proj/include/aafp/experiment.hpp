#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aafp/alternating.hpp"
#include "aafp/anderson.hpp"
#include "aafp/fixed_point.hpp"
#include "aafp/gmres.hpp"
#include "aafp/problems.hpp"

namespace aafp {

enum class ProblemKind { Permutation, Poisson, MatrixMarket, TotalVariation, Lasso, Nnls, Logistic };
enum class SolverKind { FixedPoint, Anderson, Alternating, Gmres };
enum class Preconditioner { None, Jacobi };
enum class InitialGuess { Zeros, Ones, Random };

/// Everything needed to reproduce one run. Unset optionals take the
/// per-problem defaults listed in the README.
struct ExperimentConfig {
    ProblemKind problem = ProblemKind::Permutation;
    std::optional<std::size_t> n;
    std::optional<std::size_t> n1;
    std::optional<std::size_t> n2;
    std::optional<double> density;
    std::optional<double> beta;
    std::optional<double> mu;
    std::optional<double> eta;
    std::optional<Preconditioner> precond;
    std::optional<InitialGuess> x0;
    std::filesystem::path matrix_path;
    std::filesystem::path rhs_path;
    std::filesystem::path libsvm_path;
    std::size_t features = 0;

    SolverKind solver = SolverKind::Alternating;
    ScheduleConfig schedule;
    std::optional<double> rel_tol;
    std::optional<double> abs_tol;
    std::optional<std::size_t> max_iters;
    std::uint64_t seed = 7;

    std::filesystem::path output;
    bool timing = true;

    /// Throws ConfigurationError on inconsistent combinations.
    void validate() const;
};

using Settings = std::map<std::string, std::string>;

/// Reads `key = value` lines; `#` starts a comment.
Settings read_settings_file(const std::filesystem::path& path);

/// Builds a validated config from settings (keys as in the CLI flags, with
/// dashes or underscores). Throws ConfigurationError on unknown keys or bad values.
ExperimentConfig config_from_settings(const Settings& settings);

/// A constructed problem: the fixed-point map and, for linear problems, the
/// (possibly Jacobi-scaled) system the map iterates on.
struct BuiltProblem {
    FixedPointMap map;
    Vector x0;
    std::optional<LinearSystem> linear;
    std::optional<AdmmProblem> admm;
    std::string description;
};

BuiltProblem build_problem(const ExperimentConfig& cfg);
StopRule effective_stop(const ExperimentConfig& cfg);

struct ExperimentResult {
    Vector solution;
    IterationTrace trace;
    bool diverged = false;
    std::string message;
};

/// Runs the configured solver and writes the CSV trace when an output path is
/// set. Non-finite iterates are reported as a non-converged result.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_solver(const ExperimentConfig& cfg, const BuiltProblem& problem);

/// Columns: iteration, step_kind, residual_norm, elapsed_seconds. The first row
/// is x₀, whose step_kind is "start". With timing disabled every elapsed value is 0.
std::string trace_csv(const IterationTrace& trace, bool timing = true);

struct AlignmentPoint {
    std::size_t j;
    std::size_t k; // j·p
    double aafp_residual;
    double gmres_predicted; // ‖M r^G_{k−1}‖
    double relative_mismatch;
};

struct AlignmentReport {
    std::size_t t = 0;
    std::size_t period = 1;
    std::vector<AlignmentPoint> points;
    double max_mismatch = 0.0;
    std::size_t aafp_iterations = 0;
    std::size_t gmres_iterations = 0;
    bool aafp_converged = false;
    bool gmres_converged = false;
};

inline constexpr double kAlignmentFloor = 1e-10;

/// Runs aAA(∞)[1]–FP[t] and GMRES from the same x₀ on a linear problem and
/// compares ‖r_{jp}‖ with ‖M r^G_{jp−1}‖ (M = I − A) at every period boundary
/// while the GMRES residuals up to jp − 1 are strictly decreasing and above
/// kAlignmentFloor relative to ‖r₀‖.
AlignmentReport check_alignment(const LinearSystem& system, std::span<const double> x0, std::size_t t,
                                const StopRule& stop);
AlignmentReport check_alignment(const ExperimentConfig& cfg, std::size_t t);

std::string format_alignment(const AlignmentReport& report);

/// One competitor in a race: "fp", "gmres", "aa:M" or "aafp:M:S:T" (M may be "inf").
struct SolverSpec {
    SolverKind solver = SolverKind::FixedPoint;
    ScheduleConfig schedule;

    static SolverSpec parse(const std::string& text);
    std::string label() const;
};

struct RaceEntry {
    SolverSpec spec;
    ExperimentResult result;
};

/// Runs every solver on the same problem, one worker thread per solver.
std::vector<RaceEntry> run_race(const ExperimentConfig& base, const std::vector<SolverSpec>& solvers);
std::string format_race(const std::vector<RaceEntry>& entries);

} // namespace aafp
