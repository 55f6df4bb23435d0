// Command-line runner for the alternating Anderson experiments.
//
//   aafp run    --problem permutation --solver aafp --m inf --s 1 --t 3
//   aafp align  --problem poisson --n 9 --t 3
//   aafp table1 [--format csv]
//   aafp race   --problem lasso --solvers fp aa:8 aafp:8:10:3
//
// Exit codes: 0 converged, 2 not converged, 3 configuration or input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aafp/bounds.hpp"
#include "aafp/experiment.hpp"
#include "aafp/logistic.hpp"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitNotConverged = 2;
constexpr int kExitConfig = 3;

// Flags shared by every subcommand that builds a problem. Values are kept as
// strings and handed to config_from_settings so flags and config files go
// through the same validation.
struct ProblemFlags {
    std::map<std::string, std::string> values;
    std::string config_file;
    bool no_timing = false;

    void attach(CLI::App& app, bool with_solver)
    {
        app.add_option("--config", config_file, "key=value file; flags override its entries");
        add(app, "problem", "permutation | poisson | mm | tv | lasso | nnls | logistic");
        add(app, "n", "problem size (poisson: interior points per side)");
        add(app, "n1", "rows of the random data matrix");
        add(app, "n2", "columns of the random data matrix");
        add(app, "density", "density of the random sparse matrix");
        add(app, "beta", "regularization weight");
        add(app, "mu", "ADMM penalty");
        add(app, "eta", "gradient step length");
        add(app, "precond", "none | jacobi (linear problems)");
        add(app, "x0", "zeros | ones | random");
        add(app, "matrix", "Matrix Market file for --problem mm");
        add(app, "rhs", "Matrix Market right-hand side (default A*ones)");
        add(app, "libsvm", "LIBSVM file for --problem logistic");
        add(app, "features", "minimum feature count for LIBSVM input");
        add(app, "rtol", "relative residual tolerance");
        add(app, "atol", "absolute residual tolerance");
        add(app, "max-iters", "iteration limit");
        add(app, "seed", "random seed");
        add(app, "rank-tol", "least-squares rank truncation tolerance");
        if (with_solver) {
            add(app, "solver", "fp | aa | aafp | gmres");
            add(app, "m", "window size (integer or inf)");
            add(app, "s", "Anderson steps per period");
            add(app, "t", "fixed-point steps per period");
            add(app, "output", "CSV trace path");
        }
        app.add_flag("--no-timing", no_timing, "write 0 for elapsed_seconds (byte-reproducible CSV)");
    }

    aafp::ExperimentConfig config() const
    {
        aafp::Settings settings;
        if (!config_file.empty()) settings = aafp::read_settings_file(config_file);
        for (const auto& [key, value] : values)
            if (!value.empty()) settings[key] = value;
        if (no_timing) settings["timing"] = "false";
        return aafp::config_from_settings(settings);
    }

private:
    void add(CLI::App& app, const std::string& name, const std::string& help)
    {
        app.add_option("--" + name, values[name], help);
    }
};

int exit_for(bool converged)
{
    return converged ? kExitConverged : kExitNotConverged;
}

int cmd_run(const ProblemFlags& flags)
{
    const aafp::ExperimentConfig cfg = flags.config();
    const aafp::ExperimentResult result = aafp::run_experiment(cfg);
    const auto& tr = result.trace;
    const double r0 = tr.residual_norms.empty() ? 0.0 : tr.residual_norms.front();
    const double rk = tr.residual_norms.empty() ? 0.0 : tr.residual_norms.back();
    if (tr.converged) {
        std::printf("converged at iteration %zu (residual %.3e, relative %.3e, %.3f s)\n", tr.iterations, rk,
                    r0 > 0 ? rk / r0 : 0.0, tr.elapsed);
    } else if (result.diverged) {
        std::printf("diverged after %zu iterations: %s\n", tr.iterations, result.message.c_str());
    } else {
        std::printf("not converged after %zu iterations (residual %.3e, relative %.3e)\n", tr.iterations, rk,
                    r0 > 0 ? rk / r0 : 0.0);
    }
    if (!tr.truncated_iterations.empty()) {
        std::printf("least-squares rank truncation at %zu iterations\n", tr.truncated_iterations.size());
    }
    return exit_for(tr.converged);
}

int cmd_align(const ProblemFlags& flags, const std::vector<std::size_t>& ts, double tolerance)
{
    const aafp::ExperimentConfig cfg = flags.config();
    bool ok = true;
    for (std::size_t t : ts) {
        const aafp::AlignmentReport report = aafp::check_alignment(cfg, t);
        std::cout << aafp::format_alignment(report);
        ok = ok && report.max_mismatch <= tolerance && !report.points.empty();
    }
    return exit_for(ok);
}

int cmd_table1(const std::string& format, const std::string& output)
{
    const auto cells = aafp::table1();
    const std::string text = format == "csv" ? aafp::format_table1_csv(cells) : aafp::format_table1_text(cells);
    if (output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + output + "'");
        out << text;
    }
    return kExitConverged;
}

int cmd_race(const ProblemFlags& flags, const std::vector<std::string>& specs, const std::string& output)
{
    aafp::ExperimentConfig cfg = flags.config();
    cfg.output = output;
    std::vector<aafp::SolverSpec> solvers;
    for (const auto& s : specs) solvers.push_back(aafp::SolverSpec::parse(s));
    const auto entries = aafp::run_race(cfg, solvers);
    std::cout << aafp::build_problem(cfg).description << '\n' << aafp::format_race(entries);
    bool all = true;
    for (const auto& e : entries) all = all && e.result.trace.converged;
    return exit_for(all);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Alternating Anderson / fixed-point acceleration experiments"};
    app.require_subcommand(1);

    ProblemFlags run_flags;
    auto* run = app.add_subcommand("run", "solve one problem with one solver and optionally write a CSV trace");
    run_flags.attach(*run, true);

    ProblemFlags align_flags;
    std::vector<std::size_t> align_ts{0, 1, 3};
    double align_tol = 1e-6;
    auto* align = app.add_subcommand("align", "compare aAA(inf)[1]-FP[t] with GMRES at period boundaries");
    align_flags.attach(*align, false);
    align->add_option("--t", align_ts, "fixed-point steps per period (repeatable)");
    align->add_option("--tol", align_tol, "largest acceptable relative mismatch");

    std::string table_format = "text";
    std::string table_output;
    auto* table = app.add_subcommand("table1", "print the Chebyshev bound table");
    table->add_option("--format", table_format, "text | csv")->check(CLI::IsMember({"text", "csv"}));
    table->add_option("--output", table_output, "write to a file instead of stdout");

    ProblemFlags race_flags;
    std::vector<std::string> race_specs{"fp", "aa:5", "aafp:5:1:5"};
    std::string race_output;
    auto* race = app.add_subcommand("race", "run several solvers on one problem in parallel");
    race_flags.attach(*race, false);
    race->add_option("--solvers", race_specs, "fp | gmres | aa:M | aafp:M:S:T");
    race->add_option("--output", race_output, "CSV prefix; one <stem>_<i>.csv per solver");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_flags);
        if (*align) return cmd_align(align_flags, align_ts, align_tol);
        if (*table) return cmd_table1(table_format, table_output);
        if (*race) return cmd_race(race_flags, race_specs, race_output);
    } catch (const std::invalid_argument& e) { // ConfigurationError and parameter domain errors
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const aafp::MatrixMarketError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const aafp::LibsvmError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNotConverged;
    }
    return kExitConfig;
}
