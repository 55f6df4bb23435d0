#include "aafp/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "aafp/logistic.hpp"

namespace aafp {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string key)
{
    key = trim(key);
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    std::replace(key.begin(), key.end(), '-', '_');
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    return key;
}

std::size_t parse_count(const std::string& key, const std::string& value)
{
    try {
        std::size_t used = 0;
        if (!value.empty() && value.front() == '-') throw std::invalid_argument(value);
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigurationError(key + ": expected a non-negative integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigurationError(key + ": expected a real number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigurationError(key + ": expected true or false, got '" + value + "'");
}

template <typename T>
T parse_choice(const std::string& key, const std::string& value, std::initializer_list<std::pair<const char*, T>> table)
{
    for (const auto& [name, kind] : table)
        if (value == name) return kind;
    std::string names;
    for (const auto& entry : table) names += (names.empty() ? "" : ", ") + std::string(entry.first);
    throw ConfigurationError("unknown " + key + " '" + value + "' (expected one of: " + names + ")");
}

ProblemKind parse_problem(const std::string& v)
{
    return parse_choice<ProblemKind>("problem", v,
                                     {{"permutation", ProblemKind::Permutation},
                                      {"poisson", ProblemKind::Poisson},
                                      {"mm", ProblemKind::MatrixMarket},
                                      {"matrix-market", ProblemKind::MatrixMarket},
                                      {"tv", ProblemKind::TotalVariation},
                                      {"lasso", ProblemKind::Lasso},
                                      {"nnls", ProblemKind::Nnls},
                                      {"logistic", ProblemKind::Logistic}});
}

SolverKind parse_solver(const std::string& v)
{
    return parse_choice<SolverKind>("solver", v,
                                    {{"fp", SolverKind::FixedPoint},
                                     {"aa", SolverKind::Anderson},
                                     {"aafp", SolverKind::Alternating},
                                     {"gmres", SolverKind::Gmres}});
}

WindowSize parse_window(const std::string& v)
{
    try {
        return WindowSize::parse(v);
    } catch (const ConfigurationError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigurationError("m: expected a non-negative integer or 'inf', got '" + v + "'");
    }
}

bool is_linear(ProblemKind p)
{
    return p == ProblemKind::Permutation || p == ProblemKind::Poisson || p == ProblemKind::MatrixMarket;
}

struct ProblemDefaults {
    double rel_tol;
    std::size_t max_iters;
};

ProblemDefaults defaults_for(ProblemKind p)
{
    switch (p) {
    case ProblemKind::Permutation: return {1e-8, 1000};
    case ProblemKind::Poisson: return {1e-12, 1000};
    case ProblemKind::MatrixMarket: return {1e-8, 10000};
    case ProblemKind::TotalVariation: return {1e-12, 1000};
    case ProblemKind::Lasso: return {1e-12, 1000};
    case ProblemKind::Nnls: return {1e-12, 2000};
    case ProblemKind::Logistic: return {1e-12, 1000};
    }
    return {1e-8, 1000};
}

Vector initial_guess(InitialGuess kind, std::size_t dim, std::uint64_t seed)
{
    switch (kind) {
    case InitialGuess::Zeros: return Vector(dim, 0.0);
    case InitialGuess::Ones: return Vector(dim, 1.0);
    case InitialGuess::Random: {
        SeededRng rng(seed ^ 0x9e3779b97f4a7c15ULL);
        return rng_normal(rng, dim);
    }
    }
    return Vector(dim, 0.0);
}

BuiltProblem linear_problem(const ExperimentConfig& cfg, CsrMatrix a, Vector b, Preconditioner fallback,
                            InitialGuess guess_fallback, std::string description)
{
    const Preconditioner pre = cfg.precond.value_or(fallback);
    LinearSystem system{std::move(a), std::move(b)};
    if (pre == Preconditioner::Jacobi) {
        ScaledSystem s;
        try {
            s = jacobi_scale(system.matrix, system.rhs);
        } catch (const std::domain_error& e) {
            throw ConfigurationError(std::string("jacobi preconditioner: ") + e.what());
        }
        system = {std::move(s.matrix), std::move(s.rhs)};
        description += ", Jacobi-scaled";
    }
    const std::size_t n = system.rhs.size();
    FixedPointMap map = richardson_map(system.matrix, system.rhs);
    return {std::move(map), initial_guess(cfg.x0.value_or(guess_fallback), n, cfg.seed), std::move(system),
            std::nullopt, std::move(description)};
}

BuiltProblem admm_problem(const ExperimentConfig& cfg, AdmmProblem problem, std::string description)
{
    const std::size_t dim = 2 * problem.split_dim;
    FixedPointMap map = admm_map(problem);
    return {std::move(map), initial_guess(cfg.x0.value_or(InitialGuess::Zeros), dim, cfg.seed), std::nullopt,
            std::move(problem), std::move(description)};
}

std::string format_double(const char* fmt, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

} // namespace

void ExperimentConfig::validate() const
{
    schedule.validate();
    effective_stop(*this).validate();
    if (solver == SolverKind::Gmres && !is_linear(problem)) {
        throw ConfigurationError("gmres requires a linear problem (permutation, poisson or mm)");
    }
    if (solver == SolverKind::Anderson && schedule.t != 0) {
        throw ConfigurationError("solver aa takes no FP steps; use solver aafp for t > 0");
    }
    if (problem == ProblemKind::MatrixMarket && matrix_path.empty()) {
        throw ConfigurationError("problem mm requires a matrix path");
    }
    if (!rhs_path.empty() && problem != ProblemKind::MatrixMarket) {
        throw ConfigurationError("rhs is only used with problem mm");
    }
    if (!libsvm_path.empty() && problem != ProblemKind::Logistic) {
        throw ConfigurationError("libsvm is only used with problem logistic");
    }
    if (precond && !is_linear(problem)) throw ConfigurationError("precond applies to linear problems only");
    if (n && *n < 2) throw ConfigurationError("n must be at least 2");
    if (problem == ProblemKind::Poisson && n && *n < 3) throw ConfigurationError("poisson needs n >= 3");
    if (n1 && *n1 == 0) throw ConfigurationError("n1 must be positive");
    if (n2 && *n2 == 0) throw ConfigurationError("n2 must be positive");
    if (density && !(*density > 0.0 && *density <= 1.0)) throw ConfigurationError("density must be in (0, 1]");
    if (beta && !(*beta > 0.0)) throw ConfigurationError("beta must be positive");
    if (mu && !(*mu > 0.0)) throw ConfigurationError("mu must be positive");
    if (eta && !(*eta > 0.0)) throw ConfigurationError("eta must be positive");
}

StopRule effective_stop(const ExperimentConfig& cfg)
{
    const ProblemDefaults d = defaults_for(cfg.problem);
    StopRule stop;
    stop.rel_tol = cfg.rel_tol.value_or(d.rel_tol);
    stop.abs_tol = cfg.abs_tol.value_or(0.0);
    stop.max_iters = cfg.max_iters.value_or(d.max_iters);
    return stop;
}

Settings read_settings_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open config file '" + path.string() + "'");
    Settings out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigurationError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = normalize_key(line.substr(0, eq));
        if (key.empty()) throw ConfigurationError(path.string() + ":" + std::to_string(lineno) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

ExperimentConfig config_from_settings(const Settings& settings)
{
    ExperimentConfig cfg;
    for (const auto& [raw_key, value] : settings) {
        const std::string key = normalize_key(raw_key);
        if (key == "problem") cfg.problem = parse_problem(value);
        else if (key == "n") cfg.n = parse_count(key, value);
        else if (key == "n1") cfg.n1 = parse_count(key, value);
        else if (key == "n2") cfg.n2 = parse_count(key, value);
        else if (key == "density") cfg.density = parse_real(key, value);
        else if (key == "beta") cfg.beta = parse_real(key, value);
        else if (key == "mu") cfg.mu = parse_real(key, value);
        else if (key == "eta") cfg.eta = parse_real(key, value);
        else if (key == "precond")
            cfg.precond = parse_choice<Preconditioner>(key, value,
                                                       {{"none", Preconditioner::None}, {"jacobi", Preconditioner::Jacobi}});
        else if (key == "x0")
            cfg.x0 = parse_choice<InitialGuess>(
                key, value, {{"zeros", InitialGuess::Zeros}, {"ones", InitialGuess::Ones}, {"random", InitialGuess::Random}});
        else if (key == "matrix") cfg.matrix_path = value;
        else if (key == "rhs") cfg.rhs_path = value;
        else if (key == "libsvm") cfg.libsvm_path = value;
        else if (key == "features") cfg.features = parse_count(key, value);
        else if (key == "solver") cfg.solver = parse_solver(value);
        else if (key == "m") cfg.schedule.m = parse_window(value);
        else if (key == "s") cfg.schedule.s = parse_count(key, value);
        else if (key == "t") cfg.schedule.t = parse_count(key, value);
        else if (key == "rank_tol") cfg.schedule.rank_tol = parse_real(key, value);
        else if (key == "rtol" || key == "rel_tol") cfg.rel_tol = parse_real(key, value);
        else if (key == "atol" || key == "abs_tol") cfg.abs_tol = parse_real(key, value);
        else if (key == "max_iters") cfg.max_iters = parse_count(key, value);
        else if (key == "seed") cfg.seed = parse_count(key, value);
        else if (key == "output") cfg.output = value;
        else if (key == "timing") cfg.timing = parse_bool(key, value);
        else throw ConfigurationError("unknown setting '" + raw_key + "'");
    }
    cfg.validate();
    return cfg;
}

BuiltProblem build_problem(const ExperimentConfig& cfg)
{
    cfg.validate();
    SeededRng rng(cfg.seed);
    switch (cfg.problem) {
    case ProblemKind::Permutation: {
        const std::size_t n = cfg.n.value_or(26);
        LinearSystem sys = build_permutation_system(n);
        return linear_problem(cfg, std::move(sys.matrix), std::move(sys.rhs), Preconditioner::None,
                              InitialGuess::Ones, "permutation n=" + std::to_string(n));
    }
    case ProblemKind::Poisson: {
        const std::size_t n = cfg.n.value_or(31);
        PoissonProblem p = build_poisson_fd(n);
        return linear_problem(cfg, std::move(p.matrix), std::move(p.rhs), Preconditioner::Jacobi,
                              InitialGuess::Zeros, "poisson " + std::to_string(n) + "x" + std::to_string(n));
    }
    case ProblemKind::MatrixMarket: {
        CsrMatrix a = read_matrix_market(cfg.matrix_path);
        if (a.rows() != a.cols()) throw ConfigurationError("matrix must be square");
        Vector b = cfg.rhs_path.empty() ? mat_vec(a, Vector(a.cols(), 1.0)) : read_matrix_market_vector(cfg.rhs_path);
        if (b.size() != a.rows()) throw ConfigurationError("rhs length does not match the matrix");
        return linear_problem(cfg, std::move(a), std::move(b), Preconditioner::Jacobi, InitialGuess::Zeros,
                              cfg.matrix_path.filename().string());
    }
    case ProblemKind::TotalVariation: {
        const std::size_t n = cfg.n.value_or(1000);
        Vector x_hat = rng_normal(rng, n);
        const double beta = cfg.beta.value_or(1e-3 * norm_inf(x_hat));
        const double mu = cfg.mu.value_or(10.0);
        return admm_problem(cfg, tv_admm_problem(std::move(x_hat), beta, mu), "tv n=" + std::to_string(n));
    }
    case ProblemKind::Lasso:
    case ProblemKind::Nnls: {
        const std::size_t n1 = cfg.n1.value_or(150);
        const std::size_t n2 = cfg.n2.value_or(300);
        const CsrMatrix c = sparse_random(rng, n1, n2, cfg.density.value_or(0.01));
        const Vector x_hat = rng_normal(rng, n1);
        const std::string shape = std::to_string(n1) + "x" + std::to_string(n2);
        if (cfg.problem == ProblemKind::Lasso) {
            return admm_problem(cfg, lasso_admm_problem(c, x_hat, cfg.beta.value_or(1.0), cfg.mu.value_or(10.0)),
                                "lasso " + shape);
        }
        return admm_problem(cfg, nnls_admm_problem(c, x_hat, cfg.mu.value_or(2.0)), "nnls " + shape);
    }
    case ProblemKind::Logistic: {
        const double beta = cfg.beta.value_or(1e-2);
        const double eta = cfg.eta.value_or(1.0);
        LogisticDataset data;
        std::string description;
        if (!cfg.libsvm_path.empty()) {
            LibsvmData raw = read_libsvm(cfg.libsvm_path, cfg.features);
            data = {std::move(raw.samples), std::move(raw.labels), beta, eta};
            description = "logistic " + cfg.libsvm_path.filename().string();
        } else {
            data = synthetic_logistic(rng, cfg.n1.value_or(200), cfg.n2.value_or(20), beta, eta);
            description = "logistic synthetic";
        }
        const std::size_t dim = data.samples.cols();
        FixedPointMap map = gd_map(std::move(data));
        return {std::move(map), initial_guess(cfg.x0.value_or(InitialGuess::Zeros), dim, cfg.seed), std::nullopt,
                std::nullopt, std::move(description)};
    }
    }
    throw ConfigurationError("unknown problem");
}

ExperimentResult run_solver(const ExperimentConfig& cfg, const BuiltProblem& problem)
{
    const StopRule stop = effective_stop(cfg);
    ExperimentResult out;
    try {
        SolveResult r;
        switch (cfg.solver) {
        case SolverKind::FixedPoint: r = fp_solve(problem.map, problem.x0, stop); break;
        case SolverKind::Anderson:
            r = aa_solve(problem.map, problem.x0, cfg.schedule.m, stop, cfg.schedule.rank_tol);
            break;
        case SolverKind::Alternating: r = aafp_solve(problem.map, problem.x0, cfg.schedule, stop); break;
        case SolverKind::Gmres: {
            if (!problem.linear) throw ConfigurationError("gmres requires a linear problem");
            GmresResult g = gmres_solve(problem.linear->matrix, problem.linear->rhs, problem.x0, stop);
            r.trace = to_trace(g);
            r.solution = std::move(g.solution);
            break;
        }
        }
        out.solution = std::move(r.solution);
        out.trace = std::move(r.trace);
    } catch (const DivergenceError& e) {
        out.trace = e.trace();
        out.trace.converged = false;
        out.diverged = true;
        out.message = e.what();
    } catch (const NonFiniteError& e) {
        out.diverged = true;
        out.message = e.what();
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    const BuiltProblem problem = build_problem(cfg);
    ExperimentResult result = run_solver(cfg, problem);
    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + cfg.output.string() + "'");
        out << trace_csv(result.trace, cfg.timing);
    }
    return result;
}

std::string trace_csv(const IterationTrace& trace, bool timing)
{
    std::string out = "iteration,step_kind,residual_norm,elapsed_seconds\n";
    for (std::size_t k = 0; k < trace.residual_norms.size(); ++k) {
        const std::string kind =
            k == 0 ? "start" : (k - 1 < trace.step_kinds.size() ? std::string(to_string(trace.step_kinds[k - 1])) : "");
        const double elapsed = timing && k < trace.elapsed_seconds.size() ? trace.elapsed_seconds[k] : 0.0;
        out += std::to_string(k) + ',' + kind + ',' + format_double("%.17g", trace.residual_norms[k]) + ',' +
               format_double("%.9f", elapsed) + '\n';
    }
    return out;
}

AlignmentReport check_alignment(const LinearSystem& system, std::span<const double> x0, std::size_t t,
                                const StopRule& stop)
{
    const CsrMatrix& a = system.matrix;
    const ScheduleConfig schedule{WindowSize::unbounded(), 1, t, kDefaultRankTol};
    const SolveResult aafp = aafp_solve(richardson_map(a, system.rhs), x0, schedule, stop);
    const GmresResult gmres = gmres_solve(a, system.rhs, x0, stop, true);

    AlignmentReport report;
    report.t = t;
    report.period = schedule.period();
    report.aafp_iterations = aafp.trace.iterations;
    report.gmres_iterations = gmres.iterations;
    report.aafp_converged = aafp.trace.converged;
    report.gmres_converged = gmres.converged;

    // Last GMRES index through which the residuals strictly decrease and stay above the floor.
    const auto& g = gmres.residual_norms;
    const double floor = kAlignmentFloor * g.front();
    std::size_t valid = 0;
    while (valid + 1 < g.size() && g[valid + 1] < g[valid] && g[valid + 1] > floor) ++valid;

    const std::size_t p = report.period;
    for (std::size_t j = 1; j * p <= aafp.trace.iterations; ++j) {
        const std::size_t k = j * p;
        if (k - 1 > valid) break;
        const Vector rg = subtract(system.rhs, mat_vec(a, gmres.iterates[k - 1]));
        const double predicted = norm2(subtract(rg, mat_vec(a, rg)));
        const double actual = aafp.trace.residual_norms[k];
        const double mismatch = predicted > 0.0 ? std::abs(actual - predicted) / predicted : std::abs(actual);
        report.points.push_back({j, k, actual, predicted, mismatch});
        report.max_mismatch = std::max(report.max_mismatch, mismatch);
    }
    return report;
}

AlignmentReport check_alignment(const ExperimentConfig& cfg, std::size_t t)
{
    const BuiltProblem problem = build_problem(cfg);
    if (!problem.linear) throw ConfigurationError("alignment requires a linear problem");
    return check_alignment(*problem.linear, problem.x0, t, effective_stop(cfg));
}

std::string format_alignment(const AlignmentReport& report)
{
    std::ostringstream out;
    out << "t=" << report.t << " p=" << report.period << " aafp_iterations=" << report.aafp_iterations
        << (report.aafp_converged ? "" : "(not converged)") << " gmres_iterations=" << report.gmres_iterations
        << (report.gmres_converged ? "" : "(not converged)") << '\n';
    out << "j,k,aafp_residual,gmres_predicted,relative_mismatch\n";
    for (const auto& pt : report.points) {
        out << pt.j << ',' << pt.k << ',' << format_double("%.6e", pt.aafp_residual) << ','
            << format_double("%.6e", pt.gmres_predicted) << ',' << format_double("%.3e", pt.relative_mismatch)
            << '\n';
    }
    out << "max_relative_mismatch=" << format_double("%.3e", report.max_mismatch) << " over " << report.points.size()
        << " points\n";
    return out.str();
}

SolverSpec SolverSpec::parse(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(trim(part));
    if (parts.empty()) throw ConfigurationError("empty solver spec");

    SolverSpec spec;
    spec.solver = parse_solver(parts[0]);
    const auto expect = [&](std::size_t count, const char* form) {
        if (parts.size() != count) throw ConfigurationError("solver spec '" + text + "' must look like " + form);
    };
    switch (spec.solver) {
    case SolverKind::FixedPoint: expect(1, "fp"); break;
    case SolverKind::Gmres: expect(1, "gmres"); break;
    case SolverKind::Anderson:
        expect(2, "aa:M");
        spec.schedule.m = parse_window(parts[1]);
        break;
    case SolverKind::Alternating:
        expect(4, "aafp:M:S:T");
        spec.schedule.m = parse_window(parts[1]);
        spec.schedule.s = parse_count("s", parts[2]);
        spec.schedule.t = parse_count("t", parts[3]);
        break;
    }
    spec.schedule.validate();
    return spec;
}

std::string SolverSpec::label() const
{
    const std::string m = schedule.m.is_unbounded() ? "inf" : std::to_string(schedule.m.columns());
    switch (solver) {
    case SolverKind::FixedPoint: return "FP";
    case SolverKind::Gmres: return "GMRES";
    case SolverKind::Anderson: return "AA(" + m + ")";
    case SolverKind::Alternating:
        return "aAA(" + m + ")[" + std::to_string(schedule.s) + "]-FP[" + std::to_string(schedule.t) + "]";
    }
    return "?";
}

std::vector<RaceEntry> run_race(const ExperimentConfig& base, const std::vector<SolverSpec>& solvers)
{
    std::vector<ExperimentConfig> configs;
    for (const auto& spec : solvers) {
        ExperimentConfig cfg = base;
        cfg.solver = spec.solver;
        cfg.schedule = spec.schedule;
        cfg.validate();
        configs.push_back(std::move(cfg));
    }
    const BuiltProblem problem = build_problem(base);

    std::vector<RaceEntry> entries(solvers.size());
    std::vector<std::exception_ptr> errors(solvers.size());
    std::vector<std::thread> workers;
    workers.reserve(solvers.size());
    for (std::size_t i = 0; i < solvers.size(); ++i) {
        workers.emplace_back([&, i] {
            try {
                entries[i] = {solvers[i], run_solver(configs[i], problem)};
                if (!base.output.empty()) {
                    std::filesystem::path path = base.output;
                    path.replace_filename(base.output.stem().string() + "_" + std::to_string(i) + ".csv");
                    std::ofstream out(path, std::ios::binary);
                    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
                    out << trace_csv(entries[i].result.trace, base.timing);
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return entries;
}

std::string format_race(const std::vector<RaceEntry>& entries)
{
    std::size_t width = 6;
    for (const auto& e : entries) width = std::max(width, e.spec.label().size());
    std::ostringstream out;
    const auto pad = [width](std::string s) {
        s.resize(width + 2, ' ');
        return s;
    };
    out << pad("solver") << "iterations  seconds     rel_residual\n";
    for (const auto& e : entries) {
        const auto& tr = e.result.trace;
        std::string its = std::to_string(tr.iterations);
        if (!tr.converged) its += e.result.diverged ? " (diverged)" : " (not converged)";
        its.resize(std::max<std::size_t>(its.size() + 2, 12), ' ');
        const double rel = tr.residual_norms.empty() || tr.residual_norms.front() == 0.0
                               ? 0.0
                               : tr.residual_norms.back() / tr.residual_norms.front();
        out << pad(e.spec.label()) << its << format_double("%-12.4f", tr.elapsed) << format_double("%.3e", rel)
            << '\n';
    }
    return out.str();
}

} // namespace aafp
