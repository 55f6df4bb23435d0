#include "aafp/problems.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace aafp {

// ------------------------------------------------------------------ random

double SeededRng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Vector rng_normal(SeededRng& rng, std::size_t n)
{
    Vector out(n);
    for (double& v : out) v = rng.normal();
    return out;
}

CsrMatrix sparse_random(SeededRng& rng, std::size_t rows, std::size_t cols, double density)
{
    if (!(density > 0.0 && density <= 1.0)) throw std::invalid_argument("sparse_random: density must be in (0, 1]");
    std::vector<Triplet> entries;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (rng.uniform() < density) entries.push_back({i, j, rng.normal()});
    return CsrMatrix::from_triplets(rows, cols, std::move(entries));
}

// ---------------------------------------------------------- model problems

PoissonProblem build_poisson_fd(std::size_t interior_per_side)
{
    const std::size_t n = interior_per_side;
    if (n < 3) throw std::invalid_argument("build_poisson_fd: need at least 3 interior points per side");
    const double h = 2.0 / static_cast<double>(n + 1);
    const double half_pi = 0.5 * std::numbers::pi;
    const double boundary = 1.0;

    std::vector<Triplet> entries;
    entries.reserve(5 * n * n);
    Vector rhs(n * n);
    Vector exact(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x2 = -1.0 + h * static_cast<double>(j + 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double x1 = -1.0 + h * static_cast<double>(i + 1);
            const std::size_t row = j * n + i;
            const double bump = std::cos(half_pi * x1) * std::cos(half_pi * x2);
            rhs[row] = h * h * 0.5 * std::numbers::pi * std::numbers::pi * bump;
            exact[row] = bump + 1.0;

            entries.push_back({row, row, 4.0});
            auto couple = [&](bool inside, std::size_t other) {
                if (inside) entries.push_back({row, other, -1.0});
                else rhs[row] += boundary;
            };
            couple(i > 0, row - 1);
            couple(i + 1 < n, row + 1);
            couple(j > 0, row - n);
            couple(j + 1 < n, row + n);
        }
    }
    return {CsrMatrix::from_triplets(n * n, n * n, std::move(entries)), std::move(rhs), std::move(exact), n};
}

LinearSystem build_permutation_system(std::size_t n)
{
    if (n < 2) throw std::invalid_argument("build_permutation_system: n must be >= 2");
    std::vector<Triplet> entries;
    entries.push_back({0, n - 1, 1.0});
    for (std::size_t i = 1; i < n; ++i) entries.push_back({i, i - 1, 1.0});
    Vector b(n, 0.0);
    b[0] = 1.0;
    return {CsrMatrix::from_triplets(n, n, std::move(entries)), std::move(b)};
}

// --------------------------------------------------------------- proximal

Vector soft_threshold(std::span<const double> v, double kappa)
{
    if (!(kappa >= 0.0)) throw std::invalid_argument("soft_threshold: kappa must be >= 0");
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double shrunk = std::max(std::abs(v[i]) - kappa, 0.0);
        out[i] = v[i] < 0.0 ? -shrunk : shrunk;
    }
    return out;
}

Vector project_nonneg(std::span<const double> v)
{
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], 0.0);
    return out;
}

// ------------------------------------------------------------------- ADMM

Vector AdmmState::pack() const
{
    Vector out;
    out.reserve(y.size() + lambda_bar.size());
    out.insert(out.end(), y.begin(), y.end());
    out.insert(out.end(), lambda_bar.begin(), lambda_bar.end());
    return out;
}

AdmmState AdmmState::unpack(std::span<const double> packed)
{
    if (packed.size() % 2 != 0) throw DimensionError("AdmmState::unpack: odd length");
    const std::size_t half = packed.size() / 2;
    return {Vector(packed.begin(), packed.begin() + static_cast<std::ptrdiff_t>(half)),
            Vector(packed.begin() + static_cast<std::ptrdiff_t>(half), packed.end())};
}

AdmmStep admm_step(const AdmmProblem& problem, const AdmmState& state)
{
    if (state.y.size() != problem.split_dim || state.lambda_bar.size() != problem.split_dim) {
        throw DimensionError("admm_step: state has the wrong dimension");
    }
    AdmmStep out;
    out.x = problem.x_update(state.y, state.lambda_bar);
    const Vector kx = problem.apply_k(out.x);
    out.next.y = problem.y_prox(add(kx, state.lambda_bar));
    out.next.lambda_bar = state.lambda_bar;
    for (std::size_t i = 0; i < kx.size(); ++i) out.next.lambda_bar[i] += kx[i] - out.next.y[i];
    return out;
}

FixedPointMap admm_map(AdmmProblem problem)
{
    const std::size_t dim = 2 * problem.split_dim;
    return FixedPointMap(dim, [problem = std::move(problem)](std::span<const double> packed) {
        return admm_step(problem, AdmmState::unpack(packed)).next.pack();
    });
}

AdmmFeasibility admm_feasibility(const AdmmProblem& problem, const AdmmState& state)
{
    const auto step = admm_step(problem, state);
    const Vector primal = subtract(problem.apply_k(step.x), step.next.y);
    const Vector dual = scaled(problem.apply_k_transpose(subtract(step.next.y, state.y)), problem.mu);
    return {norm2(primal), norm2(dual)};
}

CsrMatrix difference_matrix(std::size_t n)
{
    if (n < 2) throw std::invalid_argument("difference_matrix: n must be >= 2");
    std::vector<Triplet> entries;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        entries.push_back({i, i, -1.0});
        entries.push_back({i, i + 1, 1.0});
    }
    return CsrMatrix::from_triplets(n - 1, n, std::move(entries));
}

namespace {

/// LDLᵀ factorization of a symmetric positive definite tridiagonal matrix.
class TridiagonalSolver {
public:
    TridiagonalSolver(Vector diagonal, Vector off_diagonal) : d_(std::move(diagonal)), l_(std::move(off_diagonal))
    {
        for (std::size_t i = 1; i < d_.size(); ++i) {
            const double e = l_[i - 1];
            l_[i - 1] = e / d_[i - 1];
            d_[i] -= l_[i - 1] * e;
            if (!(d_[i] > 0.0)) throw std::domain_error("tridiagonal matrix is not positive definite");
        }
    }

    Vector solve(std::span<const double> rhs) const
    {
        Vector x(rhs.begin(), rhs.end());
        for (std::size_t i = 1; i < x.size(); ++i) x[i] -= l_[i - 1] * x[i - 1];
        for (std::size_t i = 0; i < x.size(); ++i) x[i] /= d_[i];
        for (std::size_t i = x.size() - 1; i-- > 0;) x[i] -= l_[i] * x[i + 1];
        return x;
    }

private:
    Vector d_;
    Vector l_;
};

void check_admm_parameters(double mu)
{
    if (!(mu > 0.0)) throw std::invalid_argument("ADMM penalty mu must be positive");
}

} // namespace

AdmmProblem tv_admm_problem(Vector x_hat, double beta, double mu)
{
    check_admm_parameters(mu);
    if (!(beta >= 0.0)) throw std::invalid_argument("TV weight beta must be >= 0");
    const std::size_t n = x_hat.size();
    auto g = std::make_shared<const CsrMatrix>(difference_matrix(n));

    // I + μGᵀG is tridiagonal: diagonal 1 + μ·[1, 2, ..., 2, 1], off-diagonal −μ.
    Vector diag(n, 1.0 + 2.0 * mu);
    diag.front() = diag.back() = 1.0 + mu;
    auto solver = std::make_shared<const TridiagonalSolver>(std::move(diag), Vector(n - 1, -mu));
    auto data = std::make_shared<const Vector>(std::move(x_hat));

    AdmmProblem p;
    p.primal_dim = n;
    p.split_dim = n - 1;
    p.mu = mu;
    p.x_update = [g, solver, data, mu](std::span<const double> y, std::span<const double> lam) {
        Vector rhs = *data;
        axpy(mu, mat_transpose_vec(*g, subtract(y, lam)), rhs);
        return solver->solve(rhs);
    };
    p.apply_k = [g](std::span<const double> x) { return mat_vec(*g, x); };
    p.apply_k_transpose = [g](std::span<const double> v) { return mat_transpose_vec(*g, v); };
    p.y_prox = [kappa = beta / mu](std::span<const double> v) { return soft_threshold(v, kappa); };
    return p;
}

FixedPointMap tv_admm_map(Vector x_hat, double beta, double mu)
{
    return admm_map(tv_admm_problem(std::move(x_hat), beta, mu));
}

namespace {

/// Splitting y = x with the x-update (weight·CᵀC + μI)x = weight·Cᵀx̂ + μ(y − λ̄).
AdmmProblem identity_split_problem(const CsrMatrix& c, std::span<const double> x_hat, double weight, double mu,
                                   std::function<Vector(std::span<const double>)> prox)
{
    check_admm_parameters(mu);
    if (x_hat.size() != c.rows()) throw DimensionError("ADMM data vector must have C.rows entries");
    const std::size_t n = c.cols();
    DenseMatrix normal = gram(c);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) normal(i, j) *= weight;
        normal(i, i) += mu;
    }
    auto factor = std::make_shared<const Cholesky>(normal);
    auto ct_data = std::make_shared<const Vector>(scaled(mat_transpose_vec(c, x_hat), weight));

    AdmmProblem p;
    p.primal_dim = n;
    p.split_dim = n;
    p.mu = mu;
    p.x_update = [factor, ct_data, mu](std::span<const double> y, std::span<const double> lam) {
        Vector rhs = *ct_data;
        axpy(mu, subtract(y, lam), rhs);
        return factor->solve(rhs);
    };
    p.apply_k = [](std::span<const double> x) { return Vector(x.begin(), x.end()); };
    p.apply_k_transpose = [](std::span<const double> v) { return Vector(v.begin(), v.end()); };
    p.y_prox = std::move(prox);
    return p;
}

} // namespace

AdmmProblem lasso_admm_problem(const CsrMatrix& c, std::span<const double> x_hat, double beta, double mu)
{
    if (!(beta >= 0.0)) throw std::invalid_argument("lasso weight beta must be >= 0");
    check_admm_parameters(mu);
    return identity_split_problem(c, x_hat, 1.0, mu,
                                  [kappa = beta / mu](std::span<const double> v) { return soft_threshold(v, kappa); });
}

FixedPointMap lasso_admm_map(const CsrMatrix& c, std::span<const double> x_hat, double beta, double mu)
{
    return admm_map(lasso_admm_problem(c, x_hat, beta, mu));
}

AdmmProblem nnls_admm_problem(const CsrMatrix& c, std::span<const double> x_hat, double mu)
{
    // The objective ‖Cx − x̂‖² has no ½, hence the factor 2 on the normal equations.
    return identity_split_problem(c, x_hat, 2.0, mu, [](std::span<const double> v) { return project_nonneg(v); });
}

FixedPointMap nnls_admm_map(const CsrMatrix& c, std::span<const double> x_hat, double mu)
{
    return admm_map(nnls_admm_problem(c, x_hat, mu));
}

} // namespace aafp
