#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>

#include "aafp/fixed_point.hpp"
#include "aafp/linalg.hpp"

namespace aafp {

// ------------------------------------------------------------------ random

/// Seeded generator with a fixed, platform-independent stream: std::mt19937_64
/// (its output sequence is fixed by the C++ standard) feeding 53-bit uniforms
/// and a Box–Muller normal transform. std::normal_distribution is avoided
/// because its algorithm differs between standard libraries.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }
    /// Uniform on [0, 1).
    double uniform();
    double normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

Vector rng_normal(SeededRng& rng, std::size_t n);

/// Each entry is kept with probability `density` (row-major draw order) and
/// gets a standard normal value. Requires 0 < density ≤ 1.
CsrMatrix sparse_random(SeededRng& rng, std::size_t rows, std::size_t cols, double density);

// ---------------------------------------------------------- model problems

struct PoissonProblem {
    CsrMatrix matrix;
    Vector rhs;
    /// u = cos(πx₁/2)cos(πx₂/2) + 1 sampled at the interior nodes.
    Vector exact;
    std::size_t interior_per_side;
};

/// −Δu = (π²/2)cos(πx₁/2)cos(πx₂/2) on [−1, 1]² with u = 1 on the boundary,
/// 5-point finite differences on `interior_per_side`² interior nodes
/// (row-major, x₁ fastest). The matrix carries the unscaled stencil
/// (4 on the diagonal, −1 off it); h² is folded into the right-hand side.
PoissonProblem build_poisson_fd(std::size_t interior_per_side);

struct LinearSystem {
    CsrMatrix matrix;
    Vector rhs;
};

/// Cyclic shift A e_j = e_{j+1}, A e_n = e_1, with b = e₁.
LinearSystem build_permutation_system(std::size_t n);

// --------------------------------------------------------------- proximal

/// sign(v)·max(|v| − kappa, 0), componentwise.
Vector soft_threshold(std::span<const double> v, double kappa);
/// max(v, 0), componentwise.
Vector project_nonneg(std::span<const double> v);

// ------------------------------------------------------------------- ADMM

/// (y, λ̄) with λ̄ the multiplier scaled by 1/μ. As a fixed-point vector it is
/// the concatenation [y, λ̄].
struct AdmmState {
    Vector y;
    Vector lambda_bar;

    Vector pack() const;
    static AdmmState unpack(std::span<const double> packed);
};

/// ADMM for min f₁(x) + f₂(y) subject to Kx − y = 0, in scaled form:
///   x⁺ = argmin f₁(x) + μ/2‖Kx − y + λ̄‖²
///   y⁺ = prox_{f₂/μ}(Kx⁺ + λ̄)
///   λ̄⁺ = λ̄ + Kx⁺ − y⁺
struct AdmmProblem {
    std::size_t primal_dim = 0;
    std::size_t split_dim = 0;
    double mu = 1.0;
    std::function<Vector(std::span<const double> y, std::span<const double> lambda_bar)> x_update;
    std::function<Vector(std::span<const double> x)> apply_k;
    std::function<Vector(std::span<const double> v)> apply_k_transpose;
    std::function<Vector(std::span<const double> v)> y_prox;
};

struct AdmmStep {
    Vector x;
    AdmmState next;
};

AdmmStep admm_step(const AdmmProblem& problem, const AdmmState& state);

/// ADMM as the map [y, λ̄] ↦ [y⁺, λ̄⁺].
FixedPointMap admm_map(AdmmProblem problem);

struct AdmmFeasibility {
    double primal; // ‖Kx⁺ − y⁺‖
    double dual;   // ‖μKᵀ(y⁺ − y)‖
};

/// Feasibility of the ADMM step taken from `state`.
AdmmFeasibility admm_feasibility(const AdmmProblem& problem, const AdmmState& state);

/// (n−1)×n forward difference matrix with rows [..., −1, 1, ...].
CsrMatrix difference_matrix(std::size_t n);

/// min ½‖x̂ − x‖² + β‖Gx‖₁ with the splitting y = Gx.
AdmmProblem tv_admm_problem(Vector x_hat, double beta, double mu);
FixedPointMap tv_admm_map(Vector x_hat, double beta, double mu);

/// min ½‖Cx − x̂‖² + β‖x‖₁ with the splitting y = x.
AdmmProblem lasso_admm_problem(const CsrMatrix& c, std::span<const double> x_hat, double beta, double mu);
FixedPointMap lasso_admm_map(const CsrMatrix& c, std::span<const double> x_hat, double beta, double mu);

/// min ‖Cx − x̂‖² subject to x ≥ 0, with the splitting y = x.
AdmmProblem nnls_admm_problem(const CsrMatrix& c, std::span<const double> x_hat, double mu);
FixedPointMap nnls_admm_map(const CsrMatrix& c, std::span<const double> x_hat, double mu);

} // namespace aafp
