#include "aafp/gmres.hpp"

#include <chrono>
#include <cmath>

namespace aafp {

namespace {

// x0 + V y with y solving the leading k×k block of the rotated Hessenberg system.
Vector assemble_iterate(std::span<const double> x0, const std::vector<Vector>& basis,
                        const std::vector<std::vector<double>>& h, const std::vector<double>& g, std::size_t k)
{
    Vector y(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
        double s = g[i];
        for (std::size_t j = i + 1; j < k; ++j) s -= h[j][i] * y[j];
        y[i] = s / h[i][i];
    }
    Vector x(x0.begin(), x0.end());
    for (std::size_t j = 0; j < k; ++j) axpy(y[j], basis[j], x);
    return x;
}

} // namespace

GmresResult gmres_solve(const CsrMatrix& a, std::span<const double> b, std::span<const double> x0,
                        const StopRule& stop, bool keep_iterates)
{
    stop.validate();
    if (a.rows() != a.cols()) throw DimensionError("gmres_solve: matrix is not square");
    if (b.size() != a.rows() || x0.size() != a.rows()) throw DimensionError("gmres_solve: vector length mismatch");
    const auto start = std::chrono::steady_clock::now();

    GmresResult out;
    Vector r0 = subtract(b, mat_vec(a, x0));
    const double beta = norm2(r0);
    if (!std::isfinite(beta)) throw NonFiniteError("gmres_solve: non-finite initial residual");
    auto now = [start] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    out.residual_norms.push_back(beta);
    out.elapsed_seconds.push_back(now());
    if (keep_iterates) out.iterates.emplace_back(x0.begin(), x0.end());
    const double tol = stop.threshold(beta);

    auto finish = [&](Vector solution, bool converged) {
        out.solution = std::move(solution);
        out.converged = converged;
        out.iterations = out.residual_norms.size() - 1;
        out.elapsed = now();
        return out;
    };
    if (beta <= tol) return finish(Vector(x0.begin(), x0.end()), true);

    std::vector<Vector> basis{scaled(r0, 1.0 / beta)};
    std::vector<std::vector<double>> h; // h[j] is column j of the Hessenberg matrix
    std::vector<double> cs, sn;
    std::vector<double> g{beta};

    const std::size_t max_steps = stop.max_iters;
    for (std::size_t k = 0; k < max_steps; ++k) {
        Vector w = mat_vec(a, basis[k]);
        const double w_norm = norm2(w);
        std::vector<double> col(k + 2, 0.0);
        for (std::size_t i = 0; i <= k; ++i) {
            col[i] = dot(w, basis[i]);
            axpy(-col[i], basis[i], w);
        }
        col[k + 1] = norm2(w);
        if (!all_finite(col)) throw NonFiniteError("gmres_solve: non-finite Arnoldi coefficients");
        const double subdiagonal = col[k + 1];
        const bool breakdown = subdiagonal <= 1e-14 * w_norm;

        for (std::size_t i = 0; i < k; ++i) {
            const double t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        const double denom = std::hypot(col[k], col[k + 1]);
        const double c = denom == 0.0 ? 1.0 : col[k] / denom;
        const double s = denom == 0.0 ? 0.0 : col[k + 1] / denom;
        cs.push_back(c);
        sn.push_back(s);
        col[k] = c * col[k] + s * col[k + 1];
        col[k + 1] = 0.0;
        g.push_back(-s * g[k]);
        g[k] = c * g[k];
        h.push_back(std::move(col));

        const double res = breakdown ? 0.0 : std::abs(g[k + 1]);
        out.residual_norms.push_back(res);
        out.elapsed_seconds.push_back(now());
        const bool done = breakdown || res <= tol;
        if (keep_iterates || done || k + 1 == max_steps) {
            Vector xk = assemble_iterate(x0, basis, h, g, k + 1);
            if (keep_iterates) out.iterates.push_back(xk);
            if (done) return finish(std::move(xk), true);
            if (k + 1 == max_steps) return finish(std::move(xk), false);
        }
        basis.push_back(scaled(w, 1.0 / subdiagonal));
    }
    return finish(Vector(x0.begin(), x0.end()), false);
}

IterationTrace to_trace(const GmresResult& result)
{
    IterationTrace trace;
    trace.residual_norms = result.residual_norms;
    trace.step_kinds.assign(result.iterations, StepKind::Krylov);
    trace.elapsed_seconds = result.elapsed_seconds;
    trace.converged = result.converged;
    trace.iterations = result.iterations;
    trace.elapsed = result.elapsed;
    return trace;
}

} // namespace aafp
