#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aafp/fixed_point.hpp"
#include "aafp/linalg.hpp"

namespace aafp {

struct GmresResult {
    Vector solution;
    /// ‖b − A x_k‖ for k = 0..iterations, as tracked by the Givens recurrence.
    std::vector<double> residual_norms;
    std::vector<double> elapsed_seconds;
    /// x_k for k = 0..iterations; filled only when iterates were requested.
    std::vector<Vector> iterates;
    std::size_t iterations = 0;
    bool converged = false;
    double elapsed = 0.0;
};

/// Full (unrestarted) GMRES: Arnoldi with modified Gram–Schmidt and Givens
/// rotations. A happy breakdown is reported as convergence. Throws
/// NonFiniteError if the recurrence produces NaN/Inf.
GmresResult gmres_solve(const CsrMatrix& a, std::span<const double> b, std::span<const double> x0,
                        const StopRule& stop, bool keep_iterates = false);

/// Adapts a GMRES result to the trace format the fixed-point drivers emit.
IterationTrace to_trace(const GmresResult& result);

} // namespace aafp
