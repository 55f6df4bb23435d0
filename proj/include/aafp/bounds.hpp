#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace aafp {

/// Interval [a, b] holding the spectrum of the iteration matrix. It must not
/// contain 0 or 1: either 0 < a < b < 1, or 1 < a < b.
struct SpectralInterval {
    double a;
    double b;

    /// Throws std::domain_error when the interval is empty or touches 0 or 1.
    void validate() const;
    bool contractive() const noexcept { return b < 1.0; }
};

/// Chebyshev polynomial of the first kind. The three-term recurrence is used
/// on [-1, 1] and the closed form outside it.
double chebyshev_T(std::size_t k, double x);

/// C(a, b, m) = 1 / |T_m((2ab − a − b)/(b − a))|, the one-step Anderson gain.
double bound_C(const SpectralInterval& iv, std::size_t m);

/// Closed-form upper estimate of C(a, b, k).
double bound_eps(const SpectralInterval& iv, std::size_t k);

struct SufficientCondition {
    double value;
    bool holds; // value < 1
};

/// 2κ((√ρ − 1)/(√ρ + 1))^m b^{t+1} with ρ = a(1 − b)/(b(1 − a)); when it is
/// below one the period-boundary residuals of aAA(m)[s]–FP[t] converge even
/// though the plain iteration diverges. Requires a > 1 and kappa ≥ 1.
SufficientCondition sufficient_condition(const SpectralInterval& iv, std::size_t m, std::size_t t, double kappa);

/// One cell of the Chebyshev-estimate table: C·b^{m+1} and ε·b^{m+1}.
struct Table1Cell {
    std::size_t m;
    SpectralInterval interval;
    double c_value;
    double eps_value;

    /// "0.5134(0.6005)", or "-" when the C value exceeds one. A bracketed
    /// value that alone exceeds one prints as "(-)".
    std::string render() const;
};

inline constexpr std::size_t kTable1Windows[] = {2, 4, 10, 15};
inline constexpr SpectralInterval kTable1Intervals[] = {{0.3, 0.9}, {1.5, 3.0}, {2.0, 5.0}, {10.0, 30.0}, {20.0, 50.0}};

/// All 20 cells, row-major over (m, interval).
std::vector<Table1Cell> table1();

/// Rounds to `digits` decimals, halves away from zero.
double round_half_away(double value, int digits);

std::string format_table1_text(const std::vector<Table1Cell>& cells);
std::string format_table1_csv(const std::vector<Table1Cell>& cells);

} // namespace aafp
