#include "aafp/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace aafp {

void SpectralInterval::validate() const
{
    if (!(a < b)) throw std::domain_error("spectral interval needs a < b");
    const bool below_one = a > 0.0 && b < 1.0;
    const bool above_one = a > 1.0;
    if (!below_one && !above_one) throw std::domain_error("spectral interval must not contain 0 or 1");
}

double chebyshev_T(std::size_t k, double x)
{
    if (k == 0) return 1.0;
    if (k == 1) return x;
    if (std::abs(x) <= 1.0) {
        double prev = 1.0;
        double cur = x;
        for (std::size_t j = 2; j <= k; ++j) {
            const double next = 2.0 * x * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    // T_k(-x) = (-1)^k T_k(x)
    const double ax = std::abs(x);
    const double root = ax + std::sqrt(ax * ax - 1.0);
    const double kd = static_cast<double>(k);
    const double value = 0.5 * (std::pow(root, kd) + std::pow(root, -kd));
    return (x < 0.0 && k % 2 == 1) ? -value : value;
}

double bound_C(const SpectralInterval& iv, std::size_t m)
{
    iv.validate();
    const double arg = (2.0 * iv.a * iv.b - iv.a - iv.b) / (iv.b - iv.a);
    return 1.0 / std::abs(chebyshev_T(m, arg));
}

namespace {

double contraction_factor(const SpectralInterval& iv)
{
    const double ratio = iv.contractive() ? iv.b * (1.0 - iv.a) / (iv.a * (1.0 - iv.b))
                                          : iv.a * (1.0 - iv.b) / (iv.b * (1.0 - iv.a));
    const double root = std::sqrt(ratio);
    return (root - 1.0) / (root + 1.0);
}

} // namespace

double bound_eps(const SpectralInterval& iv, std::size_t k)
{
    iv.validate();
    return 2.0 * std::pow(contraction_factor(iv), static_cast<double>(k));
}

SufficientCondition sufficient_condition(const SpectralInterval& iv, std::size_t m, std::size_t t, double kappa)
{
    iv.validate();
    if (!(iv.a > 1.0)) throw std::domain_error("sufficient_condition requires a > 1");
    if (!(kappa >= 1.0)) throw std::domain_error("sufficient_condition requires kappa >= 1");
    const double value = 2.0 * kappa * std::pow(contraction_factor(iv), static_cast<double>(m)) *
                         std::pow(iv.b, static_cast<double>(t + 1));
    return {value, value < 1.0};
}

double round_half_away(double value, int digits)
{
    const double scale = std::pow(10.0, digits);
    return std::round(value * scale) / scale;
}

std::string Table1Cell::render() const
{
    auto fmt = [](double v) {
        if (v > 1.0) return std::string("-");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", round_half_away(v, 4));
        return std::string(buf);
    };
    if (c_value > 1.0) return "-";
    return fmt(c_value) + "(" + fmt(eps_value) + ")";
}

std::vector<Table1Cell> table1()
{
    std::vector<Table1Cell> cells;
    for (std::size_t m : kTable1Windows) {
        for (const auto& iv : kTable1Intervals) {
            const double growth = std::pow(iv.b, static_cast<double>(m + 1));
            cells.push_back({m, iv, bound_C(iv, m) * growth, bound_eps(iv, m) * growth});
        }
    }
    return cells;
}

namespace {

std::string interval_label(const SpectralInterval& iv)
{
    std::ostringstream out;
    out << '(' << iv.a << ", " << iv.b << ')';
    return out.str();
}

} // namespace

std::string format_table1_text(const std::vector<Table1Cell>& cells)
{
    constexpr int kWidth = 17;
    std::ostringstream out;
    out << std::left << std::setw(4) << "m";
    for (const auto& iv : kTable1Intervals) out << std::setw(kWidth) << interval_label(iv);
    out << '\n';
    std::size_t current = 0;
    bool first = true;
    for (const auto& cell : cells) {
        if (first || cell.m != current) {
            if (!first) out << '\n';
            out << std::setw(4) << cell.m;
            current = cell.m;
            first = false;
        }
        out << std::setw(kWidth) << cell.render();
    }
    out << '\n';
    return out.str();
}

std::string format_table1_csv(const std::vector<Table1Cell>& cells)
{
    std::ostringstream out;
    out << "m,a,b,c_value,eps_value,cell\n";
    out << std::setprecision(17);
    for (const auto& cell : cells) {
        out << cell.m << ',' << cell.interval.a << ',' << cell.interval.b << ',' << cell.c_value << ','
            << cell.eps_value << ',' << cell.render() << '\n';
    }
    return out.str();
}

} // namespace aafp
