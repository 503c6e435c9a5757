#include "leapfrog/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "leapfrog/errors.hpp"

namespace leapfrog::quadrature {

namespace {

constexpr int kMaxLevels = 12;
constexpr double kHalfPi = std::numbers::pi / 2.0;

// Trapezoid sum over t = offset + k*h, k in Z, for a transformed integrand g(t).
// Walks outward from zero in both directions until the terms are negligible.
template <typename G>
double trapezoid_sum(const G& g, double h, double offset, double t_limit) {
    double sum = 0.0;
    for (int dir : {+1, -1}) {
        int small_run = 0;
        for (int k = (dir > 0 ? 0 : 1);; ++k) {
            const double t = dir > 0 ? offset + k * h : offset - k * h;
            if (std::abs(t) > t_limit) break;
            const double term = g(t);
            if (!std::isfinite(term)) break;
            sum += term;
            small_run = std::abs(term) < 1e-300 ? small_run + 1 : 0;
            if (small_run > 3) break;
        }
    }
    return sum;
}

template <typename G>
Result refine(const G& g, double t_limit, double rel_tol, double abs_floor, const char* name) {
    double h = 1.0;
    double total = trapezoid_sum(g, h, 0.0, t_limit);
    double value = h * total;
    double previous = value;
    for (int level = 1; level <= kMaxLevels; ++level) {
        // Add the midpoints of the previous level.
        total += trapezoid_sum(g, h, 0.5 * h, t_limit) ;
        h *= 0.5;
        previous = value;
        value = h * total;
        if (level >= 3 && std::abs(value - previous) <= std::max(rel_tol * std::abs(value), abs_floor)) {
            return {value, previous, level};
        }
    }
    throw ConvergenceError(name, value, previous);
}

}  // namespace

Result half_line(const Integrand& f, double a, double rel_tol, double abs_floor) {
    // x = a + exp(pi/2 sinh t)
    auto g = [&](double t) {
        const double e = std::exp(kHalfPi * std::sinh(t));
        const double x = a + e;
        if (e > 1e60 || e < 1e-300) return 0.0;
        return f(x) * e * kHalfPi * std::cosh(t);
    };
    return refine(g, 6.0, rel_tol, abs_floor, "exp-sinh quadrature");
}

Result interval(const Integrand& f, double a, double b, double rel_tol, double abs_floor) {
    const double half = 0.5 * (b - a);
    // x = mid + half * tanh(pi/2 sinh t)
    auto g = [&](double t) {
        const double u = kHalfPi * std::sinh(t);
        const double th = std::tanh(u);
        const double ch = std::cosh(u);
        const double w = half * kHalfPi * std::cosh(t) / (ch * ch);
        if (w < 1e-300) return 0.0;
        // Distance to the nearer endpoint, computed without cancellation.
        const double gap = half / (std::exp(std::abs(u)) * ch);
        const double x = th >= 0 ? b - gap : a + gap;
        if (x <= a || x >= b) return 0.0;
        return f(x) * w;
    };
    return refine(g, 4.0, rel_tol, abs_floor, "tanh-sinh quadrature");
}

}  // namespace leapfrog::quadrature
