#pragma once

#include <functional>

namespace leapfrog::quadrature {

struct Result {
    double value = 0.0;
    double previous = 0.0;  ///< iterate at the previous (coarser) level
    int levels = 0;
};

using Integrand = std::function<double(double)>;

/// Double-exponential (exp-sinh) rule for \int_a^\infty f. Step halving stops
/// once two successive iterates agree to `rel_tol` (with `abs_floor` guarding
/// integrals that vanish). Throws ConvergenceError with the last two iterates.
Result half_line(const Integrand& f, double a, double rel_tol, double abs_floor = 1e-300);

/// Double-exponential (tanh-sinh) rule for \int_a^b f; tolerates integrable
/// endpoint singularities.
Result interval(const Integrand& f, double a, double b, double rel_tol, double abs_floor = 1e-300);

}  // namespace leapfrog::quadrature
