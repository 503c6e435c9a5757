#pragma once

#include <cstddef>

namespace leapfrog::fields::detail {

struct RadialCoeffs {
    double minus;
    double plus;
};

// Face weights of r^-3 d_r(r^3 d_r) at node i: a_pm = (r_i pm h/2)^3 / V_i with
// V_i = ((r_i + h/2)^4 - max(r_i - h/2, 0)^4) / (4h). Multiply differences by 1/h^2.
inline RadialCoeffs radial_coeffs(std::size_t i, double h) {
    if (i == 0) return {0.0, 8.0};
    const double r = static_cast<double>(i) * h;
    const double lo = r - 0.5 * h;
    const double hi = r + 0.5 * h;
    const double v = r * r * r + 0.25 * r * h * h;
    return {lo * lo * lo / v, hi * hi * hi / v};
}

// r^3-weighted cell measure (times h), used for moments consistent with the operator.
inline double cell_volume(std::size_t i, double h) {
    const double r = static_cast<double>(i) * h;
    if (i == 0) return h * h * h / 64.0;
    return r * r * r + 0.25 * r * h * h;
}

}  // namespace leapfrog::fields::detail
