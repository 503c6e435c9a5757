#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "leapfrog/vec2.hpp"

/// Kaufmann-Scully vortex profile, the kernels of its linearization, the
/// quadrature constants entering the ring speed, and the Fourier-mode solver
/// for L_n p = g.
namespace leapfrog::profiles {

/// Radial function sampled on an ascending grid of rho = |y|.
struct RadialProfile {
    std::vector<double> rho;
    std::vector<double> values;
    int mode_n = 0;

    /// Samples `f` at rho_i = rho0 + i*h, i = 0..count-1.
    static RadialProfile sample(const std::function<double(double)>& f, double rho0, double h,
                                std::size_t count, int mode_n = 0);

    std::size_t size() const { return rho.size(); }
    /// Grid spacing; throws InvalidInput unless the grid is uniform.
    double uniform_spacing() const;
    /// Piecewise-linear interpolation; zero outside [rho.front(), rho.back()].
    double at(double r) const;
    /// Checks the ordering/finiteness invariants.
    void validate() const;
};

struct ProfileConstants {
    double I0 = 0.0;     ///< \int U y1 d1Gamma0 dy
    double I1 = 0.0;     ///< \int U y1 d1Gamma0 Gamma0 dy
    double A = 0.0;      ///< -I1/I0
    double A_bar = 0.0;  ///< -6 - I1/I0
};

/// U(y) = 8/(1+|y|^2)^2
double eval_U(Vec2 y);
double U_radial(double rho);

/// Gamma0 = log U = log 8 - 2 log(1+|y|^2), solves -Delta Gamma0 = U.
double eval_Gamma0(Vec2 y);
double Gamma0_radial(double rho);

/// Bounded kernel elements of Delta + U: l = 1, 2 give d_{y_l} Gamma0, l = 0
/// gives 2 + y . grad Gamma0.
double kernel_Z(int l, Vec2 y);

/// Homogeneous solution of L_n with zeta_n ~ rho^|n| at the origin,
/// zeta_n = rho^m ((m+1) + (m-1) rho^2) / ((m+1)(1+rho^2)), m = |n|.
double zeta(int n, double rho);

/// L_n[p] = p'' + p'/rho - n^2 p/rho^2 + 8p/(1+rho^2)^2 on a uniform grid of
/// at least five points. Five-point stencils throughout (centered inside,
/// shifted near the ends).
RadialProfile mode_operator_apply(int n, const RadialProfile& p);

/// Solves L_n[p] = g on (0, R_out] with p(R_out) = 0 by variation of
/// parameters around zeta_n. For |n| = 1 the datum must satisfy
/// \int g zeta_1 rho drho = 0 to 1e-8 of its L1 mass; the small residual
/// component along zeta_1 is projected out before solving.
RadialProfile mode_solve(int n, const RadialProfile& g, double R_out);

/// I0, I1 by exp-sinh quadrature in rho (angular factor pi done exactly).
ProfileConstants compute_constants(double quadrature_tol);

/// Mode-1 datum of the corrector equation for Gamma with the constant `shift`
/// in place of A: g(rho) = -rho U(rho) (Gamma0(rho) + shift) / 2.
double corrector_datum(double rho, double shift);

/// Solves L_1[rho Gamma / 2] = corrector_datum(., shift) on [0, R_out] and
/// returns Gamma sampled with spacing h from rho = 0. Throws
/// OrthogonalityError when the half-line defect exceeds 1e-6 of the mass.
RadialProfile solve_corrector(double shift, double R_out, double h);

/// Gamma with shift = A (orthogonal by construction). R_out >= 100.
RadialProfile compute_Gamma(double R_out, double h = 5e-3);

/// Two-column CSV "rho,value".
void write_csv(std::ostream& os, const RadialProfile& p);

}  // namespace leapfrog::profiles
