#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "leapfrog/profiles.hpp"
#include "leapfrog/reduced_dynamics.hpp"
#include "leapfrog/vec2.hpp"

/// Vortex-ring fields on the meridian half-plane, the Delta_5 Poisson solver
/// and the transport velocity.
namespace leapfrog::fields {

/// Uniform grid on [0, r_max] x [z_min, z_max]; node (i, m) sits at
/// (i hr, z_min + m hz). The axis r = 0 is the first grid line.
struct AxiGrid {
    std::size_t nr = 0;
    std::size_t nz = 0;
    double hr = 0.0;
    double hz = 0.0;
    double z_min = 0.0;

    /// nr x nz nodes spanning [0, r_max] x [z_min, z_max].
    static AxiGrid span(double r_max, double z_min, double z_max, std::size_t nr, std::size_t nz);

    double r(std::size_t i) const { return static_cast<double>(i) * hr; }
    double z(std::size_t m) const { return z_min + static_cast<double>(m) * hz; }
    double r_max() const { return r(nr - 1); }
    double z_max() const { return z(nz - 1); }
    std::size_t size() const { return nr * nz; }
    std::size_t index(std::size_t i, std::size_t m) const { return i * nz + m; }
    /// hr, hz > 0 and nr, nz >= 8.
    void validate() const;
    bool operator==(const AxiGrid&) const = default;
};

enum class FieldRole { relative_vorticity, relative_stream, generic };

/// Row-major nr x nz samples, values[i * nz + m].
struct ScalarField {
    AxiGrid grid;
    std::vector<double> values;
    FieldRole role = FieldRole::generic;

    static ScalarField zeros(const AxiGrid& grid, FieldRole role);

    double& at(std::size_t i, std::size_t m) { return values[grid.index(i, m)]; }
    double at(std::size_t i, std::size_t m) const { return values[grid.index(i, m)]; }
    double max_abs() const;
    /// Size matches the grid and all values are finite.
    void validate() const;
};

/// Optional terms of the single-ring stream function. H and K are caller
/// supplied (x, P0) -> value; Gamma defaults to profiles::compute_Gamma(200).
struct RingFieldOptions {
    bool include_H = false;
    bool include_K = false;
    bool include_Gamma = true;
    std::function<double(Vec2, Vec2)> H;
    std::function<double(Vec2, Vec2)> K;
    std::shared_ptr<const profiles::RadialProfile> Gamma;
};

/// Shared copy of compute_Gamma(200), built on first use.
std::shared_ptr<const profiles::RadialProfile> default_Gamma();

/// -2 log|x - P0|^2 (1 - 3 (r - r0) / (2 r0)), valid for 0 < |x - P0| < r0/2.
double greens_near(Vec2 x, Vec2 P0);

/// Regularized ring stream function
/// (1/r0) [ log(1/(eps^2 + |x-P0|^2)^2) (1 - 3(r-r0)/(2r0) + H) + K + (r-r0)/(2r0) Gamma(|x-P0|/eps) ].
double stream_ring(Vec2 x, Vec2 P0, double eps, const RingFieldOptions& opts = {});

/// U((x - P)/eps) / (r_P eps^2).
double vorticity_leading(Vec2 x, Vec2 P, double eps);

/// Sum of vorticity_leading over the family, each cut off beyond 20 eps_j.
/// Throws ResolutionError if some eps_j < 2 max(hr, hz).
ScalarField superpose(const reduced::RingFamily& rings, const AxiGrid& grid);

/// \int r w dr dz (trapezoid in r, which vanishes on the axis).
double weighted_mass(const ScalarField& omega);

/// Discrete Delta_5 = r^-3 d_r(r^3 d_r) + d_zz in conservative form with
/// r^3-weighted cell volumes. At r = 0 it reduces to 8(psi_1 - psi_0)/hr^2
/// + d_zz, the ghost-reflected form of 4 d_rr + d_zz. Boundary rows are
/// filled from the nearest interior values.
ScalarField apply_delta5(const ScalarField& psi);

/// Direct solver for -Delta_5 psi = omega with the same discretization as
/// apply_delta5: sine transform in z, tridiagonal solve in r. Outer
/// boundaries carry the R^5 monopole m5 / (8 pi^2 s^3), s measured from the
/// r^3-weighted z-centroid of omega. Holds plans and work buffers; one solver
/// per thread.
class Delta5Solver {
public:
    explicit Delta5Solver(const AxiGrid& grid);
    ~Delta5Solver();
    Delta5Solver(const Delta5Solver&) = delete;
    Delta5Solver& operator=(const Delta5Solver&) = delete;

    /// Rejects omega whose magnitude on the three outermost node rings
    /// exceeds support_tol * max|omega| with DomainError.
    ScalarField solve(const ScalarField& omega, double support_tol = 1e-12);
    const AxiGrid& grid() const { return grid_; }

private:
    struct Impl;
    AxiGrid grid_;
    std::unique_ptr<Impl> impl_;
};

ScalarField solve_delta5(const ScalarField& omega, double support_tol = 1e-12);

/// Monopole far field m5 / (8 pi^2 s^3) at x with s from (0, z_c).
double monopole(Vec2 x, double m5, double z_c);

struct Velocity {
    ScalarField ur;
    ScalarField uz;
};

/// u_r = -(r/L) d_z psi, u_z = (2 (psi - alpha0 L) + r d_r psi)/L with
/// L = |log eps|; centered differences, one-sided on the outer edges,
/// u_r = 0 and u_z = 2 (psi - alpha0 L)/L on the axis.
Velocity velocity_field(const ScalarField& psi, double log_eps, double alpha0);

/// alpha = 1/r0 - (A0 - A)/(4 r0 log eps), A0 = 6 - log 8.
double alpha_speed(double r0, double eps, const profiles::ProfileConstants& consts);

/// Header: uint64 nr, uint64 nz, float64 hr, hz, z_min (little endian); body
/// row-major float64.
void write_binary(std::ostream& os, const ScalarField& f);
ScalarField read_binary(std::istream& is, FieldRole role = FieldRole::generic);
/// Columns r, z, value.
void write_csv(std::ostream& os, const ScalarField& f);

}  // namespace leapfrog::fields
