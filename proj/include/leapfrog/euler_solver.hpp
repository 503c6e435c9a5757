#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "leapfrog/diagnostics.hpp"
#include "leapfrog/fields.hpp"
#include "leapfrog/reduced_dynamics.hpp"

/// Semi-Lagrangian integration of the scaled axisymmetric Euler equation
///   |log eps| r d_tau W + grad^perp(r^2 (Psi - alpha0 |log eps|)) . grad W = 0,
///   -Delta_5 Psi = W,
/// in the frame moving with speed 2 alpha0 |log eps|.
namespace leapfrog::euler {

enum class Interp { bilinear, monotone_bicubic };

/// frozen: velocity taken at the start of the step (first order in dt).
/// predictor_corrector: a frozen step predicts W*, then the step is redone
/// with the mean of the start velocity and the velocity of W* (second order,
/// two transports and two Poisson solves per step).
enum class VelocityUpdate { frozen, predictor_corrector };

struct SolverConfig {
    double epsilon = 0.05;
    double r0 = 1.0;
    std::optional<double> alpha0;  ///< frame constant; 1/r0 when unset
    double dt = 1e-3;
    double T = 1.0;
    fields::AxiGrid grid;
    Interp interp = Interp::monotone_bicubic;
    int substeps = 1;
    VelocityUpdate velocity_update = VelocityUpdate::frozen;
    /// Vorticity above 1e-12 max|W0| must stay this many cells from the outer edges.
    std::size_t boundary_cells = 10;
    /// Window radius for centroid tracking; <= 0 picks diagnostics::default_window_radius.
    double window_radius = 0.0;

    double frame_alpha() const { return alpha0.value_or(1.0 / r0); }
    void validate() const;
};

struct SolverState {
    double tau = 0.0;
    fields::ScalarField omega;
    fields::ScalarField psi;
    double mass0 = 0.0;
    double maxnorm0 = 0.0;
    /// Largest characteristic displacement per substep seen so far, in cells.
    double max_cfl = 0.0;
};

/// Owns the Poisson solver and work buffers for repeated steps on one grid.
class Stepper {
public:
    explicit Stepper(const SolverConfig& cfg);
    ~Stepper();
    Stepper(const Stepper&) = delete;
    Stepper& operator=(const Stepper&) = delete;

    /// omega = superpose(rings), psi = solve_delta5(omega); checks that every
    /// core is resolved (eps_j >= 2 max(hr, hz)).
    SolverState init(const reduced::RingFamily& rings);
    /// Advances by cfg.dt. Throws NonFiniteError on a non-finite velocity,
    /// CflError above 20 cells per substep, DomainError when vorticity
    /// reaches the boundary band. Displacements above 5 cells per substep are
    /// reported through the warning hook.
    void step(SolverState& state);

    /// Called with the displacement (cells per substep) when it exceeds 5.
    std::function<void(double)> on_cfl_warning;
    const SolverConfig& config() const { return cfg_; }

private:
    struct Impl;
    SolverConfig cfg_;
    std::unique_ptr<Impl> impl_;
};

/// Largest displacement of a characteristic substep, in cells. Throws
/// NonFiniteError on a non-finite velocity.
double max_displacement(const fields::Velocity& u, const SolverConfig& cfg);

/// One transport step of omega through the frozen velocity u: RK2 back-trace
/// of every node over cfg.dt in cfg.substeps substeps, then interpolation.
/// Feet outside the box read zero; r < 0 reflects across the axis.
fields::ScalarField advect(const fields::ScalarField& omega, const fields::Velocity& u, const SolverConfig& cfg);

SolverState init(const reduced::RingFamily& rings, const SolverConfig& cfg);
SolverState step(const SolverState& state, const SolverConfig& cfg);

struct RunResult {
    diagnostics::CenterSeries centers;
    std::vector<double> tau;
    std::vector<double> mass;     ///< \int r W dr dz per step
    std::vector<double> maxnorm;  ///< max |W| per step
    std::vector<std::size_t> snapshot_steps;
    double max_cfl = 0.0;
};

using SnapshotSink = std::function<void(std::size_t step, const SolverState& state)>;

/// Steps to cfg.T, recording conserved quantities and centroids at every
/// step (including step 0) and passing the state to `sink` every
/// `snapshot_every` steps (0 disables snapshots).
RunResult run(const reduced::RingFamily& rings, const SolverConfig& cfg, std::size_t snapshot_every = 0,
              const SnapshotSink& sink = {});

}  // namespace leapfrog::euler
