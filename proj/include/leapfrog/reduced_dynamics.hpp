#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "leapfrog/vec2.hpp"

/// Leapfrogging ODE for the scaled ring offsets q_j, its Hamiltonian,
/// integrators and the map to physical ring parameters.
///
/// Vectors are (radial, axial). v^perp = (-v2, v1).
namespace leapfrog::reduced {

struct ScaledConfig {
    std::vector<Vec2> q;
    double r0 = 1.0;

    std::size_t k() const { return q.size(); }
    /// Smallest pairwise distance; +inf for a single ring.
    double min_separation() const;
    /// k >= 1, r0 > 0, finite entries, pairwise distinct.
    void validate() const;
};

struct RingFamily {
    std::vector<Vec2> centers;  ///< P_j = (r_j, z_j)
    std::vector<double> core_scales;
    double epsilon = 0.0;
    double r0 = 1.0;

    /// r_j > 0 and r_j eps_j^2 = r0 eps^2 to 1e-12.
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ScaledConfig> states;
    std::vector<double> hamiltonian;
    std::vector<double> min_separation;
};

enum class Method { rk4, symplectic_euler };

/// Separation below which rhs and hamiltonian refuse to evaluate.
inline constexpr double kSingularSeparation = 1e-9;
/// Separation below which integrate halts.
inline constexpr double kCollisionThreshold = 1e-6;

/// dq_j/dtau = -4 sum_{l != j} (q_j - q_l)^perp / |q_j - q_l|^2 + 2 (q_j^1 / r0^2) e2
std::vector<Vec2> rhs(const ScaledConfig& cfg);

/// H = 2 sum_{i != j} log|q_i - q_j| - sum_j (q_j^1)^2 / r0^2, ordered pairs.
double hamiltonian(const ScaledConfig& cfg);

/// dH/dq_j. rhs = -(grad H)^perp, so (q^1, q^2) is a canonical pair.
std::vector<Vec2> hamiltonian_gradient(const ScaledConfig& cfg);

/// Samples at tau = 0, dt, 2dt, ... up to T. Throws CollisionError when the
/// separation drops below kCollisionThreshold, NonFiniteError on blow-up.
/// symplectic_euler is the implicit variant (H is not separable).
Trajectory integrate(const ScaledConfig& cfg0, double dt, double T, Method method);

/// Reduced field for q1 = -q2 = q: -2 q^perp/|q|^2 + 2 (q^1/r0^2) e2.
Vec2 symmetric_pair_rhs(Vec2 q, double r0);
/// H(q, -q) = 4 log|2q| - 2 (q^1)^2 / r0^2.
double symmetric_pair_hamiltonian(Vec2 q, double r0);

/// Physical main term of the center dynamics,
/// Theta_j = -4 sum (P_j - P_l)^perp/|P_j - P_l|^2 + 2|log eps| (r0 - r_j)/(r0 r_j) e2.
std::vector<Vec2> theta0(const RingFamily& rings, double log_eps);

/// P_j = (r0, 0) + q_j / sqrt|log eps|, eps_j = eps sqrt(r0 / r_j).
RingFamily scaled_to_physical(const ScaledConfig& cfg, double epsilon);
/// Inverse of the center map: q_j = sqrt|log eps| (P_j - (r0, 0)).
ScaledConfig physical_to_scaled(const std::vector<Vec2>& centers, double r0, double epsilon);

/// Checks that the perp convention reproduces Helmholtz's description: of two
/// coaxial rings of equal radius, the rear one contracts and the front one
/// widens. Throws Error otherwise.
void check_perp_convention();

struct PoincareReturn {
    double tau = 0.0;       ///< return time
    double distance = 0.0;  ///< max_j |q_j(tau) - q_j(0)|
};

/// First return of ring 0 to the section through q_0(0) transverse to its
/// initial velocity, crossed in the initial direction. Crossing states are
/// located by cubic Hermite interpolation using rhs. Empty if none.
std::optional<PoincareReturn> poincare_return(const Trajectory& traj);

struct LevelGrid {
    std::vector<double> q1;  ///< nodes along the first axis
    std::vector<double> q2;
    std::vector<double> H;   ///< row-major, H[i * q2.size() + j], NaN at the origin
};

/// H(q, -q) on [-half_width, half_width]^2 with n x n nodes.
LevelGrid sample_level_curves(double r0, double half_width, std::size_t n);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_level_csv(std::ostream& os, const LevelGrid& grid);

}  // namespace leapfrog::reduced
