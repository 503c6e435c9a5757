#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "json.hpp"
#include "leapfrog/fields.hpp"
#include "leapfrog/reduced_dynamics.hpp"
#include "leapfrog/vec2.hpp"

/// Ring tracking on PDE fields and comparison with the reduced dynamics.
namespace leapfrog::diagnostics {

struct CenterSeries {
    std::vector<double> times;               ///< tau
    std::vector<std::vector<Vec2>> centers;  ///< per instant, one point per ring
    double window_radius = 0.0;  ///< base radius; shrunk per instant by tracking_window
    /// First tau at which the shrunk window fell below the largest core
    /// scale. Tracking stops there, so the series ends at the previous step.
    std::optional<double> merged_at;
};

struct ComparisonReport {
    double sup_error = 0.0;
    std::size_t exchange_count = 0;
    double hamiltonian_drift = 0.0;
    double speed_ratio = 0.0;
};

/// rw-weighted centroids over disks of the given radius about prev_centers.
/// Throws InvalidInput if two disks overlap and LostRingError if a window
/// holds less than 1e-8 of the total weighted mass.
std::vector<Vec2> ring_centroids(const fields::ScalarField& omega, const std::vector<Vec2>& prev_centers,
                                 double window_radius);

/// 10 eps for one ring, otherwise min(10 max eps_j, 0.45 min separation).
double default_window_radius(const reduced::RingFamily& rings);

/// Window for the next tracking pass: base, shrunk to 0.45 of the closest
/// pair in `centers` so the disks stay disjoint as rings approach.
double tracking_window(const std::vector<Vec2>& centers, double base);

/// c = least-squares slope of the mean z-centroid against t = tau/|log eps|
/// plus the frame speed 2 alpha0 |log eps|. Needs at least 10 samples.
double measure_speed(const CenterSeries& series, double log_eps, double alpha0);

/// Number of sign changes of r_1 - r_2 along the series (k = 2; 0 otherwise).
std::size_t exchange_count(const CenterSeries& series);

/// Duration of one full exchange cycle of the reduced trajectory: twice the
/// gap between the first two sign changes of r_1 - r_2. Empty if there are
/// fewer than two.
std::optional<double> first_exchange_period(const reduced::Trajectory& traj);

/// Maps traj to physical centers, interpolates it linearly to the series
/// times and reports the sup distance over tau <= tau_max, the exchange
/// count of the series, the ODE Hamiltonian drift and measured/predicted
/// speed with predicted 2|log eps|/r0 (alpha0 = 1/r0 frame).
ComparisonReport compare_reduced(const CenterSeries& series, const reduced::Trajectory& traj, double epsilon,
                                 std::optional<double> tau_max = std::nullopt);

struct RunMetadata {
    double epsilon = 0.0;
    double r0 = 1.0;
    double dt = 0.0;
    fields::AxiGrid grid;
};

nlohmann::json to_json(const ComparisonReport& report, const RunMetadata& meta);

}  // namespace leapfrog::diagnostics
