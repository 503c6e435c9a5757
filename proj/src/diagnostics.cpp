#include "leapfrog/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leapfrog/errors.hpp"

namespace leapfrog::diagnostics {

std::vector<Vec2> ring_centroids(const fields::ScalarField& omega, const std::vector<Vec2>& prev_centers,
                                 double window_radius) {
    omega.validate();
    if (!(window_radius > 0.0)) throw InvalidInput("window radius must be positive");
    for (std::size_t a = 0; a < prev_centers.size(); ++a) {
        for (std::size_t b = a + 1; b < prev_centers.size(); ++b) {
            if (norm(prev_centers[a] - prev_centers[b]) <= 2.0 * window_radius) {
                throw InvalidInput("centroid windows overlap");
            }
        }
    }
    const auto& g = omega.grid;
    double total = 0.0;
    for (std::size_t i = 0; i < g.nr; ++i)
        for (std::size_t m = 0; m < g.nz; ++m) total += g.r(i) * std::abs(omega.at(i, m));

    std::vector<Vec2> out;
    out.reserve(prev_centers.size());
    const double R2 = window_radius * window_radius;
    for (std::size_t j = 0; j < prev_centers.size(); ++j) {
        const Vec2 c = prev_centers[j];
        const auto i0 = static_cast<long>(std::floor((c.x - window_radius) / g.hr));
        const auto i1 = static_cast<long>(std::ceil((c.x + window_radius) / g.hr));
        const auto m0 = static_cast<long>(std::floor((c.y - window_radius - g.z_min) / g.hz));
        const auto m1 = static_cast<long>(std::ceil((c.y + window_radius - g.z_min) / g.hz));
        double mass = 0.0;
        Vec2 moment{0.0, 0.0};
        for (long i = std::max(i0, 0L); i <= std::min(i1, static_cast<long>(g.nr) - 1); ++i) {
            for (long m = std::max(m0, 0L); m <= std::min(m1, static_cast<long>(g.nz) - 1); ++m) {
                const Vec2 x{g.r(static_cast<std::size_t>(i)), g.z(static_cast<std::size_t>(m))};
                if (norm2(x - c) > R2) continue;
                const double w = x.x * omega.at(static_cast<std::size_t>(i), static_cast<std::size_t>(m));
                mass += w;
                moment = moment + w * x;
            }
        }
        if (!(std::abs(mass) >= 1e-8 * total) || mass == 0.0) throw LostRingError(j, mass, total);
        out.push_back((1.0 / mass) * moment);
    }
    return out;
}

double default_window_radius(const reduced::RingFamily& rings) {
    if (rings.core_scales.empty()) throw InvalidInput("ring family is empty");
    const double eps_max = *std::max_element(rings.core_scales.begin(), rings.core_scales.end());
    if (rings.centers.size() == 1) return 10.0 * eps_max;
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < rings.centers.size(); ++a)
        for (std::size_t b = a + 1; b < rings.centers.size(); ++b)
            sep = std::min(sep, norm(rings.centers[a] - rings.centers[b]));
    return std::min(10.0 * eps_max, 0.45 * sep);
}

double tracking_window(const std::vector<Vec2>& centers, double base) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < centers.size(); ++a)
        for (std::size_t b = a + 1; b < centers.size(); ++b) sep = std::min(sep, norm(centers[a] - centers[b]));
    return std::min(base, 0.45 * sep);
}

double measure_speed(const CenterSeries& series, double log_eps, double alpha0) {
    const std::size_t n = series.times.size();
    if (n < 10 || series.centers.size() != n) throw InvalidInput("measure_speed needs at least 10 samples");
    const double L = std::abs(log_eps);
    if (!(L > 0.0)) throw InvalidInput("log eps must be nonzero");
    double tm = 0.0;
    double zm = 0.0;
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (series.centers[i].empty()) throw InvalidInput("series has no rings");
        double s = 0.0;
        for (const auto& c : series.centers[i]) s += c.y;
        z[i] = s / static_cast<double>(series.centers[i].size());
        tm += series.times[i] / L;
        zm += z[i];
    }
    tm /= static_cast<double>(n);
    zm /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = series.times[i] / L - tm;
        sxx += dt * dt;
        sxy += dt * (z[i] - zm);
    }
    if (!(sxx > 0.0)) throw InvalidInput("degenerate time span in measure_speed");
    return sxy / sxx + 2.0 * alpha0 * L;
}

std::size_t exchange_count(const CenterSeries& series) {
    std::size_t count = 0;
    int last = 0;
    for (const auto& c : series.centers) {
        if (c.size() != 2) return 0;
        const double d = c[0].x - c[1].x;
        const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (sign == 0) continue;
        if (last != 0 && sign != last) ++count;
        last = sign;
    }
    return count;
}

std::optional<double> first_exchange_period(const reduced::Trajectory& traj) {
    std::vector<double> crossings;
    double last_d = 0.0;
    double last_t = 0.0;
    for (std::size_t i = 0; i < traj.states.size() && crossings.size() < 2; ++i) {
        const auto& q = traj.states[i].q;
        if (q.size() != 2) return std::nullopt;
        const double d = q[0].x - q[1].x;
        if (d == 0.0) continue;
        if (last_d != 0.0 && (d > 0.0) != (last_d > 0.0)) {
            // linear interpolation of the zero of r1 - r2
            crossings.push_back(last_t + (traj.times[i] - last_t) * last_d / (last_d - d));
        }
        last_d = d;
        last_t = traj.times[i];
    }
    if (crossings.size() < 2) return std::nullopt;
    return 2.0 * (crossings[1] - crossings[0]);
}

ComparisonReport compare_reduced(const CenterSeries& series, const reduced::Trajectory& traj, double epsilon,
                                 std::optional<double> tau_max) {
    if (traj.states.empty() || series.times.empty()) throw InvalidInput("empty series or trajectory");
    const std::size_t k = traj.states.front().k();
    for (const auto& c : series.centers) {
        if (c.size() != k) throw InvalidInput("ring count differs between PDE series and trajectory");
    }
    const double r0 = traj.states.front().r0;
    const double s = 1.0 / std::sqrt(std::abs(std::log(epsilon)));
    auto physical = [&](std::size_t idx, std::size_t j) {
        const Vec2 q = traj.states[idx].q[j];
        return Vec2{r0 + s * q.x, s * q.y};
    };

    ComparisonReport rep;
    const double limit = tau_max.value_or(std::numeric_limits<double>::infinity());
    std::size_t seg = 0;
    for (std::size_t n = 0; n < series.times.size(); ++n) {
        const double tau = series.times[n];
        if (tau > limit) break;
        if (tau < traj.times.front() || tau > traj.times.back()) continue;
        while (seg + 2 < traj.times.size() && traj.times[seg + 1] < tau) ++seg;
        const std::size_t b = std::min(seg + 1, traj.times.size() - 1);
        const double span = traj.times[b] - traj.times[seg];
        const double w = span > 0.0 ? (tau - traj.times[seg]) / span : 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const Vec2 p = (1.0 - w) * physical(seg, j) + w * physical(b, j);
            rep.sup_error = std::max(rep.sup_error, norm(series.centers[n][j] - p));
        }
    }
    rep.exchange_count = exchange_count(series);
    for (double h : traj.hamiltonian) rep.hamiltonian_drift = std::max(rep.hamiltonian_drift, std::abs(h - traj.hamiltonian.front()));
    if (series.times.size() >= 10) {
        const double L = std::abs(std::log(epsilon));
        rep.speed_ratio = measure_speed(series, std::log(epsilon), 1.0 / r0) / (2.0 * L / r0);
    }
    return rep;
}

nlohmann::json to_json(const ComparisonReport& report, const RunMetadata& meta) {
    nlohmann::json j;
    j["sup_error"] = report.sup_error;
    j["exchange_count"] = report.exchange_count;
    j["hamiltonian_drift"] = report.hamiltonian_drift;
    j["speed_ratio"] = report.speed_ratio;
    j["epsilon"] = meta.epsilon;
    j["r0"] = meta.r0;
    j["dt"] = meta.dt;
    j["grid"] = {{"nr", meta.grid.nr}, {"nz", meta.grid.nz}, {"hr", meta.grid.hr}, {"hz", meta.grid.hz},
                 {"z_min", meta.grid.z_min}};
    return j;
}

}  // namespace leapfrog::diagnostics
