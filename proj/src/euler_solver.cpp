#include "leapfrog/euler_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "leapfrog/errors.hpp"

namespace leapfrog::euler {

namespace {

constexpr double kCflWarn = 5.0;
constexpr double kCflMax = 20.0;

struct Sampler {
    const fields::AxiGrid& g;
    const std::vector<double>& ur;
    const std::vector<double>& uz;

    // Bilinear velocity at (r, z); u_r is odd across the axis, u_z even.
    // Outside the box the edge values are used; the foot is dropped anyway.
    Vec2 velocity(double r, double z) const {
        const double sign = r < 0.0 ? -1.0 : 1.0;
        double fr = std::abs(r) / g.hr;
        double fz = (z - g.z_min) / g.hz;
        fr = std::clamp(fr, 0.0, static_cast<double>(g.nr - 1));
        fz = std::clamp(fz, 0.0, static_cast<double>(g.nz - 1));
        const std::size_t i = std::min(static_cast<std::size_t>(fr), g.nr - 2);
        const std::size_t m = std::min(static_cast<std::size_t>(fz), g.nz - 2);
        const double a = fr - static_cast<double>(i);
        const double b = fz - static_cast<double>(m);
        const std::size_t k = i * g.nz + m;
        auto lerp = [&](const std::vector<double>& f) {
            return (1.0 - a) * ((1.0 - b) * f[k] + b * f[k + 1]) + a * ((1.0 - b) * f[k + g.nz] + b * f[k + g.nz + 1]);
        };
        return {sign * lerp(ur), lerp(uz)};
    }
};

double node_value(const fields::AxiGrid& g, const std::vector<double>& w, long i, long m) {
    if (i < 0) i = -i;  // W is even across the axis
    if (i >= static_cast<long>(g.nr) || m < 0 || m >= static_cast<long>(g.nz)) return 0.0;
    return w[static_cast<std::size_t>(i) * g.nz + static_cast<std::size_t>(m)];
}

double interpolate(const fields::AxiGrid& g, const std::vector<double>& w, double r, double z, Interp kind) {
    r = std::abs(r);
    if (r > g.r_max() || z < g.z_min || z > g.z_max()) return 0.0;
    const double fr = r / g.hr;
    const double fz = (z - g.z_min) / g.hz;
    const long i = std::min(static_cast<long>(fr), static_cast<long>(g.nr) - 2);
    const long m = std::min(static_cast<long>(fz), static_cast<long>(g.nz) - 2);
    const double a = fr - static_cast<double>(i);
    const double b = fz - static_cast<double>(m);
    const double c00 = node_value(g, w, i, m);
    const double c01 = node_value(g, w, i, m + 1);
    const double c10 = node_value(g, w, i + 1, m);
    const double c11 = node_value(g, w, i + 1, m + 1);
    if (kind == Interp::bilinear) {
        return (1.0 - a) * ((1.0 - b) * c00 + b * c01) + a * ((1.0 - b) * c10 + b * c11);
    }
    // Catmull-Rom, clamped to the enclosing cell's range
    auto weights = [](double t, double* wt) {
        const double t2 = t * t;
        const double t3 = t2 * t;
        wt[0] = 0.5 * (-t3 + 2.0 * t2 - t);
        wt[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
        wt[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
        wt[3] = 0.5 * (t3 - t2);
    };
    double wa[4];
    double wb[4];
    weights(a, wa);
    weights(b, wb);
    double v = 0.0;
    for (int p = 0; p < 4; ++p) {
        double row = 0.0;
        for (int q = 0; q < 4; ++q) row += wb[q] * node_value(g, w, i - 1 + p, m - 1 + q);
        v += wa[p] * row;
    }
    const double lo = std::min({c00, c01, c10, c11});
    const double hi = std::max({c00, c01, c10, c11});
    return std::clamp(v, lo, hi);
}

void check_boundary_band(const fields::ScalarField& omega, double threshold, std::size_t band) {
    const auto& g = omega.grid;
    for (std::size_t i = 0; i < g.nr; ++i) {
        for (std::size_t m = 0; m < g.nz; ++m) {
            const bool near = i + band >= g.nr || m < band || m + band >= g.nz;
            if (near && std::abs(omega.at(i, m)) > threshold) {
                throw DomainError("vorticity reached within " + std::to_string(band) +
                                  " cells of the outer boundary at (r, z) = (" + std::to_string(g.r(i)) + ", " +
                                  std::to_string(g.z(m)) + ")");
            }
        }
    }
}

}  // namespace

void SolverConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    if (!(r0 > 0.0)) throw InvalidInput("r0 must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be positive");
    if (!(T >= dt)) throw InvalidInput("T must be at least dt");
    if (substeps < 1) throw InvalidInput("substeps must be at least 1");
    if (!std::isfinite(frame_alpha())) throw InvalidInput("alpha0 must be finite");
    grid.validate();
    if (epsilon < 2.0 * std::max(grid.hr, grid.hz)) {
        throw ResolutionError(0, epsilon, std::max(grid.hr, grid.hz));
    }
}

struct Stepper::Impl {
    explicit Impl(const fields::AxiGrid& g) : solver(g), next(g.size()) {}
    fields::Delta5Solver solver;
    std::vector<double> next;
};

Stepper::Stepper(const SolverConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    impl_ = std::make_unique<Impl>(cfg_.grid);
}

Stepper::~Stepper() = default;

SolverState Stepper::init(const reduced::RingFamily& rings) {
    SolverState s;
    s.tau = 0.0;
    s.omega = fields::superpose(rings, cfg_.grid);
    s.mass0 = fields::weighted_mass(s.omega);
    s.maxnorm0 = s.omega.max_abs();
    check_boundary_band(s.omega, 1e-12 * s.maxnorm0, cfg_.boundary_cells);
    s.psi = impl_->solver.solve(s.omega);
    return s;
}

double max_displacement(const fields::Velocity& u, const SolverConfig& cfg) {
    const auto& g = cfg.grid;
    const double h = cfg.dt / static_cast<double>(cfg.substeps);
    double cfl = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double a = u.ur.values[k];
        const double b = u.uz.values[k];
        if (!std::isfinite(a) || !std::isfinite(b)) throw NonFiniteError("non-finite transport velocity");
        cfl = std::max({cfl, std::abs(a) * h / g.hr, std::abs(b) * h / g.hz});
    }
    return cfl;
}

static void advect_into(const fields::ScalarField& omega, const fields::Velocity& u, const SolverConfig& cfg,
                        std::vector<double>& next) {
    const auto& g = cfg.grid;
    if (!(omega.grid == g) || !(u.ur.grid == g) || !(u.uz.grid == g)) {
        throw InvalidInput("field grid differs from the configured grid");
    }
    const double h = cfg.dt / static_cast<double>(cfg.substeps);
    const Sampler vel{g, u.ur.values, u.uz.values};
    next.resize(g.size());
    for (std::size_t i = 0; i < g.nr; ++i) {
        for (std::size_t m = 0; m < g.nz; ++m) {
            double r = g.r(i);
            double z = g.z(m);
            for (int s = 0; s < cfg.substeps; ++s) {
                const Vec2 v1 = vel.velocity(r, z);
                const Vec2 v2 = vel.velocity(r - 0.5 * h * v1.x, z - 0.5 * h * v1.y);
                r -= h * v2.x;
                z -= h * v2.y;
            }
            next[g.index(i, m)] = interpolate(g, omega.values, r, z, cfg.interp);
        }
    }
}

fields::ScalarField advect(const fields::ScalarField& omega, const fields::Velocity& u, const SolverConfig& cfg) {
    cfg.validate();
    const double cfl = max_displacement(u, cfg);
    if (cfl > kCflMax) throw CflError("characteristic displacement of " + std::to_string(cfl) + " cells per substep exceeds 20");
    fields::ScalarField out{cfg.grid, {}, omega.role};
    advect_into(omega, u, cfg, out.values);
    return out;
}

void Stepper::step(SolverState& state) {
    const auto& g = cfg_.grid;
    if (!(state.omega.grid == g)) throw InvalidInput("state grid differs from the configured grid");
    const auto u = fields::velocity_field(state.psi, std::log(cfg_.epsilon), cfg_.frame_alpha());

    const double cfl = max_displacement(u, cfg_);
    state.max_cfl = std::max(state.max_cfl, cfl);
    if (cfl > kCflMax) {
        throw CflError("characteristic displacement of " + std::to_string(cfl) +
                       " cells per substep exceeds 20; increase substeps or reduce dt");
    }
    if (cfl > kCflWarn && on_cfl_warning) on_cfl_warning(cfl);

    advect_into(state.omega, u, cfg_, impl_->next);
    if (cfg_.velocity_update == VelocityUpdate::predictor_corrector) {
        const fields::ScalarField predicted{g, impl_->next, state.omega.role};
        const auto up = fields::velocity_field(impl_->solver.solve(predicted), std::log(cfg_.epsilon), cfg_.frame_alpha());
        auto mean = u;
        for (std::size_t k = 0; k < mean.ur.values.size(); ++k) {
            mean.ur.values[k] = 0.5 * (u.ur.values[k] + up.ur.values[k]);
            mean.uz.values[k] = 0.5 * (u.uz.values[k] + up.uz.values[k]);
        }
        const double cfl2 = max_displacement(mean, cfg_);
        state.max_cfl = std::max(state.max_cfl, cfl2);
        if (cfl2 > kCflMax) {
            throw CflError("characteristic displacement of " + std::to_string(cfl2) +
                           " cells per substep exceeds 20; increase substeps or reduce dt");
        }
        advect_into(state.omega, mean, cfg_, impl_->next);
    }
    state.omega.values.swap(impl_->next);
    state.tau += cfg_.dt;
    check_boundary_band(state.omega, 1e-12 * state.maxnorm0, cfg_.boundary_cells);
    state.psi = impl_->solver.solve(state.omega);
}

SolverState init(const reduced::RingFamily& rings, const SolverConfig& cfg) {
    Stepper stepper(cfg);
    return stepper.init(rings);
}

SolverState step(const SolverState& state, const SolverConfig& cfg) {
    Stepper stepper(cfg);
    SolverState out = state;
    stepper.step(out);
    return out;
}

RunResult run(const reduced::RingFamily& rings, const SolverConfig& cfg, std::size_t snapshot_every,
              const SnapshotSink& sink) {
    Stepper stepper(cfg);
    SolverState state = stepper.init(rings);
    RunResult res;
    const bool track = !rings.centers.empty();
    res.centers.window_radius =
        cfg.window_radius > 0.0 ? cfg.window_radius : (track ? diagnostics::default_window_radius(rings) : 0.0);
    std::vector<Vec2> prev = rings.centers;
    const double core = track ? *std::max_element(rings.core_scales.begin(), rings.core_scales.end()) : 0.0;

    auto record = [&](std::size_t n) {
        res.tau.push_back(state.tau);
        res.mass.push_back(fields::weighted_mass(state.omega));
        res.maxnorm.push_back(state.omega.max_abs());
        if (track && !res.centers.merged_at) {
            const double w = diagnostics::tracking_window(prev, res.centers.window_radius);
            if (w < core) {
                // the cores can no longer be told apart
                res.centers.merged_at = state.tau;
            } else {
                prev = diagnostics::ring_centroids(state.omega, prev, w);
            }
        }
        if (!res.centers.merged_at) {
            res.centers.times.push_back(state.tau);
            res.centers.centers.push_back(prev);
        }
        if (snapshot_every > 0 && n % snapshot_every == 0) {
            res.snapshot_steps.push_back(n);
            if (sink) sink(n, state);
        }
    };

    const auto steps = static_cast<std::size_t>(std::llround(cfg.T / cfg.dt));
    record(0);
    for (std::size_t n = 1; n <= steps; ++n) {
        stepper.step(state);
        state.tau = static_cast<double>(n) * cfg.dt;
        record(n);
    }
    res.max_cfl = state.max_cfl;
    return res;
}

}  // namespace leapfrog::euler
