#include "leapfrog/reduced_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "leapfrog/errors.hpp"

namespace leapfrog::reduced {

namespace {

struct ClosestPair {
    std::size_t i = 0;
    std::size_t j = 0;
    double distance = std::numeric_limits<double>::infinity();
};

ClosestPair closest_pair(const std::vector<Vec2>& q) {
    ClosestPair best;
    for (std::size_t i = 0; i < q.size(); ++i) {
        for (std::size_t j = i + 1; j < q.size(); ++j) {
            const double d = norm(q[i] - q[j]);
            if (!(d >= best.distance)) best = {i, j, d};
        }
    }
    return best;
}

void require_separated(const std::vector<Vec2>& q, double threshold, double tau) {
    const auto c = closest_pair(q);
    if (!(c.distance > threshold)) throw CollisionError(c.i, c.j, c.distance, tau);
}

void require_finite(const std::vector<Vec2>& q, double tau) {
    for (const auto& v : q) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
            throw NonFiniteError("reduced dynamics state became non-finite at tau = " + std::to_string(tau));
        }
    }
}

// Interaction part -4 sum (q_j - q_l)^perp / |q_j - q_l|^2.
std::vector<Vec2> interaction(const std::vector<Vec2>& q) {
    std::vector<Vec2> out(q.size(), Vec2{0.0, 0.0});
    for (std::size_t j = 0; j < q.size(); ++j) {
        for (std::size_t l = 0; l < q.size(); ++l) {
            if (l == j) continue;
            const Vec2 d = q[j] - q[l];
            out[j] = out[j] - (4.0 / norm2(d)) * perp(d);
        }
    }
    return out;
}

std::vector<Vec2> axpy(const std::vector<Vec2>& x, double a, const std::vector<Vec2>& y) {
    std::vector<Vec2> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
    return out;
}

ScaledConfig rk4_step(const ScaledConfig& s, double dt) {
    ScaledConfig tmp = s;
    const auto k1 = rhs(s);
    tmp.q = axpy(s.q, 0.5 * dt, k1);
    const auto k2 = rhs(tmp);
    tmp.q = axpy(s.q, 0.5 * dt, k2);
    const auto k3 = rhs(tmp);
    tmp.q = axpy(s.q, dt, k3);
    const auto k4 = rhs(tmp);
    ScaledConfig out = s;
    for (std::size_t j = 0; j < s.k(); ++j) {
        out.q[j] = s.q[j] + (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return out;
}

// Canonical pair x = q^1, p = q^2:
//   p' = p - dt dH/dx(x, p'),  x' = x + dt dH/dp(x, p').
ScaledConfig symplectic_euler_step(const ScaledConfig& s, double dt) {
    ScaledConfig trial = s;
    for (int it = 0; it < 200; ++it) {
        const auto g = hamiltonian_gradient(trial);
        double change = 0.0;
        double scale = 0.0;
        for (std::size_t j = 0; j < s.k(); ++j) {
            const double p_new = s.q[j].y - dt * g[j].x;
            change = std::max(change, std::abs(p_new - trial.q[j].y));
            scale = std::max(scale, std::abs(p_new));
            trial.q[j].y = p_new;
        }
        if (change <= 1e-14 * (1.0 + scale)) {
            const auto gf = hamiltonian_gradient(trial);
            for (std::size_t j = 0; j < s.k(); ++j) trial.q[j].x = s.q[j].x + dt * gf[j].y;
            return trial;
        }
    }
    throw ConvergenceError("implicit symplectic Euler fixed point", trial.q[0].y, s.q[0].y);
}

}  // namespace

double ScaledConfig::min_separation() const { return closest_pair(q).distance; }

void ScaledConfig::validate() const {
    if (q.empty()) throw InvalidInput("ring count k must be at least 1");
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw InvalidInput("r0 must be positive");
    require_finite(q, 0.0);
    const auto c = closest_pair(q);
    if (!(c.distance > 0.0)) throw CollisionError(c.i, c.j, c.distance, 0.0);
}

void RingFamily::validate() const {
    if (centers.empty() || centers.size() != core_scales.size()) {
        throw InvalidInput("ring family needs one core scale per center");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    if (!(r0 > 0.0)) throw InvalidInput("r0 must be positive");
    const double target = r0 * epsilon * epsilon;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        if (!(centers[j].x > 0.0)) throw DomainError("ring center must have r > 0");
        const double v = centers[j].x * core_scales[j] * core_scales[j];
        if (std::abs(v - target) > 1e-12 * target) {
            throw InvalidInput("core scales violate r_j eps_j^2 = r0 eps^2");
        }
    }
}

std::vector<Vec2> rhs(const ScaledConfig& cfg) {
    require_separated(cfg.q, kSingularSeparation, 0.0);
    auto out = interaction(cfg.q);
    const double c = 2.0 / (cfg.r0 * cfg.r0);
    for (std::size_t j = 0; j < cfg.k(); ++j) out[j].y += c * cfg.q[j].x;
    return out;
}

double hamiltonian(const ScaledConfig& cfg) {
    require_separated(cfg.q, kSingularSeparation, 0.0);
    double h = 0.0;
    for (std::size_t i = 0; i < cfg.k(); ++i) {
        for (std::size_t j = i + 1; j < cfg.k(); ++j) h += 4.0 * std::log(norm(cfg.q[i] - cfg.q[j]));
        h -= cfg.q[i].x * cfg.q[i].x / (cfg.r0 * cfg.r0);
    }
    return h;
}

std::vector<Vec2> hamiltonian_gradient(const ScaledConfig& cfg) {
    require_separated(cfg.q, kSingularSeparation, 0.0);
    std::vector<Vec2> g(cfg.k(), Vec2{0.0, 0.0});
    for (std::size_t j = 0; j < cfg.k(); ++j) {
        for (std::size_t l = 0; l < cfg.k(); ++l) {
            if (l == j) continue;
            const Vec2 d = cfg.q[j] - cfg.q[l];
            g[j] = g[j] + (4.0 / norm2(d)) * d;
        }
        g[j].x -= 2.0 * cfg.q[j].x / (cfg.r0 * cfg.r0);
    }
    return g;
}

Trajectory integrate(const ScaledConfig& cfg0, double dt, double T, Method method) {
    check_perp_convention();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be positive");
    if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidInput("T must be non-negative");
    cfg0.validate();
    require_separated(cfg0.q, kCollisionThreshold, 0.0);

    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    Trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    auto record = [&](double tau, const ScaledConfig& s) {
        traj.times.push_back(tau);
        traj.states.push_back(s);
        traj.hamiltonian.push_back(hamiltonian(s));
        traj.min_separation.push_back(s.min_separation());
    };
    ScaledConfig state = cfg0;
    record(0.0, state);
    for (std::size_t n = 1; n <= steps; ++n) {
        const double tau = static_cast<double>(n) * dt;
        state = method == Method::rk4 ? rk4_step(state, dt) : symplectic_euler_step(state, dt);
        require_finite(state.q, tau);
        require_separated(state.q, kCollisionThreshold, tau);
        record(tau, state);
    }
    return traj;
}

Vec2 symmetric_pair_rhs(Vec2 q, double r0) {
    const double d2 = norm2(q);
    if (!(std::sqrt(d2) > kSingularSeparation)) throw DomainError("symmetric pair rhs is singular at q = 0");
    Vec2 out = (-2.0 / d2) * perp(q);
    out.y += 2.0 * q.x / (r0 * r0);
    return out;
}

double symmetric_pair_hamiltonian(Vec2 q, double r0) {
    return 4.0 * std::log(2.0 * norm(q)) - 2.0 * q.x * q.x / (r0 * r0);
}

std::vector<Vec2> theta0(const RingFamily& rings, double log_eps) {
    const auto& P = rings.centers;
    const auto c = closest_pair(P);
    if (!(c.distance > 0.0)) throw CollisionError(c.i, c.j, c.distance, 0.0);
    auto out = interaction(P);
    const double L = std::abs(log_eps);
    for (std::size_t j = 0; j < P.size(); ++j) {
        if (!(P[j].x > 0.0)) throw DomainError("ring center must have r > 0");
        out[j].y += 2.0 * L * (rings.r0 - P[j].x) / (rings.r0 * P[j].x);
    }
    return out;
}

RingFamily scaled_to_physical(const ScaledConfig& cfg, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    cfg.validate();
    const double s = 1.0 / std::sqrt(std::abs(std::log(epsilon)));
    RingFamily rings;
    rings.epsilon = epsilon;
    rings.r0 = cfg.r0;
    for (const auto& q : cfg.q) {
        const Vec2 P{cfg.r0 + s * q.x, s * q.y};
        if (!(P.x > 0.0)) throw DomainError("scaled offset maps to r <= 0");
        rings.centers.push_back(P);
        rings.core_scales.push_back(epsilon * std::sqrt(cfg.r0 / P.x));
    }
    return rings;
}

ScaledConfig physical_to_scaled(const std::vector<Vec2>& centers, double r0, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    const double s = std::sqrt(std::abs(std::log(epsilon)));
    ScaledConfig cfg;
    cfg.r0 = r0;
    for (const auto& P : centers) cfg.q.push_back({s * (P.x - r0), s * P.y});
    return cfg;
}

void check_perp_convention() {
    // rear ring at z = -0.5, front ring at z = +0.5, equal radii
    const auto v = interaction({{0.0, -0.5}, {0.0, 0.5}});
    if (!(v[0].x < 0.0 && v[1].x > 0.0)) {
        throw Error("perp convention inconsistent with coaxial ring interaction");
    }
}

std::optional<PoincareReturn> poincare_return(const Trajectory& traj) {
    if (traj.states.size() < 3) return std::nullopt;
    const auto& q0 = traj.states.front().q;
    const Vec2 v0 = rhs(traj.states.front())[0];
    const double speed = norm(v0);
    if (!(speed > 0.0)) return std::nullopt;
    const Vec2 n = (1.0 / speed) * v0;

    auto section = [&](std::size_t i) { return dot(traj.states[i].q[0] - q0[0], n); };
    bool left = false;
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        const double s1 = section(i);
        if (s1 < 0.0) left = true;
        if (!left || s1 < 0.0) continue;

        const double s0 = section(i - 1);
        const double h = traj.times[i] - traj.times[i - 1];
        const auto f0 = rhs(traj.states[i - 1]);
        const auto f1 = rhs(traj.states[i]);
        auto hermite = [h](double y0, double y1, double d0, double d1, double t) {
            const double t2 = t * t;
            const double t3 = t2 * t;
            return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
                   (t3 - t2) * h * d1;
        };
        const double d0 = dot(f0[0], n);
        const double d1 = dot(f1[0], n);
        double lo = 0.0;
        double hi = 1.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (hermite(s0, s1, d0, d1, mid) < 0.0) lo = mid; else hi = mid;
        }
        const double t = 0.5 * (lo + hi);
        PoincareReturn ret;
        ret.tau = traj.times[i - 1] + t * h;
        for (std::size_t j = 0; j < q0.size(); ++j) {
            const auto& a = traj.states[i - 1].q[j];
            const auto& b = traj.states[i].q[j];
            const Vec2 q{hermite(a.x, b.x, f0[j].x, f1[j].x, t), hermite(a.y, b.y, f0[j].y, f1[j].y, t)};
            ret.distance = std::max(ret.distance, norm(q - q0[j]));
        }
        return ret;
    }
    return std::nullopt;
}

LevelGrid sample_level_curves(double r0, double half_width, std::size_t n) {
    if (!(half_width > 0.0) || n < 2) throw InvalidInput("level grid needs half_width > 0 and n >= 2");
    if (!(r0 > 0.0)) throw InvalidInput("r0 must be positive");
    LevelGrid g;
    const double step = 2.0 * half_width / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g.q1.push_back(-half_width + static_cast<double>(i) * step);
    g.q2 = g.q1;
    g.H.reserve(n * n);
    for (double a : g.q1) {
        for (double b : g.q2) {
            const Vec2 q{a, b};
            g.H.push_back(norm(q) > kSingularSeparation ? symmetric_pair_hamiltonian(q, r0)
                                                        : std::numeric_limits<double>::quiet_NaN());
        }
    }
    return g;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const auto old = os.precision(17);
    const std::size_t k = traj.states.empty() ? 0 : traj.states.front().k();
    os << "tau";
    for (std::size_t j = 1; j <= k; ++j) os << ",q" << j << "_r,q" << j << "_z";
    os << ",H,min_sep\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << traj.times[i];
        for (const auto& q : traj.states[i].q) os << ',' << q.x << ',' << q.y;
        os << ',' << traj.hamiltonian[i] << ',';
        if (std::isfinite(traj.min_separation[i])) os << traj.min_separation[i]; else os << "inf";
        os << '\n';
    }
    os.precision(old);
}

void write_level_csv(std::ostream& os, const LevelGrid& grid) {
    const auto old = os.precision(17);
    os << "q1,q2,H\n";
    for (std::size_t i = 0; i < grid.q1.size(); ++i) {
        for (std::size_t j = 0; j < grid.q2.size(); ++j) {
            os << grid.q1[i] << ',' << grid.q2[j] << ',' << grid.H[i * grid.q2.size() + j] << '\n';
        }
    }
    os.precision(old);
}

}  // namespace leapfrog::reduced
