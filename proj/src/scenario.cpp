#include "leapfrog/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "leapfrog/diagnostics.hpp"
#include "leapfrog/errors.hpp"
#include "leapfrog/euler_solver.hpp"
#include "leapfrog/fields.hpp"
#include "leapfrog/profiles.hpp"
#include "leapfrog/reduced_dynamics.hpp"

namespace leapfrog::cli {

namespace {

using nlohmann::json;

// Tolerances checked under --strict, one block per mode.
constexpr double kHDrift = 1e-8;
constexpr double kReturnDistance = 1e-3;
constexpr double kSpeedLow = 0.8;
constexpr double kSpeedHigh = 1.2;
constexpr double kMassDrift = 5e-3;
constexpr double kMaxGrowth = 1e-2;
constexpr double kTrackingFactor = 3.0;
constexpr double kHomogeneousResidual = 1e-6;
constexpr double kModeResidual = 1e-4;
constexpr double kPoissonError = 2e-2;
constexpr double kSlopeLow = 1.7;
constexpr double kSlopeHigh = 2.3;

template <class T>
T get(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(key, "has the wrong type");
    }
}

Vec2 parse_point(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(path, "must be a pair of numbers [q1, q2]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigError(field, message);
}

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw Error("cannot write " + (dir / name).string());
    os << std::setprecision(17);
    return os;
}

json grid_json(const fields::AxiGrid& g) {
    return {{"nr", g.nr}, {"nz", g.nz}, {"hr", g.hr}, {"hz", g.hz}, {"z_min", g.z_min}};
}

json config_json(const ScenarioConfig& c) {
    json offsets = json::array();
    for (const auto& q : c.offsets) offsets.push_back({q.x, q.y});
    json j{{"mode", mode_name(c.mode)},
           {"epsilon", c.epsilon},
           {"r0", c.r0},
           {"k", c.k()},
           {"offsets", offsets},
           {"dt", c.dt},
           {"T", c.T},
           {"method", c.method},
           {"grid", {{"r_max", c.grid.r_max}, {"z_min", c.grid.z_min}, {"z_max", c.grid.z_max},
                     {"nr", c.grid.nr}, {"nz", c.grid.nz}}},
           {"interp", c.interp},
           {"velocity_update", c.velocity_update},
           {"substeps", c.substeps},
           {"snapshot_every", c.snapshot_every},
           {"half_width", c.half_width},
           {"samples", c.samples},
           {"sizes", c.sizes},
           {"jitter", c.jitter},
           {"seed", c.seed},
           {"out", c.out}};
    if (c.alpha0) j["alpha0"] = *c.alpha0;
    return j;
}

// Offsets after the seeded jitter; identical seeds give identical offsets.
std::vector<Vec2> initial_offsets(const ScenarioConfig& c) {
    auto q = c.offsets;
    if (c.jitter > 0.0) {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> u(-c.jitter, c.jitter);
        for (auto& p : q) {
            p.x += u(rng);
            p.y += u(rng);
        }
    }
    return q;
}

euler::SolverConfig solver_config(const ScenarioConfig& c) {
    euler::SolverConfig s;
    s.epsilon = c.epsilon;
    s.r0 = c.r0;
    s.alpha0 = c.alpha0;
    s.dt = c.dt;
    s.T = c.T;
    s.grid = fields::AxiGrid::span(c.grid.r_max, c.grid.z_min, c.grid.z_max, c.grid.nr, c.grid.nz);
    s.interp = c.interp == "bilinear" ? euler::Interp::bilinear : euler::Interp::monotone_bicubic;
    s.velocity_update = c.velocity_update == "predictor-corrector" ? euler::VelocityUpdate::predictor_corrector
                                                                   : euler::VelocityUpdate::frozen;
    s.substeps = c.substeps;
    return s;
}

class Runner {
public:
    Runner(const ScenarioConfig& cfg, std::filesystem::path dir) : cfg_(cfg), dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    ScenarioResult run() {
        switch (cfg_.mode) {
            case Mode::reduced: reduced_mode(); break;
            case Mode::ring: pde_mode(false); break;
            case Mode::leapfrog: pde_mode(true); break;
            case Mode::modes: modes_mode(); break;
            case Mode::poisson_test: poisson_mode(); break;
            case Mode::levelcurves: levelcurves_mode(); break;
        }
        res_.artifacts.push_back({"manifest.json", "artifact list, configuration and report"});
        json arts = json::array();
        for (const auto& a : res_.artifacts) arts.push_back({{"path", a.path}, {"description", a.description}});
        json manifest{{"mode", mode_name(cfg_.mode)},
                      {"config", config_json(cfg_)},
                      {"artifacts", arts},
                      {"report", res_.report},
                      {"breaches", res_.breaches}};
        auto os = open_out(dir_, "manifest.json");
        os << manifest.dump(2) << '\n';
        return res_;
    }

private:
    void add(const std::string& path, const std::string& description) { res_.artifacts.push_back({path, description}); }

    void check(bool ok, const std::string& what) {
        if (!ok) res_.breaches.push_back(what);
    }

    void reduced_mode() {
        const reduced::ScaledConfig q0{initial_offsets(cfg_), cfg_.r0};
        const auto method = cfg_.method == "symplectic-euler" ? reduced::Method::symplectic_euler : reduced::Method::rk4;
        const auto traj = reduced::integrate(q0, cfg_.dt, cfg_.T, method);
        {
            auto os = open_out(dir_, "centers.csv");
            reduced::write_trajectory_csv(os, traj);
        }
        add("centers.csv", "reduced trajectory: tau, scaled ring offsets, H, min separation");

        double drift = 0.0;
        for (double h : traj.hamiltonian) drift = std::max(drift, std::abs(h - traj.hamiltonian.front()));
        auto& r = res_.report;
        r["steps"] = traj.times.size() - 1;
        r["tau_end"] = traj.times.back();
        r["hamiltonian_drift"] = drift;
        r["min_separation"] = *std::min_element(traj.min_separation.begin(), traj.min_separation.end());
        check(drift < kHDrift, "hamiltonian drift " + std::to_string(drift) + " >= 1e-8");
        if (q0.k() == 2) {
            if (const auto ret = reduced::poincare_return(traj)) {
                r["poincare_return"] = {{"tau", ret->tau}, {"distance", ret->distance}};
                check(ret->distance < kReturnDistance, "poincare return distance " + std::to_string(ret->distance));
            } else {
                r["poincare_return"] = nullptr;
            }
            if (const auto p = diagnostics::first_exchange_period(traj)) r["exchange_period"] = *p;
        }
    }

    void write_series(const euler::RunResult& run) {
        {
            auto os = open_out(dir_, "centers.csv");
            os << "tau";
            const std::size_t k = run.centers.centers.empty() ? 0 : run.centers.centers.front().size();
            for (std::size_t j = 1; j <= k; ++j) os << ",r" << j << ",z" << j;
            os << '\n';
            for (std::size_t n = 0; n < run.centers.times.size(); ++n) {
                os << run.centers.times[n];
                for (const auto& c : run.centers.centers[n]) os << ',' << c.x << ',' << c.y;
                os << '\n';
            }
        }
        add("centers.csv", "PDE ring centroids per step: tau, r_j, z_j");
        {
            auto os = open_out(dir_, "conserved.csv");
            os << "tau,mass,maxnorm\n";
            for (std::size_t n = 0; n < run.tau.size(); ++n) {
                os << run.tau[n] << ',' << run.mass[n] << ',' << run.maxnorm[n] << '\n';
            }
        }
        add("conserved.csv", "weighted mass \\int r W and max |W| per step");
    }

    void pde_mode(bool pair) {
        const auto scfg = solver_config(cfg_);
        const reduced::ScaledConfig q0{initial_offsets(cfg_), cfg_.r0};
        const auto rings = reduced::scaled_to_physical(q0, cfg_.epsilon);
        const auto result = euler::run(rings, scfg, cfg_.snapshot_every, [&](std::size_t n, const euler::SolverState& s) {
            std::ostringstream name;
            name << "omega_" << std::setw(6) << std::setfill('0') << n << ".bin";
            std::ofstream os(dir_ / name.str(), std::ios::binary);
            fields::write_binary(os, s.omega);
            add(name.str(), "vorticity snapshot at step " + std::to_string(n));
        });
        write_series(result);

        double drift = 0.0;
        double growth = 0.0;
        for (std::size_t n = 0; n < result.mass.size(); ++n) {
            drift = std::max(drift, std::abs(result.mass[n] / result.mass.front() - 1.0));
            growth = std::max(growth, result.maxnorm[n] / result.maxnorm.front() - 1.0);
        }
        auto& r = res_.report;
        r["grid"] = grid_json(scfg.grid);
        r["mass_drift"] = drift;
        r["max_growth"] = growth;
        r["max_cfl"] = result.max_cfl;
        r["window_radius"] = result.centers.window_radius;
        r["merged_at"] = result.centers.merged_at ? json(*result.centers.merged_at) : json(nullptr);
        const double L = std::abs(std::log(cfg_.epsilon));
        const double predicted = 2.0 * L / cfg_.r0;
        const double c = diagnostics::measure_speed(result.centers, std::log(cfg_.epsilon), scfg.frame_alpha());
        r["speed"] = c;
        r["predicted_speed"] = predicted;
        r["speed_ratio"] = c / predicted;

        if (!pair) {
            check(c / predicted >= kSpeedLow && c / predicted <= kSpeedHigh,
                  "speed ratio " + std::to_string(c / predicted) + " outside [0.8, 1.2]");
            return;
        }
        check(drift < kMassDrift, "mass drift " + std::to_string(drift) + " >= 0.5%");
        check(growth < kMaxGrowth, "max-norm growth " + std::to_string(growth) + " >= 1%");

        const auto traj = reduced::integrate(q0, cfg_.dt, cfg_.T, reduced::Method::rk4);
        {
            auto os = open_out(dir_, "reduced.csv");
            reduced::write_trajectory_csv(os, traj);
        }
        add("reduced.csv", "reduced trajectory integrated alongside the PDE run");
        const auto period = diagnostics::first_exchange_period(traj);
        const auto rep = diagnostics::compare_reduced(result.centers, traj, cfg_.epsilon, period);
        diagnostics::RunMetadata meta{cfg_.epsilon, cfg_.r0, cfg_.dt, scfg.grid};
        auto report = diagnostics::to_json(rep, meta);
        report["exchange_period"] = period ? json(*period) : json(nullptr);
        double sep0 = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < rings.centers.size(); ++a)
            for (std::size_t b = a + 1; b < rings.centers.size(); ++b) sep0 = std::min(sep0, norm(rings.centers[a] - rings.centers[b]));
        report["initial_separation"] = sep0;
        {
            auto os = open_out(dir_, "comparison.json");
            os << report.dump(2) << '\n';
        }
        add("comparison.json", "PDE vs reduced dynamics comparison report");
        r["comparison"] = report;
        check(!result.centers.merged_at, "ring cores merged at tau " +
                                             (result.centers.merged_at ? std::to_string(*result.centers.merged_at) : ""));
        check(rep.exchange_count >= 2, "exchange count " + std::to_string(rep.exchange_count) + " < 2");
        check(period.has_value(), "reduced trajectory completes no exchange period");
        check(rep.sup_error <= kTrackingFactor * sep0,
              "tracking error " + std::to_string(rep.sup_error) + " > 3 x initial separation");
    }

    void modes_mode() {
        // homogeneous solutions, residual of L_1 zeta_1 on [0.1, 20]
        const auto z1 = profiles::RadialProfile::sample([](double r) { return profiles::zeta(1, r); }, 0.1, 1e-3, 19901, 1);
        double hom = 0.0;
        for (double v : profiles::mode_operator_apply(1, z1).values) hom = std::max(hom, std::abs(v));

        const double R = 10.0;
        const std::size_t count = 10000;
        const double h = (R - 1e-3) / static_cast<double>(count - 1);
        auto bump = [](double r) {
            if (r <= 1.0 || r >= 2.0) return 0.0;
            const double t = 2.0 * r - 3.0;
            return std::exp(1.0 - 1.0 / (1.0 - t * t));
        };
        std::vector<profiles::RadialProfile> sols;
        json residuals = json::object();
        double worst = 0.0;
        for (int n : {2, 3}) {
            const auto g = profiles::RadialProfile::sample(bump, 1e-3, h, count, n);
            auto p = profiles::mode_solve(n, g, R);
            const auto back = profiles::mode_operator_apply(n, p);
            double res = 0.0;
            for (std::size_t i = 0; i < back.size(); ++i) res = std::max(res, std::abs(back.values[i] - g.values[i]));
            residuals[std::to_string(n)] = res;
            worst = std::max(worst, res);
            sols.push_back(std::move(p));
        }
        {
            auto os = open_out(dir_, "modes.csv");
            os << "rho,zeta1,zeta2,zeta3,source,p2,p3\n";
            for (std::size_t i = 0; i < count; i += 10) {
                const double r = sols[0].rho[i];
                os << r << ',' << profiles::zeta(1, r) << ',' << profiles::zeta(2, r) << ',' << profiles::zeta(3, r)
                   << ',' << bump(r) << ',' << sols[0].values[i] << ',' << sols[1].values[i] << '\n';
            }
        }
        add("modes.csv", "zeta_n and solutions of L_n p = bump for n = 2, 3");
        const auto gamma = profiles::compute_Gamma(200.0);
        {
            auto os = open_out(dir_, "gamma.csv");
            profiles::write_csv(os, gamma);
        }
        add("gamma.csv", "mode-1 corrector Gamma(rho)");
        const auto consts = profiles::compute_constants(1e-10);
        auto& r = res_.report;
        r["homogeneous_residual"] = hom;
        r["mode_residuals"] = residuals;
        r["constants"] = {{"I0", consts.I0}, {"I1", consts.I1}, {"A", consts.A}, {"A_bar", consts.A_bar}};
        check(hom < kHomogeneousResidual, "L_1 zeta_1 residual " + std::to_string(hom));
        check(worst < kModeResidual, "mode_solve residual " + std::to_string(worst));
    }

    void poisson_mode() {
        auto psi_exact = [](double r, double z) { return std::pow(1.0 + r * r + z * z, -1.5); };
        std::vector<double> errors;
        auto os = open_out(dir_, "poisson.csv");
        os << "n,hr,hz,error\n";
        for (std::size_t n : cfg_.sizes) {
            const auto g = fields::AxiGrid::span(8.0, -8.0, 8.0, n, n);
            auto w = fields::ScalarField::zeros(g, fields::FieldRole::relative_vorticity);
            for (std::size_t i = 0; i < g.nr; ++i)
                for (std::size_t m = 0; m < g.nz; ++m) w.at(i, m) = 15.0 * std::pow(1.0 + g.r(i) * g.r(i) + g.z(m) * g.z(m), -3.5);
            // the analytic datum is not compactly supported; its edge value is ~1e-5 of the peak
            const auto psi = fields::solve_delta5(w, 1e-4);
            double err = 0.0;
            for (std::size_t i = 0; i < g.nr; ++i)
                for (std::size_t m = 0; m < g.nz; ++m) err = std::max(err, std::abs(psi.at(i, m) - psi_exact(g.r(i), g.z(m))));
            errors.push_back(err);
            os << n << ',' << g.hr << ',' << g.hz << ',' << err << '\n';
        }
        add("poisson.csv", "analytic pair error table: n, spacings, L-infinity error");
        json slopes = json::array();
        for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
            const double ratio = static_cast<double>(cfg_.sizes[i + 1] - 1) / static_cast<double>(cfg_.sizes[i] - 1);
            const double s = std::log(errors[i] / errors[i + 1]) / std::log(ratio);
            slopes.push_back(s);
            check(s >= kSlopeLow && s <= kSlopeHigh, "refinement slope " + std::to_string(s) + " outside 2 +- 0.3");
        }
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (cfg_.sizes[i] == 256) check(errors[i] < kPoissonError, "error at 256^2 " + std::to_string(errors[i]));
        }
        res_.report["errors"] = errors;
        res_.report["slopes"] = slopes;
    }

    void levelcurves_mode() {
        const auto grid = reduced::sample_level_curves(cfg_.r0, cfg_.half_width, cfg_.samples);
        {
            auto os = open_out(dir_, "levels.csv");
            reduced::write_level_csv(os, grid);
        }
        add("levels.csv", "H(q, -q) on a square grid for contouring");
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        std::size_t arg = 0;
        for (std::size_t k = 0; k < grid.H.size(); ++k) {
            if (std::isnan(grid.H[k])) continue;
            if (grid.H[k] < lo) {
                lo = grid.H[k];
                arg = k;
            }
            hi = std::max(hi, grid.H[k]);
        }
        const std::size_t n2 = grid.q2.size();
        res_.report["min"] = lo;
        res_.report["max"] = hi;
        res_.report["argmin"] = {grid.q1[arg / n2], grid.q2[arg % n2]};
    }

    const ScenarioConfig& cfg_;
    std::filesystem::path dir_;
    ScenarioResult res_;
};

}  // namespace

Mode parse_mode(std::string_view name) {
    if (name == "reduced") return Mode::reduced;
    if (name == "ring") return Mode::ring;
    if (name == "leapfrog") return Mode::leapfrog;
    if (name == "modes") return Mode::modes;
    if (name == "poisson-test") return Mode::poisson_test;
    if (name == "levelcurves") return Mode::levelcurves;
    throw ConfigError("mode", "unknown mode '" + std::string(name) + "'");
}

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::reduced: return "reduced";
        case Mode::ring: return "ring";
        case Mode::leapfrog: return "leapfrog";
        case Mode::modes: return "modes";
        case Mode::poisson_test: return "poisson-test";
        case Mode::levelcurves: return "levelcurves";
    }
    return "unknown";
}

ScenarioConfig validate_config(std::string_view raw) {
    json j;
    try {
        j = json::parse(raw.begin(), raw.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("", e.what(), e.byte);
    }
    require(j.is_object(), "", "top level must be a JSON object");

    ScenarioConfig c;
    if (j.contains("mode")) {
        require(j["mode"].is_string(), "mode", "must be a string");
        c.mode = parse_mode(j["mode"].get<std::string>());
    }
    c.epsilon = get(j, "epsilon", c.epsilon);
    require(std::isfinite(c.epsilon) && c.epsilon > 0.0 && c.epsilon < 1.0, "epsilon", "must lie in (0, 1)");
    c.r0 = get(j, "r0", c.r0);
    require(std::isfinite(c.r0) && c.r0 > 0.0, "r0", "must be positive");

    if (c.mode == Mode::ring) c.offsets = {{0.0, 0.0}};
    if (j.contains("offsets")) {
        const auto& o = j["offsets"];
        require(o.is_array() && !o.empty(), "offsets", "must be a non-empty array of [q1, q2] pairs");
        c.offsets.clear();
        for (std::size_t i = 0; i < o.size(); ++i) c.offsets.push_back(parse_point(o[i], "offsets[" + std::to_string(i) + "]"));
    }
    if (j.contains("k")) {
        require(j["k"].is_number_unsigned(), "k", "must be a positive integer");
        const auto k = j["k"].get<std::size_t>();
        require(k >= 1, "k", "must be a positive integer");
        if (!j.contains("offsets") && k != c.offsets.size()) {
            throw ConfigError("offsets", "required when k differs from the default ring count");
        }
        require(k == c.offsets.size(), "k", "does not match the number of offsets");
    }
    for (std::size_t a = 0; a < c.offsets.size(); ++a) {
        require(std::isfinite(c.offsets[a].x) && std::isfinite(c.offsets[a].y), "offsets", "must be finite");
        for (std::size_t b = a + 1; b < c.offsets.size(); ++b) {
            require(!(c.offsets[a] == c.offsets[b]), "offsets",
                    "entries " + std::to_string(a) + " and " + std::to_string(b) + " coincide");
        }
    }
    if (c.mode == Mode::ring) require(c.offsets.size() == 1, "offsets", "ring mode takes exactly one ring");
    if (c.mode == Mode::leapfrog) require(c.offsets.size() == 2, "offsets", "leapfrog mode takes exactly two rings");

    c.dt = get(j, "dt", c.dt);
    require(std::isfinite(c.dt) && c.dt > 0.0, "dt", "must be positive");
    c.T = get(j, "T", c.T);
    require(std::isfinite(c.T) && c.T >= c.dt, "T", "must be at least dt");
    c.method = get(j, "method", c.method);
    require(c.method == "rk4" || c.method == "symplectic-euler", "method", "must be rk4 or symplectic-euler");

    if (j.contains("grid")) {
        const auto& g = j["grid"];
        require(g.is_object(), "grid", "must be an object");
        c.grid.r_max = get(g, "r_max", c.grid.r_max);
        c.grid.z_min = get(g, "z_min", c.grid.z_min);
        c.grid.z_max = get(g, "z_max", c.grid.z_max);
        if (g.contains("n")) c.grid.nr = c.grid.nz = get<std::size_t>(g, "n", 0);
        c.grid.nr = get(g, "nr", c.grid.nr);
        c.grid.nz = get(g, "nz", c.grid.nz);
    }
    require(c.grid.r_max > 0.0, "grid.r_max", "must be positive");
    require(c.grid.z_max > c.grid.z_min, "grid.z_max", "must exceed grid.z_min");
    require(c.grid.nr >= 8 && c.grid.nz >= 8, "grid.nr", "grid needs at least 8 nodes per direction");

    c.interp = get(j, "interp", c.interp);
    require(c.interp == "bilinear" || c.interp == "monotone-bicubic", "interp", "must be bilinear or monotone-bicubic");
    c.velocity_update = get(j, "velocity_update", c.velocity_update);
    require(c.velocity_update == "frozen" || c.velocity_update == "predictor-corrector", "velocity_update",
            "must be frozen or predictor-corrector");
    if (j.contains("substeps")) {
        require(j["substeps"].is_number_integer() && j["substeps"].get<long>() >= 1, "substeps", "must be an integer >= 1");
        c.substeps = j["substeps"].get<int>();
    }
    if (j.contains("alpha0")) {
        require(j["alpha0"].is_number(), "alpha0", "must be a number");
        c.alpha0 = j["alpha0"].get<double>();
    }
    c.snapshot_every = get(j, "snapshot_every", c.snapshot_every);
    c.half_width = get(j, "half_width", c.half_width);
    require(c.half_width > 0.0, "half_width", "must be positive");
    c.samples = get(j, "samples", c.samples);
    require(c.samples >= 3, "samples", "must be at least 3");
    if (j.contains("sizes")) {
        c.sizes = get(j, "sizes", c.sizes);
        require(!c.sizes.empty(), "sizes", "must not be empty");
        for (auto n : c.sizes) require(n >= 8, "sizes", "entries must be at least 8");
    }
    c.jitter = get(j, "jitter", c.jitter);
    require(c.jitter >= 0.0, "jitter", "must be nonnegative");
    c.seed = get(j, "seed", c.seed);
    c.out = get(j, "out", c.out);
    return c;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    Runner runner(cfg, out_dir);
    return runner.run();
}

}  // namespace leapfrog::cli
