// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance            all criteria (criteria 6-8 take ~20 min)
//   acceptance 1 3 5      a subset
//
// A FAIL line is a measured outcome, not a crash, so the exit status is 0
// whenever every criterion could be evaluated and 1 otherwise. The lines are
// also written to acceptance_results.txt in the working directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "leapfrog/profiles.hpp"
#include "leapfrog/scenario.hpp"

using namespace leapfrog;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
    bool pass;
    std::string detail;
};

const fs::path kOut = fs::temp_directory_path() / "leapfrog_acceptance";

cli::ScenarioResult scenario(const std::string& name, const std::string& raw) {
    return cli::run_scenario(cli::validate_config(raw), kOut / name);
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// sup over |y| <= 5 of the five-point Laplacian of Gamma0 plus U, h = 1e-2
Outcome liouville() {
    const double h = 1e-2;
    const int n = 500;
    double worst = 0.0;
    for (int i = -n; i <= n; ++i) {
        for (int j = -n; j <= n; ++j) {
            const Vec2 y{i * h, j * h};
            if (norm(y) > 5.0) continue;
            const double lap = (profiles::eval_Gamma0({y.x + h, y.y}) + profiles::eval_Gamma0({y.x - h, y.y}) +
                                profiles::eval_Gamma0({y.x, y.y + h}) + profiles::eval_Gamma0({y.x, y.y - h}) -
                                4.0 * profiles::eval_Gamma0(y)) / (h * h);
            worst = std::max(worst, std::abs(lap + profiles::eval_U(y)));
        }
    }
    return {worst <= 1e-3, "sup |Delta_h Gamma0 + U| = " + fmt("%.3e", worst) + " (<= 1e-3)"};
}

Outcome modes() {
    const auto z1 = profiles::RadialProfile::sample([](double r) { return profiles::zeta(1, r); }, 0.1, 1e-3, 19901, 1);
    double hom = 0.0;
    for (double v : profiles::mode_operator_apply(1, z1).values) hom = std::max(hom, std::abs(v));

    auto bump = [](double r) {
        if (r <= 1.0 || r >= 2.0) return 0.0;
        const double t = 2.0 * r - 3.0;
        return std::exp(1.0 - 1.0 / (1.0 - t * t));
    };
    const double R = 10.0;
    const std::size_t count = 10000;
    const double h = (R - 1e-3) / static_cast<double>(count - 1);
    double trip = 0.0;
    for (int n : {2, 3}) {
        const auto g = profiles::RadialProfile::sample(bump, 1e-3, h, count, n);
        const auto back = profiles::mode_operator_apply(n, profiles::mode_solve(n, g, R));
        for (std::size_t i = 0; i < back.size(); ++i) trip = std::max(trip, std::abs(back.values[i] - g.values[i]));
    }
    return {hom < 1e-6 && trip < 1e-4,
            "L1 zeta1 residual " + fmt("%.3e", hom) + " (< 1e-6), mode_solve round trip " + fmt("%.3e", trip) + " (< 1e-4)"};
}

Outcome constants() {
    const auto c = profiles::compute_constants(1e-10);
    const double e0 = std::abs(c.I0 / (-8.0 * kPi) - 1.0);
    const double ratio = 3.0 * (std::log(2.0) - 1.0);
    const double e1 = std::abs((c.I1 / c.I0) / ratio - 1.0);
    return {e0 <= 1e-6 && e1 <= 1e-6,
            "I0 = " + fmt("%.10f", c.I0) + " rel " + fmt("%.1e", e0) + ", I1/I0 = " + fmt("%.10f", c.I1 / c.I0) + " rel " +
                fmt("%.1e", e1) + " (<= 1e-6)"};
}

Outcome poisson() {
    const auto res = scenario("poisson", R"({"mode": "poisson-test", "sizes": [128, 256, 512]})");
    const auto& r = res.report;
    const double e256 = r["errors"][1].get<double>();  // psi peaks at 1, so this is relative
    bool ok = e256 < 0.02;
    std::string detail = "error at 256^2 " + fmt("%.3e", e256) + " (< 2%), slopes";
    for (const auto& s : r["slopes"]) {
        const double v = s.get<double>();
        ok = ok && v >= 1.7 && v <= 2.3;
        detail += " " + fmt("%.3f", v);
    }
    return {ok, detail + " (2 +- 0.3)"};
}

Outcome reduced_orbit() {
    const auto res = scenario("reduced", R"({"mode": "reduced", "offsets": [[0.3, 0], [-0.3, 0]], "r0": 1,
                                             "method": "rk4", "dt": 1e-3, "T": 20})");
    const auto& r = res.report;
    const double drift = r["hamiltonian_drift"].get<double>();
    if (r["poincare_return"].is_null()) return {false, "H drift " + fmt("%.3e", drift) + ", orbit never returned"};
    const double dist = r["poincare_return"]["distance"].get<double>();
    return {drift < 1e-8 && dist < 1e-3,
            "|H drift| " + fmt("%.3e", drift) + " (< 1e-8), Poincare return " + fmt("%.3e", dist) + " at tau " +
                fmt("%.4f", r["poincare_return"]["tau"].get<double>()) + " (< 1e-3)"};
}

// criteria 6 and 8 share one run
const nlohmann::json& leapfrog_report() {
    static const nlohmann::json report = scenario("leapfrog", R"({"mode": "leapfrog", "epsilon": 0.05, "r0": 1,
        "offsets": [[0.25, 0], [-0.25, 0]], "dt": 1e-3, "T": 2.0, "substeps": 32,
        "grid": {"r_max": 2.3, "z_min": -5.8, "z_max": 6.0, "nr": 512, "nz": 512}})").report;
    return report;
}

Outcome conservation() {
    const auto& r = leapfrog_report();
    const double drift = r["mass_drift"].get<double>();
    const double growth = r["max_growth"].get<double>();
    return {drift < 5e-3 && growth < 1e-2,
            "int rW drift " + fmt("%.4f", drift) + " (< 0.005), max-norm growth " + fmt("%.4f", growth) + " (< 0.01)"};
}

Outcome ring_speed() {
    const auto res = scenario("ring", R"({"mode": "ring", "epsilon": 0.02, "r0": 1, "dt": 1e-3, "T": 0.2, "substeps": 32,
        "grid": {"r_max": 1.6, "z_min": -1.0, "z_max": 0.8, "nr": 641, "nz": 721}})");
    const auto& r = res.report;
    const double ratio = r["speed_ratio"].get<double>();
    return {ratio >= 0.8 && ratio <= 1.2, "c = " + fmt("%.4f", r["speed"].get<double>()) + ", 2|log eps|/r0 = " +
                                              fmt("%.4f", r["predicted_speed"].get<double>()) + ", ratio " +
                                              fmt("%.4f", ratio) + " (in [0.8, 1.2])"};
}

Outcome leapfrogging() {
    const auto& r = leapfrog_report();
    const auto& cmp = r["comparison"];
    const auto exchanges = cmp["exchange_count"].get<std::size_t>();
    const double sup = cmp["sup_error"].get<double>();
    const double sep0 = cmp["initial_separation"].get<double>();
    std::string detail = "exchanges " + std::to_string(exchanges) + " (>= 2), sup error " + fmt("%.4f", sup) +
                         " vs 3 x separation " + fmt("%.4f", 3.0 * sep0);
    // the comparison only means something if both cores are tracked through the period
    bool tracked = !cmp["exchange_period"].is_null();
    if (!r["merged_at"].is_null()) {
        const double merged = r["merged_at"].get<double>();
        detail += ", cores merged at tau " + fmt("%.3f", merged);
        if (tracked && merged < cmp["exchange_period"].get<double>()) {
            tracked = false;
            detail += fmt(" inside the first exchange period %.3f", cmp["exchange_period"].get<double>());
        }
    }
    return {exchanges >= 2 && sup <= 3.0 * sep0 && tracked, detail};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        const char* name;
        std::function<Outcome()> check;
        double limit;  ///< hard runtime bound in seconds, 0 for a target only
    };
    const std::map<int, Criterion> criteria{
        {1, {"Liouville identity", liouville, 1.0}},
        {2, {"homogeneous mode and mode_solve", modes, 1.0}},
        {3, {"quadrature constants", constants, 1.0}},
        {4, {"Delta5 analytic pair", poisson, 120.0}},
        {5, {"reduced conservation and periodicity", reduced_orbit, 5.0}},
        {6, {"PDE conservation", conservation, 0.0}},
        {7, {"single-ring speed", ring_speed, 0.0}},
        {8, {"leapfrogging signature", leapfrogging, 0.0}},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

    std::ofstream log("acceptance_results.txt");
    auto emit = [&](const std::string& line) {
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        log << line << '\n' << std::flush;
    };
    int passed = 0;
    int run = 0;
    bool crashed = false;
    for (const auto& [id, c] : criteria) {
        if (!wanted.empty() && !wanted.count(id)) continue;
        ++run;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
            crashed = true;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit > 0.0 && secs >= c.limit) {
            o.pass = false;
            o.detail += fmt(", over the %.0f s budget", c.limit);
        }
        passed += o.pass;
        emit("criterion " + std::to_string(id) + (o.pass ? " PASS: " : " FAIL: ") + c.name + ": " + o.detail +
             fmt(" [%.1f s]", secs));
    }
    emit(std::to_string(passed) + "/" + std::to_string(run) + " criteria passed");
    return crashed ? 1 : 0;
}
