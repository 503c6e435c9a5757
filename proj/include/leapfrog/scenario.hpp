#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "leapfrog/vec2.hpp"

/// JSON-configured scenario runner behind the command line tool.
namespace leapfrog::cli {

enum class Mode { reduced, ring, leapfrog, modes, poisson_test, levelcurves };

/// Parses "reduced", "ring", "leapfrog", "modes", "poisson-test", "levelcurves".
Mode parse_mode(std::string_view name);
std::string mode_name(Mode mode);

struct GridSpec {
    double r_max = 2.4;
    double z_min = -1.5;
    double z_max = 1.5;
    std::size_t nr = 256;
    std::size_t nz = 256;
};

struct ScenarioConfig {
    Mode mode = Mode::reduced;
    double epsilon = 0.05;
    double r0 = 1.0;
    std::vector<Vec2> offsets{{0.3, 0.0}, {-0.3, 0.0}};  ///< scaled q_j
    double dt = 1e-3;
    double T = 1.0;
    std::string method = "rk4";  ///< reduced mode: rk4 | symplectic-euler
    GridSpec grid;
    std::string interp = "monotone-bicubic";  ///< or "bilinear"
    std::string velocity_update = "frozen";  ///< or "predictor-corrector"
    int substeps = 32;  ///< the core turns ~0.5 rad per unit step at eps = 0.05
    std::optional<double> alpha0;
    std::size_t snapshot_every = 0;
    double half_width = 3.0;   ///< levelcurves: sampled box is [-w, w]^2
    std::size_t samples = 200;  ///< levelcurves: nodes per side
    std::vector<std::size_t> sizes{128, 256, 512};  ///< poisson-test radial resolutions
    std::string out = "out";
    /// Uniform perturbation of every offset component in [-jitter, jitter],
    /// drawn from a generator seeded with `seed`.
    double jitter = 0.0;
    std::uint64_t seed = 0;

    std::size_t k() const { return offsets.size(); }
};

/// Parses, defaults and checks a JSON config. Throws ConfigError carrying the
/// byte offset for malformed JSON and the field path for bad values.
ScenarioConfig validate_config(std::string_view raw);

struct Artifact {
    std::string path;  ///< relative to the output directory
    std::string description;
};

struct ScenarioResult {
    nlohmann::json report;             ///< mode-specific measurements
    std::vector<Artifact> artifacts;   ///< includes manifest.json itself
    std::vector<std::string> breaches; ///< acceptance tolerances that failed
    int exit_code(bool strict) const { return strict && !breaches.empty() ? 3 : 0; }
};

/// Runs the scenario, writing artifacts and manifest.json into `out_dir`
/// (created if missing).
ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace leapfrog::cli
