#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "leapfrog/errors.hpp"
#include "leapfrog/scenario.hpp"

namespace {

constexpr const char* kModes[] = {"reduced", "ring", "leapfrog", "modes", "poisson-test", "levelcurves"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vortex ring leapfrogging: reduced dynamics, PDE runs and profile checks"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir;
    bool strict = false;
    for (const char* name : kModes) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " scenario");
        sub->add_option("--config", config_path, "JSON scenario config (defaults apply to missing keys)");
        sub->add_flag("--strict", strict, "exit with status 3 when an acceptance tolerance is breached");
        sub->add_option("--out", out_dir, "output directory (overrides the config's \"out\")");
    }
    CLI11_PARSE(app, argc, argv);

    const std::string mode = app.get_subcommands().front()->get_name();
    try {
        std::string raw = "{}";
        if (!config_path.empty()) {
            std::ifstream is(config_path, std::ios::binary);
            if (!is) {
                std::cerr << "error: cannot read " << config_path << '\n';
                return 2;
            }
            std::ostringstream buf;
            buf << is.rdbuf();
            raw = buf.str();
        }
        auto cfg = leapfrog::cli::validate_config(raw);
        const auto requested = leapfrog::cli::parse_mode(mode);
        if (cfg.mode != requested) {
            // the subcommand wins; re-validate so mode-specific defaults apply
            auto j = nlohmann::json::parse(raw);
            j["mode"] = mode;
            cfg = leapfrog::cli::validate_config(j.dump());
        }
        if (!out_dir.empty()) cfg.out = out_dir;

        const auto result = leapfrog::cli::run_scenario(cfg, cfg.out);
        std::cout << result.report.dump(2) << '\n';
        for (const auto& a : result.artifacts) std::cout << "wrote " << cfg.out << '/' << a.path << '\n';
        for (const auto& b : result.breaches) std::cout << "BREACH: " << b << '\n';
        return result.exit_code(strict);
    } catch (const leapfrog::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
