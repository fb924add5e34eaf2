// covlab: best-covering and Riesz-polarization experiments on compact sets.
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "covlab/errors.hpp"
#include "covlab/experiment.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInvalidConfig = 2;

int dispatch(const std::string& command, const std::string& config_path, std::uint64_t seed, bool seed_set,
             const std::string& out_dir) {
    covlab::ExperimentConfig cfg;
    if (config_path.empty()) {
        if (command != "verify") {
            std::cerr << "error: --config is required for '" << command << "'\n";
            return kExitInvalidConfig;
        }
        cfg.command = "verify";
        cfg.echo = "{\"command\": \"verify\"}";
    } else {
        cfg = covlab::ExperimentConfig::from_file(config_path);
        if (cfg.command != command) {
            std::cerr << "error: config command '" << cfg.command << "' does not match subcommand '" << command << "'\n";
            return kExitInvalidConfig;
        }
    }
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    return covlab::run_experiment(cfg, std::cout) == 0 ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"covering / polarization laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 1;
    bool seed_set = false;

    const char* names[] = {"cover", "polarize", "fractal", "asymptotics", "bridge", "uniformity", "verify"};
    const char* blurbs[] = {"best-covering sequence and theta estimand",
                            "maximal polarization sequence and sigma estimand",
                            "lattice classification, renewal DP, oscillation report",
                            "covering vs Minkowski-content sandwich",
                            "covering-polarization bridge sweeps over s",
                            "equal-cell distribution of near-optimal configurations",
                            "run the module property suite"};
    for (int i = 0; i < 7; ++i) {
        auto* sub = app.add_subcommand(names[i], blurbs[i]);
        sub->add_option("--config", config_path, "experiment config (JSON)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "64-bit experiment seed")->each([&](const std::string&) { seed_set = true; });
    }

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    try {
        return dispatch(command, config_path, seed, seed_set, out_dir);
    } catch (const covlab::ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
}
