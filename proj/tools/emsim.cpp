// Command-line front end: figure-reproduction experiments over the emsim
// library, driven by a JSON config file with flag overrides.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "emsim/config.hpp"
#include "emsim/errors.hpp"
#include "emsim/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"emitter-network simulator: connectivity, registration, readout and "
                 "photon-budget experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string subcommand;
    emsim::ConfigOverrides overrides;
    std::uint64_t seed_flag = 0;
    std::string out_flag;
    int threads_flag = 0;

    app.add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
    auto* seed_opt = app.add_option("--seed", seed_flag, "master RNG seed (overrides config)");
    auto* out_opt = app.add_option("--out", out_flag, "output directory (overrides config)");
    auto* threads_opt = app.add_option("--threads", threads_flag, "worker threads (overrides config)");

    for (const auto& [name, desc] :
         {std::pair<const char*, const char*>{"pc-sweep",
                                              "connected-fraction p_c vs tunability ratio Monte Carlo"},
          {"registry", "widefield stack -> per-channel emitter lookup table"},
          {"spam", "readout simulation, mixture fit and post-selection sweep"},
          {"budget", "Purcell factor and photon detection-efficiency budget"},
          {"scaling", "qubit-count scaling points and resolvable-spot capacity"},
          {"synth-frames", "write a synthetic widefield frame stack to disk"}})
        app.add_subcommand(name, desc)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    subcommand = app.get_subcommands().front()->get_name();

    if (*seed_opt) overrides.seed = seed_flag;
    if (*out_opt) overrides.out_dir = out_flag;
    if (*threads_opt) overrides.threads = threads_flag;

    try {
        const emsim::RunConfig config = emsim::load_config(config_path, overrides);
        if (subcommand == "pc-sweep")
            emsim::run_pc_sweep(config);
        else if (subcommand == "registry")
            emsim::run_registry(config);
        else if (subcommand == "spam")
            emsim::run_spam(config);
        else if (subcommand == "budget")
            std::cout << emsim::run_budget(config);
        else if (subcommand == "scaling")
            emsim::run_scaling(config);
        else if (subcommand == "synth-frames")
            emsim::run_synth_frames(config);
        return kExitOk;
    } catch (const emsim::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
