// SPDX-License-Identifier: Apache-2.0
//
// msisac command-line front end.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "msisac/experiment.hpp"

namespace {

using Command = int (*)(const msisac::ExperimentConfig &, const std::filesystem::path &, std::ostream &);

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Multi-static OFDM sensing simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(msisac::tool_version));

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> preset;
    app.add_option("-c,--config", config_path, "Experiment configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("-o,--out-dir", out_dir, "Output directory (default: config, then $MSISAC_OUT_DIR)");
    app.add_option("-s,--seed", seed, "Master seed, overrides the config");
    app.add_option("-p,--preset", preset, "Numerology preset")->check(CLI::IsMember({"desk", "paper"}));

    struct Entry {
        const char *name;
        const char *help;
        Command fn;
    };
    const Entry entries[] = {
        {"validate", "Check ISI/ICI conditions for the configured scene and numerology", msisac::cmd_validate},
        {"rvm", "Simulate one frame and export per-TX range-velocity maps and profiles", msisac::cmd_rvm},
        {"sweep-sinr", "SINR of TX1's target versus interferer power ratio and sparsity", msisac::cmd_sweep_sinr},
        {"ghosts", "Predicted ghost positions of a periodic allocation", msisac::cmd_ghosts},
        {"masks", "Export the resource masks of the configured allocation", msisac::cmd_masks},
    };
    Command selected = nullptr;
    for (const auto &e : entries)
        app.add_subcommand(e.name, e.help)->callback([&selected, fn = e.fn] { selected = fn; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return msisac::exit_config;
    }

    try {
        const msisac::Overrides ov{preset, seed};
        const msisac::ExperimentConfig cfg =
            config_path.empty() ? msisac::parse_config("{}", ov) : msisac::load_config(config_path, ov);
        return selected(cfg, msisac::resolve_out_dir(out_dir, cfg), std::cout);
    } catch (const msisac::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return msisac::exit_config;
    } catch (const msisac::InfeasibleGeometry &e) {
        std::cerr << "infeasible geometry: " << e.what() << "\n";
        return msisac::exit_infeasible;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return msisac::exit_runtime;
    }
}
