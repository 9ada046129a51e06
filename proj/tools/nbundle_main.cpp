#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nbundle/cli.hpp"

using namespace nbundle;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string manifest_path;
    std::string out_dir;
    std::string seed;
    int workers = 0;
    int nmax = 0;
    double dt = 0.0;
};

void attach_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Key=value config file");
    cmd->add_option("--from-manifest", flags.manifest_path,
                    "Re-run with the resolved config of a previous manifest");
    cmd->add_option("--out", flags.out_dir, "Output directory");
    cmd->add_option("--seed", flags.seed, "Master RNG seed (u64)");
    cmd->add_option("--workers", flags.workers, "Worker threads");
    cmd->add_option("--nmax", flags.nmax, "Cavity Fock truncation");
    cmd->add_option("--dt", flags.dt, "Propagator step (units 1/g)");
}

RunConfig resolve(const CommonFlags& flags, const std::string& command) {
    RunConfig cfg;
    if (!flags.manifest_path.empty()) {
        const RunManifest m = RunManifest::read(flags.manifest_path);
        if (m.command != command)
            throw std::runtime_error("manifest was produced by '" + m.command +
                                     "', not '" + command + "'");
        cfg = m.config;
    } else if (!flags.config_path.empty()) {
        cfg = load_config_file(flags.config_path);
    }
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (!flags.seed.empty()) cfg.seed = std::stoull(flags.seed);
    if (flags.workers > 0) cfg.workers = flags.workers;
    if (flags.nmax > 0) cfg.n_max = flags.nmax;
    if (flags.dt > 0.0) cfg.dt = flags.dt;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity-QED N-photon bundle emitter simulator"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string record_path;

    CLI::App* resonances =
        app.add_subcommand("resonances", "Ladder and dressed resonance table");
    attach_common(resonances, flags);

    CLI::App* scan = app.add_subcommand(
        "scan", "Steady-state observables over an (omega_L, Omega) grid");
    attach_common(scan, flags);

    CLI::App* sweep = app.add_subcommand(
        "sweep-cn", "Follow the C_N resonance over an Omega grid");
    attach_common(sweep, flags);

    CLI::App* trajectory = app.add_subcommand(
        "trajectory", "Quantum-jump Monte Carlo click records");
    attach_common(trajectory, flags);

    CLI::App* analyze = app.add_subcommand(
        "analyze", "Bundle statistics and correlations from a click record");
    attach_common(analyze, flags);
    analyze->add_option("--record", record_path, "Click record file")
        ->required();

    try {
        app.parse(argc, argv);
        if (resonances->parsed())
            cmd_resonances(resolve(flags, "resonances"));
        else if (scan->parsed())
            cmd_scan(resolve(flags, "scan"));
        else if (sweep->parsed())
            cmd_sweep_cn(resolve(flags, "sweep-cn"));
        else if (trajectory->parsed())
            cmd_trajectory(resolve(flags, "trajectory"));
        else if (analyze->parsed())
            cmd_analyze(resolve(flags, "analyze"), record_path);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
