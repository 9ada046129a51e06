#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nbundle/bundles.hpp"

namespace nbundle {

/// How the laser detuning is chosen at each sweep point.
enum class OmegaLRule { fixed, eq1, eq2, peak };

OmegaLRule parse_omega_l_rule(const std::string& name);
std::string to_string(OmegaLRule rule);

/// Resolved run configuration. Physical fields are in units of g;
/// burn_in, window, duration and tau_max are in units of 1/gamma_a.
struct RunConfig {
    // model
    double gamma_a = 0.1;
    double gamma_sigma = 0.01;
    double delta = -60.0;
    double omega = 0.0;
    double omega_l_detuning = 0.0;
    // solver
    int n_max = 10;
    double dt = 0.05;
    double burn_in = 50.0;
    double window = 5.0;
    double corr_window = 1.0;   ///< jitter-window for correlation streams
    double tau_max = 10.0;
    int tau_points = 400;
    // sweep / scan
    int n_target = 2;
    OmegaLRule omega_l_rule = OmegaLRule::eq2;
    std::vector<double> omega_grid;
    std::vector<double> omega_l_grid;
    int n_min = 1;
    int n_max_resonance = 5;
    // trajectories
    double duration = 1000.0;
    int traj_per_point = 2;
    double g_hz = 0.0;          ///< 0 = no physical-rate columns
    double snapshot_stride = 0.0;
    // execution
    std::uint64_t seed = 1;
    int workers = 1;
    std::filesystem::path out_dir = "out";

    SystemParams params() const;
    void validate() const;

    /// Flat key=value view used by config files and the manifest.
    std::map<std::string, std::string> to_map() const;
    static RunConfig from_map(const std::map<std::string, std::string>& kv);
};

/// Parses a `key = value` file (# comments). Unknown keys are errors.
RunConfig load_config_file(const std::filesystem::path& path);

/// Run manifest: resolved config, tool version, master seed, per-output
/// checksums and wall-clock timings. Re-running a command from its
/// manifest reproduces byte-identical CSV payloads.
struct RunManifest {
    std::string command;
    std::string version;
    RunConfig config;
    std::map<std::string, std::string> output_checksums;
    std::map<std::string, double> timings_s;

    void write(const std::filesystem::path& path) const;
    static RunManifest read(const std::filesystem::path& path);
};

extern const char* kToolVersion;

/// Subcommand entry points. Each writes its outputs plus manifest.json
/// under config.out_dir and returns the manifest.
RunManifest cmd_resonances(const RunConfig& config);
RunManifest cmd_scan(const RunConfig& config);
RunManifest cmd_sweep_cn(const RunConfig& config);
RunManifest cmd_trajectory(const RunConfig& config);
RunManifest cmd_analyze(const RunConfig& config,
                        const std::filesystem::path& record_path);

} // namespace nbundle
