#include "nbundle/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nbundle/io.hpp"
#include "nbundle/parallel.hpp"
#include "nbundle/rng.hpp"

namespace nbundle {

const char* kToolVersion = "nbundle 1.0.0";

OmegaLRule parse_omega_l_rule(const std::string& name) {
    if (name == "fixed") return OmegaLRule::fixed;
    if (name == "eq1") return OmegaLRule::eq1;
    if (name == "eq2") return OmegaLRule::eq2;
    if (name == "peak") return OmegaLRule::peak;
    throw std::invalid_argument("unknown omega_l_rule '" + name +
                                "' (expected fixed|eq1|eq2|peak)");
}

std::string to_string(OmegaLRule rule) {
    switch (rule) {
        case OmegaLRule::fixed: return "fixed";
        case OmegaLRule::eq1: return "eq1";
        case OmegaLRule::eq2: return "eq2";
        case OmegaLRule::peak: return "peak";
    }
    return "?";
}

SystemParams RunConfig::params() const {
    SystemParams p;
    p.gamma_a = gamma_a;
    p.gamma_sigma = gamma_sigma;
    p.delta = delta;
    p.omega = omega;
    p.omega_L_detuning = omega_l_detuning;
    return p;
}

void RunConfig::validate() const {
    params().validate();
    if (n_max < 1) throw std::invalid_argument("config: n_max must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be > 0");
    if (burn_in < 0.0) throw std::invalid_argument("config: burn_in must be >= 0");
    if (!(window > 0.0)) throw std::invalid_argument("config: window must be > 0");
    if (!(corr_window > 0.0))
        throw std::invalid_argument("config: corr_window must be > 0");
    if (!(duration > burn_in))
        throw std::invalid_argument("config: duration must exceed burn_in");
    if (traj_per_point < 1)
        throw std::invalid_argument("config: traj_per_point must be >= 1");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (tau_points < 2) throw std::invalid_argument("config: tau_points must be >= 2");
}

namespace {

std::string join_grid(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + format_double(v[i]);
    return s;
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ','))
        if (!tok.empty()) out.push_back(std::strtod(tok.c_str(), nullptr));
    return out;
}

} // namespace

std::map<std::string, std::string> RunConfig::to_map() const {
    std::map<std::string, std::string> kv;
    kv["gamma_a"] = format_double(gamma_a);
    kv["gamma_sigma"] = format_double(gamma_sigma);
    kv["delta"] = format_double(delta);
    kv["omega"] = format_double(omega);
    kv["omega_l_detuning"] = format_double(omega_l_detuning);
    kv["n_max"] = std::to_string(n_max);
    kv["dt"] = format_double(dt);
    kv["burn_in"] = format_double(burn_in);
    kv["window"] = format_double(window);
    kv["corr_window"] = format_double(corr_window);
    kv["tau_max"] = format_double(tau_max);
    kv["tau_points"] = std::to_string(tau_points);
    kv["n_target"] = std::to_string(n_target);
    kv["omega_l_rule"] = to_string(omega_l_rule);
    kv["omega_grid"] = join_grid(omega_grid);
    kv["omega_l_grid"] = join_grid(omega_l_grid);
    kv["n_min"] = std::to_string(n_min);
    kv["n_max_resonance"] = std::to_string(n_max_resonance);
    kv["duration"] = format_double(duration);
    kv["traj_per_point"] = std::to_string(traj_per_point);
    kv["g_hz"] = format_double(g_hz);
    kv["snapshot_stride"] = format_double(snapshot_stride);
    kv["seed"] = std::to_string(seed);
    kv["workers"] = std::to_string(workers);
    kv["out_dir"] = out_dir.string();
    return kv;
}

RunConfig RunConfig::from_map(const std::map<std::string, std::string>& kv) {
    RunConfig c;
    for (const auto& [key, val] : kv) {
        if (key == "gamma_a") c.gamma_a = std::strtod(val.c_str(), nullptr);
        else if (key == "gamma_sigma") c.gamma_sigma = std::strtod(val.c_str(), nullptr);
        else if (key == "delta") c.delta = std::strtod(val.c_str(), nullptr);
        else if (key == "omega") c.omega = std::strtod(val.c_str(), nullptr);
        else if (key == "omega_l_detuning") c.omega_l_detuning = std::strtod(val.c_str(), nullptr);
        else if (key == "n_max") c.n_max = std::stoi(val);
        else if (key == "dt") c.dt = std::strtod(val.c_str(), nullptr);
        else if (key == "burn_in") c.burn_in = std::strtod(val.c_str(), nullptr);
        else if (key == "window") c.window = std::strtod(val.c_str(), nullptr);
        else if (key == "corr_window") c.corr_window = std::strtod(val.c_str(), nullptr);
        else if (key == "tau_max") c.tau_max = std::strtod(val.c_str(), nullptr);
        else if (key == "tau_points") c.tau_points = std::stoi(val);
        else if (key == "n_target") c.n_target = std::stoi(val);
        else if (key == "omega_l_rule") c.omega_l_rule = parse_omega_l_rule(val);
        else if (key == "omega_grid") c.omega_grid = parse_grid(val);
        else if (key == "omega_l_grid") c.omega_l_grid = parse_grid(val);
        else if (key == "n_min") c.n_min = std::stoi(val);
        else if (key == "n_max_resonance") c.n_max_resonance = std::stoi(val);
        else if (key == "duration") c.duration = std::strtod(val.c_str(), nullptr);
        else if (key == "traj_per_point") c.traj_per_point = std::stoi(val);
        else if (key == "g_hz") c.g_hz = std::strtod(val.c_str(), nullptr);
        else if (key == "snapshot_stride") c.snapshot_stride = std::strtod(val.c_str(), nullptr);
        else if (key == "seed") c.seed = std::stoull(val);
        else if (key == "workers") c.workers = std::stoi(val);
        else if (key == "out_dir") c.out_dir = val;
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    return c;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return RunConfig::from_map(kv);
}

void RunManifest::write(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["command"] = command;
    j["version"] = version;
    j["master_seed"] = config.seed;
    j["resolved_config"] = config.to_map();
    j["output_checksums"] = output_checksums;
    j["timings_s"] = timings_s;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << j.dump(2) << "\n";
}

RunManifest RunManifest::read(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open manifest " + path.string());
    nlohmann::json j;
    f >> j;
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.version = j.at("version").get<std::string>();
    std::map<std::string, std::string> kv =
        j.at("resolved_config").get<std::map<std::string, std::string>>();
    m.config = RunConfig::from_map(kv);
    if (j.contains("output_checksums"))
        m.output_checksums =
            j.at("output_checksums").get<std::map<std::string, std::string>>();
    if (j.contains("timings_s"))
        m.timings_s = j.at("timings_s").get<std::map<std::string, double>>();
    return m;
}

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_).count();
    }
private:
    std::chrono::steady_clock::time_point start_;
};

std::map<std::string, std::string> header_params(const RunConfig& c) {
    auto kv = c.to_map();
    kv["tool"] = kToolVersion;
    kv.erase("out_dir");  // not part of the payload
    return kv;
}

// Writes a file and registers its checksum in the manifest.
void emit(RunManifest& manifest, const std::filesystem::path& dir,
          const std::string& name, const std::string& payload) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + (dir / name).string());
    f << payload;
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload)));
    manifest.output_checksums[name] = buf;
}

double omega_l_for(const RunConfig& c, double omega, int n_target,
                   const SpaceDescriptor& space) {
    switch (c.omega_l_rule) {
        case OmegaLRule::fixed: return c.omega_l_detuning;
        case OmegaLRule::eq1: return resonance_ladder(n_target, c.delta);
        case OmegaLRule::eq2: return resonance_dressed(n_target, omega, c.delta);
        case OmegaLRule::peak: {
            SystemParams p = c.params();
            p.omega = omega;
            return refine_steady_resonance(p, space, n_target).omega_L_detuning;
        }
    }
    throw std::logic_error("unreachable");
}

} // namespace

RunManifest cmd_resonances(const RunConfig& config) {
    config.validate();
    if (config.n_min < 1 || config.n_max_resonance < config.n_min)
        throw std::invalid_argument("resonances: need 1 <= n_min <= n_max_resonance");
    Stopwatch clock;
    RunManifest manifest{"resonances", kToolVersion, config, {}, {}};

    std::vector<double> omegas = config.omega_grid;
    if (omegas.empty()) omegas = {0.0};

    CsvWriter csv({"N", "omega", "eq1_detuning", "eq2_detuning"},
                  header_params(config));
    for (int n = config.n_min; n <= config.n_max_resonance; ++n)
        for (double om : omegas)
            csv.add_row(std::vector<double>{double(n), om,
                                            resonance_ladder(n, config.delta),
                                            resonance_dressed(n, om, config.delta)});
    emit(manifest, config.out_dir, "resonances.csv", csv.str());
    manifest.timings_s["total"] = clock.seconds();
    manifest.write(config.out_dir / "manifest.json");
    return manifest;
}

RunManifest cmd_scan(const RunConfig& config) {
    config.validate();
    if (config.omega_l_grid.empty())
        throw std::invalid_argument("scan: omega_l_grid is empty");
    Stopwatch clock;
    RunManifest manifest{"scan", kToolVersion, config, {}, {}};

    std::vector<double> omegas = config.omega_grid;
    if (omegas.empty()) omegas = {config.omega};
    const SpaceDescriptor space = build_space(config.n_max);

    struct Row {
        double omega, omega_l;
        std::string status = "ok";
        double n_a = std::numeric_limits<double>::quiet_NaN();
        double g[4] = {std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN()};
    };
    std::vector<Row> rows(omegas.size() * config.omega_l_grid.size());
    for (size_t i = 0; i < omegas.size(); ++i)
        for (size_t j = 0; j < config.omega_l_grid.size(); ++j) {
            rows[i * config.omega_l_grid.size() + j].omega = omegas[i];
            rows[i * config.omega_l_grid.size() + j].omega_l =
                config.omega_l_grid[j];
        }

    parallel_for(int(rows.size()), config.workers, [&](int k) {
        Row& r = rows[k];
        try {
            SystemParams p = config.params();
            p.omega = r.omega;
            p.omega_L_detuning = r.omega_l;
            const Mat rho = steady_state(liouvillian(p, space));
            r.n_a = photon_number(rho, space);
            if (!truncation_converged(rho, space)) r.status = "truncation-leak";
            for (int n = 2; n <= 5; ++n)
                r.g[n - 2] = glauber_gn(rho, space, n);
        } catch (const std::exception& e) {
            r.status = std::string("error:") + e.what();
        }
    });

    CsvWriter csv({"omega", "omega_l", "status", "n_a", "g2", "g3", "g4", "g5"},
                  header_params(config));
    for (const Row& r : rows)
        csv.add_row(std::vector<std::string>{
            format_double(r.omega), format_double(r.omega_l), r.status,
            format_double(r.n_a), format_double(r.g[0]), format_double(r.g[1]),
            format_double(r.g[2]), format_double(r.g[3])});
    emit(manifest, config.out_dir, "scan.csv", csv.str());
    manifest.timings_s["total"] = clock.seconds();
    manifest.write(config.out_dir / "manifest.json");
    return manifest;
}

RunManifest cmd_sweep_cn(const RunConfig& config) {
    config.validate();
    if (config.omega_grid.empty())
        throw std::invalid_argument("sweep-cn: omega_grid is empty");
    if (config.n_target < 2)
        throw std::invalid_argument("sweep-cn: n_target must be >= 2");
    Stopwatch clock;
    RunManifest manifest{"sweep-cn", kToolVersion, config, {}, {}};

    const SpaceDescriptor space = build_space(config.n_max);
    const int n_pts = int(config.omega_grid.size());
    const int n_traj = config.traj_per_point;

    struct PointResult {
        std::string status = "ok";
        double omega_l = 0, n_a = 0, g_n = 0;
        double lambda1 = 0, lambdan = 0, purity_v = 0, purity_err = 0,
               other = 0;
    };
    std::vector<PointResult> pts(n_pts);

    // Steady-state pass (includes the omega_l rule, which may itself
    // solve many steady states for rule=peak).
    Stopwatch steady_clock;
    parallel_for(n_pts, config.workers, [&](int i) {
        PointResult& r = pts[i];
        try {
            SystemParams p = config.params();
            p.omega = config.omega_grid[i];
            r.omega_l = omega_l_for(config, p.omega, config.n_target, space);
            p.omega_L_detuning = r.omega_l;
            const Mat rho = steady_state(liouvillian(p, space));
            r.n_a = photon_number(rho, space);
            r.g_n = glauber_gn(rho, space, config.n_target);
            if (!truncation_converged(rho, space)) r.status = "truncation-leak";
        } catch (const std::exception& e) {
            r.status = std::string("error:") + e.what();
        }
    });
    manifest.timings_s["steady"] = steady_clock.seconds();

    // Monte Carlo pass, flat over (point, trajectory) tasks; per-task
    // seeds are derived from the master seed and task coordinates so the
    // merged statistics do not depend on scheduling.
    Stopwatch mc_clock;
    const double traj_duration = config.duration / n_traj;
    std::vector<SizeHistogram> partial(size_t(n_pts) * n_traj);
    parallel_for(n_pts * n_traj, config.workers, [&](int task) {
        const int i = task / n_traj;
        const int j = task % n_traj;
        if (pts[i].status.rfind("error:", 0) == 0) return;
        SystemParams p = config.params();
        p.omega = config.omega_grid[i];
        p.omega_L_detuning = pts[i].omega_l;
        SimOptions opt;
        opt.duration = traj_duration;
        opt.burn_in = config.burn_in;
        opt.dt = config.dt;
        opt.seed = derive_seed(config.seed,
                               (std::uint64_t(i) << 24) | std::uint64_t(j));
        const ClickRecord rec = simulate(p, space, opt);
        partial[size_t(task)] = histogram(cluster(rec, config.window));
    });
    manifest.timings_s["monte_carlo"] = mc_clock.seconds();

    std::vector<std::string> cols{"omega",   "omega_L",    "n_a",
                                  "g2",      "lambda1",    "lambdaN",
                                  "purity",  "purity_err", "other_rate"};
    if (config.g_hz > 0.0) cols.push_back("rate_cps");
    cols.push_back("status");
    auto hdr = header_params(config);
    hdr["g2_column"] = "g^(" + std::to_string(config.n_target) +
                       ")(0) of the sweep's N";
    CsvWriter csv(cols, hdr);

    for (int i = 0; i < n_pts; ++i) {
        PointResult& r = pts[i];
        std::vector<std::string> cells;
        if (r.status.rfind("error:", 0) != 0) {
            SizeHistogram merged;
            merged.observation_time = 0.0;
            for (int j = 0; j < n_traj; ++j) {
                const auto& h = partial[size_t(i) * n_traj + j];
                merged.observation_time += h.observation_time;
                for (const auto& [size, c] : h.counts) merged.counts[size] += c;
            }
            try {
                const RateEstimate est = estimate_rates(merged, config.n_target);
                const PurityResult pur = purity(est);
                r.lambda1 = est.lambda_1;
                r.lambdan = est.lambda_n;
                r.other = est.other_rate;
                r.purity_v = pur.value;
                r.purity_err = pur.std_error;
            } catch (const std::exception& e) {
                r.status = std::string("error:") + e.what();
            }
        }
        cells = {format_double(config.omega_grid[i]),
                 format_double(r.omega_l),
                 format_double(r.n_a),
                 format_double(r.g_n),
                 format_double(r.lambda1),
                 format_double(r.lambdan),
                 format_double(r.purity_v),
                 format_double(r.purity_err),
                 format_double(r.other)};
        if (config.g_hz > 0.0)
            // lambdaN is per 1/gamma_a; per 1/g it is lambdaN*gamma_a.
            cells.push_back(
                format_double(r.lambdan * config.gamma_a * config.g_hz));
        cells.push_back(r.status);
        csv.add_row(cells);
    }
    emit(manifest, config.out_dir, "sweep_cn.csv", csv.str());
    manifest.timings_s["total"] = clock.seconds();
    manifest.write(config.out_dir / "manifest.json");
    return manifest;
}

RunManifest cmd_trajectory(const RunConfig& config) {
    config.validate();
    Stopwatch clock;
    RunManifest manifest{"trajectory", kToolVersion, config, {}, {}};

    const SpaceDescriptor space = build_space(config.n_max);
    const int n_rec = config.traj_per_point;
    std::vector<std::string> payloads(n_rec);
    std::vector<std::string> snapshots(n_rec);

    parallel_for(n_rec, config.workers, [&](int j) {
        SystemParams p = config.params();
        SimOptions opt;
        opt.duration = config.duration;
        opt.burn_in = config.burn_in;
        opt.dt = config.dt;
        opt.seed = derive_seed(config.seed, std::uint64_t(j));
        opt.snapshot_stride = config.snapshot_stride;
        TrajectorySnapshot snap;
        const ClickRecord rec = simulate(
            p, space, opt, nullptr,
            config.snapshot_stride > 0 ? &snap : nullptr);
        payloads[j] = serialize_click_record(rec);
        if (config.snapshot_stride > 0) {
            std::vector<std::string> cols{"time"};
            for (int idx = 0; idx < space.dim; ++idx)
                cols.push_back("p" + std::to_string(space.photon_of(idx)) +
                               (space.emitter_of(idx) ? "e" : "g"));
            CsvWriter csv(cols, header_params(config));
            for (size_t k = 0; k < snap.times.size(); ++k) {
                std::vector<double> row{snap.times[k]};
                for (int idx = 0; idx < space.dim; ++idx)
                    row.push_back(snap.populations(Eigen::Index(k), idx));
                csv.add_row(row);
            }
            snapshots[j] = csv.str();
        }
    });

    char name[64];
    for (int j = 0; j < n_rec; ++j) {
        std::snprintf(name, sizeof name, "clicks_%03d.txt", j);
        emit(manifest, config.out_dir, name, payloads[j]);
        if (config.snapshot_stride > 0) {
            std::snprintf(name, sizeof name, "snapshot_%03d.csv", j);
            emit(manifest, config.out_dir, name, snapshots[j]);
        }
    }
    manifest.timings_s["total"] = clock.seconds();
    manifest.write(config.out_dir / "manifest.json");
    return manifest;
}

RunManifest cmd_analyze(const RunConfig& config,
                        const std::filesystem::path& record_path) {
    config.validate();
    Stopwatch clock;
    RunManifest manifest{"analyze", kToolVersion, config, {}, {}};

    const ClickRecord rec = read_click_record(record_path);
    const SpaceDescriptor space = build_space(rec.n_max);
    const int n_target = config.n_target;

    const BundleStream stream = cluster(rec, config.window);

    {
        CsvWriter csv({"t_start", "t_end", "size"}, header_params(config));
        for (const auto& b : stream.bundles)
            csv.add_row(std::vector<std::string>{format_double(b.t_start),
                                                 format_double(b.t_end),
                                                 std::to_string(b.size)});
        emit(manifest, config.out_dir, "bundles.csv", csv.str());
    }

    const SizeHistogram hist = histogram(stream);
    {
        CsvWriter csv({"size", "count"}, header_params(config));
        for (const auto& [size, c] : hist.counts)
            csv.add_row(std::vector<std::string>{std::to_string(size),
                                                 std::to_string(c)});
        emit(manifest, config.out_dir, "histogram.csv", csv.str());
    }

    {
        const RateEstimate est = estimate_rates(hist, n_target);
        const PurityResult pur = purity(est);
        const std::vector<int> counts =
            window_counts(rec, 5.0 * config.window);
        const CountingFit fit = fit_counting(counts, n_target,
                                             5.0 * config.window);
        CsvWriter csv({"lambda1", "lambda1_err", "lambdaN", "lambdaN_err",
                       "other_rate", "purity", "purity_err", "fit_lambda1",
                       "fit_lambdaN"},
                      header_params(config));
        csv.add_row(std::vector<double>{est.lambda_1, est.err_lambda_1,
                                        est.lambda_n, est.err_lambda_n,
                                        est.other_rate, pur.value,
                                        pur.std_error, fit.lambda_1,
                                        fit.lambda_n});
        emit(manifest, config.out_dir, "rates.csv", csv.str());
    }

    // Correlations: click-based and regression-based g2 on a shared
    // binned tau grid, for the single-photon level and the bundle level.
    {
        const int n_bins = 40;
        std::vector<double> edges(n_bins + 1);
        for (int b = 0; b <= n_bins; ++b)
            edges[b] = config.tau_max * b / n_bins;

        std::vector<double> all_clicks;
        for (const auto& c : rec.clicks)
            if (c.channel == Channel::cavity) all_clicks.push_back(c.time);
        const CorrelationSeries click1 = coincidence_g2(
            all_clicks, stream.observation_time, edges, "g2_clicks_all");
        // Bundle events for correlations use the jitter-window stream:
        // the purity-level clustering window would impose its own dead
        // time on bundle separations.
        const BundleStream corr_stream = cluster(rec, config.corr_window);
        const CorrelationSeries clickN =
            bundle_g2_from_clicks(corr_stream, n_target, edges);

        // Regression curves, bin-averaged onto the same grid.
        const Superoperator liou = liouvillian(rec.params, space);
        const Mat rho_ss = steady_state(liou);
        const int fine_per_bin = 10;
        const std::vector<double> fine = uniform_tau_grid(
            config.tau_max, n_bins * fine_per_bin + 1);
        const CorrelationSeries reg1 =
            bundle_g2_tau(liou, rho_ss, space, 1, fine, rec.params.gamma_a);
        const CorrelationSeries regN = bundle_g2_tau(
            liou, rho_ss, space, n_target, fine, rec.params.gamma_a);
        auto bin_avg = [&](const CorrelationSeries& s, int b) {
            double acc = 0.0;
            for (int k = 0; k < fine_per_bin; ++k)
                acc += s.values[size_t(b) * fine_per_bin + k];
            return acc / fine_per_bin;
        };

        CsvWriter csv({"tau", "click_g2_1", "click_g2_1_err", "reg_g2_1",
                       "click_g2_N", "click_g2_N_err", "reg_g2_N"},
                      header_params(config));
        for (int b = 0; b < n_bins; ++b)
            csv.add_row(std::vector<double>{
                click1.tau_grid[b], click1.values[b], click1.std_errors[b],
                bin_avg(reg1, b), clickN.values[b], clickN.std_errors[b],
                bin_avg(regN, b)});
        emit(manifest, config.out_dir, "correlations.csv", csv.str());
    }

    manifest.timings_s["total"] = clock.seconds();
    manifest.write(config.out_dir / "manifest.json");
    return manifest;
}

} // namespace nbundle
