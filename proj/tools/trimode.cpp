// trimode: stationary state and entanglement structure of the three-mode
// cavity / mirror / Bogoliubov system, from the command line.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "trimode/config.hpp"
#include "trimode/constants.hpp"
#include "trimode/entanglement.hpp"
#include "trimode/langevin.hpp"
#include "trimode/lyapunov.hpp"
#include "trimode/model.hpp"
#include "trimode/probe.hpp"
#include "trimode/sweep.hpp"

namespace {

using namespace trimode;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SystemParams load_params(const std::string& config_path) {
    if (config_path.empty()) {
        return SystemParams{};
    }
    return params_from_config(load_config_file(config_path));
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
}

int cmd_steady(const std::string& config_path, bool json_only) {
    const SystemParams p = load_params(config_path);
    const DerivedRates r = derive_rates(p);
    const SteadyState s = steady_state(p);
    const EntanglementReport rep = run_point(p);

    if (!json_only) {
        std::cout << "derived rates:\n"
                  << "  kappa = " << fmt(r.kappa) << " rad/s\n"
                  << "  gamma = " << fmt(r.gamma) << " rad/s\n"
                  << "  eta   = " << fmt(r.eta) << " 1/s\n"
                  << "  n_bar = " << fmt(r.n_bar) << "\n"
                  << "steady state:\n"
                  << "  alpha_s_sq = " << fmt(s.alpha_s_sq) << "\n"
                  << "  alpha_s    = " << fmt(s.alpha_s) << "\n"
                  << "  q_s_scaled = " << fmt(s.q_s_scaled) << "\n"
                  << "  Q_s        = " << fmt(s.Q_s) << "\n"
                  << "stability: " << (rep.stable ? "stable" : "NOT STABLE")
                  << " (margin " << fmt(rep.stability_margin) << " rad/s)\n";
        for (const std::string& w : parameter_warnings(p)) {
            std::cout << "warning: " << w << "\n";
        }
        std::cout << "report:\n";
    }
    std::cout << report_to_json(rep) << "\n";
    return rep.stable ? 0 : 2;
}

int cmd_sweep(const std::string& preset, const std::string& spec_path,
              std::string out_base, int threads) {
    SystemParams base;
    SweepSpec spec;
    if (!preset.empty()) {
        const FigurePreset fp = figure_preset(preset);
        base = fp.base;
        spec = fp.spec;
        if (out_base.empty()) out_base = preset;
    } else {
        const ConfigMap cfg = load_config_file(spec_path);
        std::string stem = std::filesystem::path(spec_path).stem().string();
        spec = sweep_spec_from_config(cfg, stem);
        base = SystemParams{};
        if (out_base.empty()) out_base = stem;
    }

    const SweepOutputs out = run_sweep_cached(base, spec, threads);
    if (out.cache_hit) {
        std::cerr << "cache hit (" << sweep_cache_key(base, spec) << ")\n";
    }
    write_file(out_base + ".csv", out.csv);
    write_file(out_base + ".json", out.json);
    std::cout << out_base << ".csv\n" << out_base << ".json\n";
    return 0;
}

int cmd_verify(const std::string& config_path, std::uint64_t seed, int trajectories,
               double dt_frac, double burn_time, double sample_time, int threads,
               double z_threshold, const std::string& record_path, std::uint64_t record_stride) {
    const SystemParams p = load_params(config_path);
    const DerivedRates r = derive_rates(p);

    SimConfig c;
    const double fastest = std::max({r.kappa, p.omega_m, p.Omega, std::abs(p.detuning)});
    c.dt = dt_frac / fastest;
    c.burn_in_steps = static_cast<std::uint64_t>(std::ceil(burn_time / c.dt));
    c.sample_steps = static_cast<std::uint64_t>(std::ceil(sample_time / c.dt));
    c.n_trajectories = trajectories;
    c.rng_seed = seed;
    c.n_threads = threads;
    c.record_path = record_path;
    c.record_stride = record_path.empty() ? 0 : record_stride;

    std::cerr << "integrating " << trajectories << " trajectories, dt = " << fmt(c.dt)
              << " s, " << c.burn_in_steps << " burn-in + " << c.sample_steps
              << " sampled steps each\n";

    const Matrix6 V = solve_lyapunov(drift_matrix(p), diffusion_matrix(p));
    const TrajectoryStats stats = simulate(p, c);
    const DeviationReport dev = compare(stats, V, z_threshold);

    std::cout << "z-scores (empirical vs stationary solution):\n";
    for (int i = 0; i < 6; ++i) {
        std::cout << "  ";
        for (int j = 0; j < 6; ++j) {
            std::printf("%+8.3f", dev.z(i, j));
        }
        std::cout << "\n";
    }
    std::cout << "max |z| = " << fmt(dev.max_abs_z) << " (threshold " << fmt(z_threshold)
              << "): " << (dev.pass ? "PASS" : "FAIL") << "\n";
    return dev.pass ? 0 : 1;
}

int cmd_probe(const std::string& config_path) {
    ConfigMap cfg;
    if (!config_path.empty()) {
        cfg = load_config_file(config_path);
    }
    const SystemParams sys = cfg.empty() ? SystemParams{} : params_from_config(cfg);
    const ProbeParams pp = probe_params_from_config(cfg, sys);
    const ProbeFlags flags = probe_flags(pp, sys);
    const ReadoutMap map = make_readout_map(pp);

    const Matrix6 V = solve_lyapunov(drift_matrix(sys), diffusion_matrix(sys));
    const double e_ac = log_negativity(V, Bipartition::AC);
    const InferenceResult inf = infer_ac_entanglement(apply_readout_map(V, map), map);

    nlohmann::json j;
    j["alpha_p_sq"] = probe_steady(pp);
    j["gain"] = map.gain;
    j["flags"] = {
        {"detuning_matched", flags.detuning_matched},
        {"fast_atom_vs_decay", flags.fast_atom_vs_decay},
        {"fast_atom_vs_drive", flags.fast_atom_vs_drive},
        {"weak_vs_atom", flags.weak_vs_atom},
        {"weak_vs_coupling", flags.weak_vs_coupling},
        {"weak_vs_pump", flags.weak_vs_pump},
        {"adiabatic_ok", flags.adiabatic_ok},
        {"all_ok", flags.all_ok},
    };
    j["e_ac"] = e_ac;
    j["e_inferred"] = inf.e_inferred;
    j["reconstruction_physical"] = inf.physical;
    j["nu_min"] = inf.nu_min;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_stability_map(const std::string& preset, std::string out_base, int threads) {
    const FigurePreset fp = figure_preset(preset.empty() ? "fig2a" : preset);
    if (out_base.empty()) out_base = "stability-" + fp.name;

    SweepSpec spec = fp.spec;
    spec.name = "stability-" + fp.name;
    spec.fields = {"stability_margin"};

    const SweepTable table = run_sweep(fp.base, spec, threads);
    std::size_t unstable = 0;
    for (const SweepRow& row : table.rows) {
        if (row.error.empty() && !row.report.stable) ++unstable;
    }
    write_file(out_base + ".csv", sweep_to_csv(table));
    write_file(out_base + ".json", sweep_to_json(table));
    std::cout << out_base << ".csv\n" << out_base << ".json\n";
    std::cout << unstable << " of " << table.rows.size() << " grid points unstable\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary Gaussian state and entanglement structure of the "
                 "three-mode cavity/mirror/Bogoliubov system"};
    app.set_version_flag("--version", std::string(trimode::version_string));
    app.require_subcommand(1);

    std::string config_path, preset, spec_path, out_base, record_path;
    bool json_only = false;
    int threads = 0;
    std::uint64_t seed = 12345;
    int trajectories = 200;
    double dt_frac = 0.02;
    double burn_time = 25e-6;
    double sample_time = 100e-6;
    double z_threshold = 5.0;
    std::uint64_t record_stride = 25;

    auto* steady = app.add_subcommand("steady", "evaluate one parameter point");
    steady->add_option("-c,--config", config_path, "key = value parameter file");
    steady->add_flag("--json", json_only, "print only the report JSON");

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep (CSV + JSON)");
    auto* popt = sweep->add_option("--preset", preset, "figure preset: fig2a fig2b fig2c fig3a fig3b fig4");
    auto* sopt = sweep->add_option("--spec", spec_path, "sweep spec file (axis/axis2/fields + overrides)");
    sweep->add_option("-o,--out", out_base, "output base name (writes <base>.csv and <base>.json)");
    sweep->add_option("-t,--threads", threads, "worker threads (0 = auto)");
    popt->excludes(sopt);

    auto* verify = app.add_subcommand("verify", "stochastic-oracle check of the stationary solution");
    verify->add_option("-c,--config", config_path, "key = value parameter file");
    verify->add_option("--seed", seed, "RNG master seed");
    verify->add_option("-n,--trajectories", trajectories, "ensemble size");
    verify->add_option("--dt-frac", dt_frac, "dt as a fraction of the fastest timescale");
    verify->add_option("--burn-time", burn_time, "discarded transient per trajectory, s");
    verify->add_option("--sample-time", sample_time, "averaging window per trajectory, s");
    verify->add_option("-t,--threads", threads, "worker threads (0 = auto)");
    verify->add_option("-z,--z-threshold", z_threshold, "pass/fail bound on |z|");
    verify->add_option("--record", record_path, "dump sampled quadrature records to this file");
    verify->add_option("--record-stride", record_stride, "keep every k-th sampled state");

    auto* probe = app.add_subcommand("probe", "probe-readout validity flags and round trip");
    probe->add_option("-c,--config", config_path, "key = value parameter file (probe keys allowed)");

    auto* smap = app.add_subcommand("stability-map", "stability over a preset grid");
    smap->add_option("--preset", preset, "grid preset (default fig2a)");
    smap->add_option("-o,--out", out_base, "output base name");
    smap->add_option("-t,--threads", threads, "worker threads (0 = auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (steady->parsed()) return cmd_steady(config_path, json_only);
        if (sweep->parsed()) {
            if (preset.empty() && spec_path.empty()) {
                std::cerr << "sweep: need --preset or --spec\n";
                return 64;
            }
            return cmd_sweep(preset, spec_path, out_base, threads);
        }
        if (verify->parsed()) {
            return cmd_verify(config_path, seed, trajectories, dt_frac, burn_time,
                              sample_time, threads, z_threshold, record_path, record_stride);
        }
        if (probe->parsed()) return cmd_probe(config_path);
        if (smap->parsed()) return cmd_stability_map(preset, out_base, threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
