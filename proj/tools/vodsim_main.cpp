#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vodsim/bandwidth_model.hpp"
#include "vodsim/config.hpp"
#include "vodsim/geometry.hpp"
#include "vodsim/simulator.hpp"
#include "vodsim/verify.hpp"
#include "vodsim/version.hpp"

namespace {

struct GlobalArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    std::string out_dir = "out";
    bool quick = false;
};

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

std::optional<std::uint64_t> seed_from_env() {
    const char* raw = std::getenv("VODSIM_SEED");
    if (raw == nullptr || *raw == '\0') {
        return std::nullopt;
    }
    char* end = nullptr;
    errno = 0;
    const unsigned long long value = std::strtoull(raw, &end, 10);
    if (errno != 0 || end == raw || *end != '\0') {
        throw std::runtime_error("VODSIM_SEED: not an unsigned integer: " +
                                 std::string(raw));
    }
    return value;
}

// Seed precedence: --seed flag, then VODSIM_SEED, then the config file.
vodsim::SimulationConfig effective_config(const GlobalArgs& args) {
    vodsim::SimulationConfig cfg = args.config_path.empty()
                                       ? vodsim::SimulationConfig{}
                                       : vodsim::load_config_file(args.config_path);
    if (const auto env_seed = seed_from_env()) {
        cfg.seed = *env_seed;
    }
    if (args.seed_flag) {
        cfg.seed = *args.seed_flag;
    }
    cfg.validate();
    return cfg;
}

vodsim::RunManifest make_manifest(const std::string& command,
                                  const vodsim::SimulationConfig& cfg) {
    vodsim::RunManifest manifest;
    manifest.command = command;
    manifest.seed = cfg.seed;
    manifest.version = vodsim::kVersion;
    manifest.config_json = vodsim::config_to_json(cfg);
    manifest.config_hash = vodsim::config_hash(manifest.config_json);
    return manifest;
}

int cmd_run(const GlobalArgs& args) {
    const vodsim::SimulationConfig cfg = effective_config(args);
    const auto started = std::chrono::steady_clock::now();
    const vodsim::SimulationResult result = vodsim::run(cfg);

    vodsim::RunManifest manifest = make_manifest("run", cfg);
    const std::filesystem::path out_path =
        std::filesystem::path(args.out_dir) / "run.csv";
    manifest.output_paths.push_back(out_path.string());
    vodsim::write_samples_csv(out_path, manifest, result.samples);

    manifest.wall_seconds = elapsed_seconds(started);
    std::cout << vodsim::run_summary_json(manifest, result.summary) << "\n";
    return 0;
}

int cmd_sweep(const GlobalArgs& args, const std::string& preset,
              const std::vector<double>& explicit_rhos) {
    const vodsim::SimulationConfig cfg = effective_config(args);

    std::vector<double> rhos;
    if (!preset.empty()) {
        rhos = preset == "set1" ? vodsim::sweep_preset_set1()
                                : vodsim::sweep_preset_set2();
    } else if (!explicit_rhos.empty()) {
        rhos = explicit_rhos;
    } else {
        rhos = cfg.sweep;
    }
    if (rhos.empty()) {
        throw std::runtime_error(
            "sweep: empty sweep list; give --preset, --rho, or a config 'sweep' key");
    }

    const auto started = std::chrono::steady_clock::now();
    const vodsim::SweepResult sweep = vodsim::run_sweep(cfg, rhos);
    for (const vodsim::SweepWarning& warning : sweep.warnings) {
        std::cerr << "sweep: rho " << vodsim::format_rho_label(warning.rho)
                  << " skipped: " << warning.message << "\n";
    }
    if (sweep.entries.empty()) {
        throw std::runtime_error("sweep: no runnable rho values");
    }

    vodsim::RunManifest manifest = make_manifest("sweep", cfg);
    const std::filesystem::path out_dir(args.out_dir);
    for (const vodsim::SweepEntry& entry : sweep.entries) {
        const std::string label = vodsim::format_rho_label(entry.rho);
        const std::filesystem::path path = out_dir / ("sweep_rho_" + label + ".csv");
        vodsim::RunManifest per_rho = make_manifest("sweep rho=" + label, cfg);
        per_rho.output_paths.push_back(path.string());
        vodsim::write_samples_csv(path, per_rho, entry.result.samples);
        manifest.output_paths.push_back(path.string());
    }
    const std::filesystem::path combined = out_dir / "sweep.csv";
    manifest.output_paths.push_back(combined.string());
    vodsim::write_sweep_csv(combined, manifest, sweep);

    manifest.wall_seconds = elapsed_seconds(started);
    std::cout << vodsim::sweep_summary_json(manifest, sweep) << "\n";
    return 0;
}

std::vector<std::vector<int>> parse_count_groups(const std::string& text) {
    std::vector<std::vector<int>> groups;
    std::vector<int> current;
    std::string token;
    auto flush_token = [&]() {
        if (token.empty()) {
            throw std::runtime_error("counts: empty entry in '" + text + "'");
        }
        std::size_t consumed = 0;
        const int value = std::stoi(token, &consumed);
        if (consumed != token.size()) {
            throw std::runtime_error("counts: not an integer: '" + token + "'");
        }
        current.push_back(value);
        token.clear();
    };
    for (char c : text) {
        if (c == ',') {
            flush_token();
        } else if (c == ';') {
            flush_token();
            groups.push_back(std::move(current));
            current.clear();
        } else {
            token += c;
        }
    }
    flush_token();
    groups.push_back(std::move(current));
    return groups;
}

int cmd_model_pmf(int m, const std::vector<double>& probs,
                  const std::vector<int>& counts) {
    const vodsim::SessionSpec spec(m, static_cast<int>(probs.size()), probs,
                                   static_cast<int>(probs.size()));
    const double value = vodsim::multinomial_pmf(vodsim::ModeCounts{counts}, spec);
    std::cout << "pmf=" << format_full(value) << "\n";
    return 0;
}

int cmd_model_joint(int m, const std::vector<double>& probs,
                    const std::string& counts_text) {
    const vodsim::SessionSpec spec(m, static_cast<int>(probs.size()), probs,
                                   static_cast<int>(probs.size()));
    std::vector<vodsim::ModeCounts> viewers;
    for (std::vector<int>& group : parse_count_groups(counts_text)) {
        viewers.push_back(vodsim::ModeCounts{std::move(group)});
    }
    const double value = vodsim::joint_session_probability(viewers, spec);
    std::cout << "joint=" << format_full(value) << "\n";
    return 0;
}

int cmd_model_volume(const GlobalArgs& args, bool simplex, int k, double radius,
                     double budget, double lo, double hi, std::int64_t mc_samples) {
    if (!simplex) {
        std::cout << "volume=" << format_full(vodsim::ball_volume(k, radius)) << "\n";
        return 0;
    }
    const vodsim::ConstraintRegion region(k, budget, lo, hi);
    std::cout << "volume=" << format_full(vodsim::capped_simplex_volume(region))
              << "\n";
    if (mc_samples > 0) {
        const std::uint64_t seed = args.seed_flag.value_or(
            seed_from_env().value_or(vodsim::SimulationConfig{}.seed));
        const vodsim::McVolumeEstimate mc =
            vodsim::mc_volume(region, mc_samples, seed);
        std::cout << "mc=" << format_full(mc.estimate) << "\n";
        std::cout << "stderr=" << format_full(mc.std_error) << "\n";
        std::cout << "hits=" << mc.hits << "\n";
        std::cout << "samples=" << mc.samples << "\n";
    }
    return 0;
}

int cmd_model_conditional(const GlobalArgs& args, const std::vector<double>& demands,
                          int active, double session_bandwidth,
                          std::optional<double> w_max_flag,
                          std::optional<double> reserve_flag) {
    const vodsim::SimulationConfig cfg = effective_config(args);
    const double w_max = w_max_flag.value_or(cfg.bandwidth.w_max);
    const double reserve = reserve_flag.value_or(cfg.bandwidth.reserve);
    // Only w_max and the reserve feed the formula; the rest of the
    // BandwidthConfig is completed so its own invariants hold.
    const vodsim::BandwidthConfig bw(std::max(cfg.bandwidth.trunk, w_max), reserve,
                                     w_max, reserve);
    const vodsim::ModeDemandVector demand(demands, active);
    const vodsim::ConditionalProbability p =
        vodsim::conditional_mode_probability(demand, bw, session_bandwidth);
    std::cout << "raw=" << format_full(p.raw) << "\n";
    std::cout << "value=" << format_full(p.value) << "\n";
    return 0;
}

int cmd_verify(const GlobalArgs& args, bool negative_control) {
    vodsim::VerifyOptions options;
    options.quick = args.quick;
    options.negative_control = negative_control;
    const std::vector<vodsim::VerifyCheck> checks = vodsim::run_verify(options);
    int passed = 0;
    for (const vodsim::VerifyCheck& check : checks) {
        std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": "
                  << check.detail << "\n";
        passed += check.passed ? 1 : 0;
    }
    std::cout << "verify: " << passed << "/" << checks.size() << " checks passed\n";
    return vodsim::all_passed(checks) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vodsim: interactive video-on-demand bandwidth model and simulator"};
    app.set_version_flag("--version", std::string("vodsim ") + vodsim::kVersion);
    app.require_subcommand(1);

    GlobalArgs global;
    std::uint64_t seed_value = 0;
    app.add_option("--config", global.config_path, "JSON config file");
    auto* seed_opt =
        app.add_option("--seed", seed_value, "Override the seed (beats VODSIM_SEED)");
    app.add_option("--out", global.out_dir, "Output directory")
        ->capture_default_str();
    app.add_flag("--quick", global.quick, "Reduced Monte Carlo sample counts");

    auto* run_cmd = app.add_subcommand("run", "Single simulation run");
    run_cmd->fallthrough();

    auto* sweep_cmd =
        app.add_subcommand("sweep", "One run per unified demand parameter value");
    sweep_cmd->fallthrough();
    std::string preset;
    std::vector<double> explicit_rhos;
    auto* preset_opt = sweep_cmd->add_option("--preset", preset, "set1 or set2")
                           ->check(CLI::IsMember({"set1", "set2"}));
    sweep_cmd->add_option("--rho", explicit_rhos, "Explicit rho list")
        ->delimiter(',')
        ->excludes(preset_opt);

    auto* model_cmd = app.add_subcommand("model", "Print analytic model quantities");
    model_cmd->fallthrough();
    model_cmd->require_subcommand(1);

    auto* pmf_cmd = model_cmd->add_subcommand("pmf", "Multinomial mode probability");
    pmf_cmd->fallthrough();
    int pmf_m = 0;
    std::vector<double> pmf_probs;
    std::vector<int> pmf_counts;
    pmf_cmd->add_option("--m", pmf_m, "Observations per session")->required();
    pmf_cmd->add_option("--probs", pmf_probs, "Mode probabilities")
        ->delimiter(',')
        ->required();
    pmf_cmd->add_option("--counts", pmf_counts, "Per-mode counts")
        ->delimiter(',')
        ->required();

    auto* joint_cmd =
        model_cmd->add_subcommand("joint", "Joint probability over viewers");
    joint_cmd->fallthrough();
    int joint_m = 0;
    std::vector<double> joint_probs;
    std::string joint_counts;
    joint_cmd->add_option("--m", joint_m, "Observations per session")->required();
    joint_cmd->add_option("--probs", joint_probs, "Mode probabilities")
        ->delimiter(',')
        ->required();
    joint_cmd
        ->add_option("--counts", joint_counts,
                     "Per-viewer counts, viewers separated by ';' (e.g. 1,1;2,0)")
        ->required();

    auto* volume_cmd = model_cmd->add_subcommand("volume", "Ball or simplex volume");
    volume_cmd->fallthrough();
    bool simplex = false;
    int vol_k = 0;
    double vol_r = 1.0;
    double vol_w = 0.0;
    double vol_lo = 0.0;
    double vol_hi = 0.0;
    std::int64_t mc_samples = 0;
    volume_cmd->add_flag("--simplex", simplex, "Capped simplex instead of a ball");
    volume_cmd->add_option("--k", vol_k, "Dimension")->required();
    auto* r_opt = volume_cmd->add_option("--r", vol_r, "Ball radius");
    auto* w_opt = volume_cmd->add_option("--w", vol_w, "Simplex budget");
    volume_cmd->add_option("--lo", vol_lo, "Lower coordinate bound")
        ->capture_default_str();
    auto* hi_opt = volume_cmd->add_option("--hi", vol_hi, "Upper coordinate bound");
    volume_cmd->add_option("--mc-samples", mc_samples,
                           "Also print a Monte Carlo estimate from this many samples");

    auto* cond_cmd = model_cmd->add_subcommand(
        "conditional", "Conditional probability of one interactive sub-session");
    cond_cmd->fallthrough();
    std::vector<double> cond_demands;
    int cond_active = 0;
    double cond_w = 0.0;
    double cond_w_max = 0.0;
    double cond_reserve = 0.0;
    cond_cmd->add_option("--demands", cond_demands, "Per-mode demands (Mbps)")
        ->delimiter(',')
        ->required();
    cond_cmd->add_option("--active", cond_active, "Active mode index (1-based)")
        ->required();
    cond_cmd->add_option("--w", cond_w, "Session bandwidth W (Mbps)")->required();
    auto* w_max_opt = cond_cmd->add_option("--w-max", cond_w_max, "Override w_max");
    auto* reserve_opt =
        cond_cmd->add_option("--reserve", cond_reserve, "Override the reserve");

    auto* verify_cmd =
        app.add_subcommand("verify", "Run the oracle cross-check battery");
    verify_cmd->fallthrough();
    bool negative_control = false;
    verify_cmd->add_flag("--negative-control", negative_control,
                         "Corrupt a demand table fixture; the conservation check "
                         "must then fail");

    CLI11_PARSE(app, argc, argv);

    if (seed_opt->count() > 0) {
        global.seed_flag = seed_value;
    }

    try {
        if (*run_cmd) {
            return cmd_run(global);
        }
        if (*sweep_cmd) {
            return cmd_sweep(global, preset, explicit_rhos);
        }
        if (*pmf_cmd) {
            return cmd_model_pmf(pmf_m, pmf_probs, pmf_counts);
        }
        if (*joint_cmd) {
            return cmd_model_joint(joint_m, joint_probs, joint_counts);
        }
        if (*volume_cmd) {
            if (simplex && (w_opt->count() == 0 || hi_opt->count() == 0)) {
                throw std::runtime_error("volume: --simplex needs --w and --hi");
            }
            if (!simplex && r_opt->count() == 0) {
                throw std::runtime_error("volume: ball volume needs --r");
            }
            return cmd_model_volume(global, simplex, vol_k, vol_r, vol_w, vol_lo,
                                    vol_hi, mc_samples);
        }
        if (*cond_cmd) {
            return cmd_model_conditional(
                global, cond_demands, cond_active, cond_w,
                w_max_opt->count() > 0 ? std::optional<double>(cond_w_max)
                                       : std::nullopt,
                reserve_opt->count() > 0 ? std::optional<double>(cond_reserve)
                                         : std::nullopt);
        }
        if (*verify_cmd) {
            return cmd_verify(global, negative_control);
        }
    } catch (const std::exception& e) {
        std::cerr << "vodsim: error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "vodsim: no command\n";
    return 1;
}
