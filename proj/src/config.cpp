#include "vodsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vodsim/version.hpp"

namespace vodsim {

using nlohmann::json;

namespace {

std::string qualified(const std::string& section_name, const std::string& key) {
    return section_name.empty() ? key : section_name + "." + key;
}

void reject_unknown_keys(const json& section, const std::string& name,
                         const std::set<std::string>& allowed) {
    for (const auto& item : section.items()) {
        if (!allowed.contains(item.key())) {
            throw std::runtime_error("config: unknown key '" + qualified(name, item.key()) +
                                     "'");
        }
    }
}

template <typename T>
T field_or(const json& section, const std::string& section_name, const char* key,
           T fallback) {
    if (!section.contains(key)) {
        return fallback;
    }
    try {
        return section.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::runtime_error("config: invalid value for '" +
                                 qualified(section_name, key) + "'");
    }
}

}  // namespace

SimulationConfig parse_config_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("config: not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw std::runtime_error("config: top level must be an object");
    }
    reject_unknown_keys(root, "",
                        {"simulation", "bandwidth", "session", "demands", "sweep"});

    SimulationConfig cfg;

    const json sim = root.value("simulation", json::object());
    reject_unknown_keys(sim, "simulation",
                        {"duration_s", "tick_s", "target_viewers", "seed",
                         "dwell_mean_s", "persist", "queue_limit"});
    cfg.duration_s = field_or(sim, "simulation", "duration_s", cfg.duration_s);
    cfg.tick_s = field_or(sim, "simulation", "tick_s", cfg.tick_s);
    cfg.target_viewers = field_or(sim, "simulation", "target_viewers", cfg.target_viewers);
    cfg.seed = field_or(sim, "simulation", "seed", cfg.seed);
    cfg.dwell_mean_s = field_or(sim, "simulation", "dwell_mean_s", cfg.dwell_mean_s);
    cfg.persist = field_or(sim, "simulation", "persist", cfg.persist);
    cfg.queue_limit = field_or(sim, "simulation", "queue_limit", cfg.queue_limit);

    const json bw = root.value("bandwidth", json::object());
    reject_unknown_keys(bw, "bandwidth",
                        {"trunk_mbps", "w_min_mbps", "w_max_mbps", "reserve_mbps"});
    const double trunk = field_or(bw, "bandwidth", "trunk_mbps", cfg.bandwidth.trunk);
    const double w_min = field_or(bw, "bandwidth", "w_min_mbps", cfg.bandwidth.w_min);
    const double w_max = field_or(bw, "bandwidth", "w_max_mbps", cfg.bandwidth.w_max);
    const double reserve = field_or(bw, "bandwidth", "reserve_mbps", cfg.bandwidth.reserve);
    try {
        cfg.bandwidth = BandwidthConfig(trunk, w_min, w_max, reserve);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("config: bandwidth: ") + e.what());
    }

    const json session = root.value("session", json::object());
    reject_unknown_keys(session, "session",
                        {"observations", "modes", "probs", "executable_modes"});
    const int m = field_or(session, "session", "observations", cfg.session.m());
    const int k = field_or(session, "session", "modes", cfg.session.k());
    std::vector<double> probs =
        field_or(session, "session", "probs", cfg.session.probs());
    if (!session.contains("probs") && k != cfg.session.k()) {
        probs.assign(static_cast<std::size_t>(k), 1.0 / static_cast<double>(k));
    }
    const int executable =
        field_or(session, "session", "executable_modes",
                 k == cfg.session.k() ? cfg.session.executable_modes() : k);
    try {
        cfg.session = SessionSpec(m, k, std::move(probs), executable);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("config: session: ") + e.what());
    }

    const json demands = root.value("demands", json::object());
    reject_unknown_keys(demands, "demands", {"fractions", "pause_mode"});
    if (demands.contains("fractions")) {
        cfg.demand_fractions =
            field_or(demands, "demands", "fractions", cfg.demand_fractions);
    } else if (cfg.session.k() != static_cast<int>(cfg.demand_fractions.size())) {
        throw std::runtime_error(
            "config: demands.fractions is required when session.modes != 5");
    }
    cfg.pause_mode = field_or(demands, "demands", "pause_mode",
                              cfg.session.k() >= kPause ? kPause : 0);

    cfg.sweep = field_or(root, "", "sweep", cfg.sweep);

    try {
        cfg.validate();
        cfg.derive_demand_table();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }
    return cfg;
}

SimulationConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("config: cannot read '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_json(buffer.str());
}

std::string config_to_json(const SimulationConfig& cfg) {
    json root;
    root["simulation"] = {{"duration_s", cfg.duration_s},
                          {"tick_s", cfg.tick_s},
                          {"target_viewers", cfg.target_viewers},
                          {"seed", cfg.seed},
                          {"dwell_mean_s", cfg.dwell_mean_s},
                          {"persist", cfg.persist},
                          {"queue_limit", cfg.queue_limit}};
    root["bandwidth"] = {{"trunk_mbps", cfg.bandwidth.trunk},
                         {"w_min_mbps", cfg.bandwidth.w_min},
                         {"w_max_mbps", cfg.bandwidth.w_max},
                         {"reserve_mbps", cfg.bandwidth.reserve}};
    root["session"] = {{"observations", cfg.session.m()},
                       {"modes", cfg.session.k()},
                       {"probs", cfg.session.probs()},
                       {"executable_modes", cfg.session.executable_modes()}};
    root["demands"] = {{"fractions", cfg.demand_fractions},
                       {"pause_mode", cfg.pause_mode}};
    if (!cfg.sweep.empty()) {
        root["sweep"] = cfg.sweep;
    }
    return root.dump();
}

std::uint64_t config_hash(const std::string& canonical_json) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_json) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string format_rho_label(double rho) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", rho);
    return buf;
}

namespace {

void write_manifest_header(std::ostream& out, const RunManifest& manifest,
                           const char* columns) {
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(manifest.config_hash));
    out << "# vodsim " << manifest.version << "\n";
    out << "# command: " << manifest.command << "\n";
    out << "# seed: " << manifest.seed << "\n";
    out << "# config_hash: " << hash_buf << "\n";
    out << "# config: " << manifest.config_json << "\n";
    out << "# columns: " << columns << "\n";
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return out;
}

void write_sample_row(std::ostream& out, const LoadSample& s) {
    char row[160];
    std::snprintf(row, sizeof(row), "%.3f,%.9f,%d,%d,%lld,%.9f\n", s.t,
                  s.normalized_load, s.active, s.queued,
                  static_cast<long long>(s.rejected_cumulative),
                  s.population_fraction);
    out << row;
}

}  // namespace

void write_samples_csv(const std::filesystem::path& path, const RunManifest& manifest,
                       const std::vector<LoadSample>& samples) {
    std::ofstream out = open_output(path);
    write_manifest_header(out, manifest,
                          "t,normalized_load,active,queued,rejected,population_fraction");
    for (const LoadSample& s : samples) {
        write_sample_row(out, s);
    }
}

void write_sweep_csv(const std::filesystem::path& path, const RunManifest& manifest,
                     const SweepResult& sweep) {
    std::ofstream out = open_output(path);
    write_manifest_header(out, manifest, "rho,t,normalized_load,active,queued");
    for (const SweepEntry& entry : sweep.entries) {
        for (const LoadSample& s : entry.result.samples) {
            char row[160];
            std::snprintf(row, sizeof(row), "%s,%.3f,%.9f,%d,%d\n",
                          format_rho_label(entry.rho).c_str(), s.t, s.normalized_load,
                          s.active, s.queued);
            out << row;
        }
    }
}

std::string run_summary_json(const RunManifest& manifest, const RunSummary& summary) {
    json out;
    out["command"] = manifest.command;
    out["version"] = manifest.version;
    out["seed"] = manifest.seed;
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(manifest.config_hash));
    out["config_hash"] = hash_buf;
    out["outputs"] = manifest.output_paths;
    out["wall_seconds"] = manifest.wall_seconds;
    out["peak_load"] = summary.peak_load;
    out["mean_load"] = summary.mean_load;
    out["total_arrivals"] = summary.total_arrivals;
    out["total_rejected"] = summary.total_rejected;
    out["final_active"] = summary.final_active;
    out["final_queued"] = summary.final_queued;
    out["final_departed"] = summary.final_departed;
    return out.dump();
}

std::string sweep_summary_json(const RunManifest& manifest, const SweepResult& sweep) {
    json out;
    out["command"] = manifest.command;
    out["version"] = manifest.version;
    out["seed"] = manifest.seed;
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(manifest.config_hash));
    out["config_hash"] = hash_buf;
    out["outputs"] = manifest.output_paths;
    out["wall_seconds"] = manifest.wall_seconds;
    json entries = json::array();
    for (const SweepEntry& entry : sweep.entries) {
        entries.push_back({{"rho", entry.rho},
                           {"w_max_mbps", entry.w_max_mbps},
                           {"sub_seed", entry.sub_seed},
                           {"peak_load", entry.result.summary.peak_load},
                           {"mean_load", entry.result.summary.mean_load},
                           {"total_rejected", entry.result.summary.total_rejected}});
    }
    out["entries"] = entries;
    json warnings = json::array();
    for (const SweepWarning& warning : sweep.warnings) {
        warnings.push_back({{"rho", warning.rho}, {"message", warning.message}});
    }
    out["warnings"] = warnings;
    return out.dump();
}

}  // namespace vodsim
