#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vodsim/simulator.hpp"

namespace vodsim {

/// Everything an output file must be reproducible from: the effective config
/// snapshot, the seed, and the tool version. Wall-clock duration is reported
/// on stdout only so identical runs stay byte-identical on disk.
struct RunManifest {
    std::string command;
    std::uint64_t seed;
    std::string version;
    std::string config_json;  // canonical single-line snapshot
    std::uint64_t config_hash;
    std::vector<std::string> output_paths;
    double wall_seconds = 0.0;
};

/// Parses the JSON config file into a SimulationConfig. Unknown keys and
/// malformed values raise std::runtime_error naming the offending field.
SimulationConfig load_config_file(const std::filesystem::path& path);

/// Applies the same schema to an in-memory JSON string (used for defaults and
/// tests).
SimulationConfig parse_config_json(const std::string& text);

/// Canonical single-line JSON snapshot of the effective configuration.
std::string config_to_json(const SimulationConfig& cfg);

/// FNV-1a hash of the canonical config snapshot.
std::uint64_t config_hash(const std::string& canonical_json);

std::string format_rho_label(double rho);

/// Writes one run's samples as comma-delimited text with a '#'-prefixed
/// manifest header. Columns: t, normalized_load, active, queued, rejected,
/// population_fraction.
void write_samples_csv(const std::filesystem::path& path, const RunManifest& manifest,
                       const std::vector<LoadSample>& samples);

/// Long-format sweep file: rho, t, normalized_load, active, queued.
void write_sweep_csv(const std::filesystem::path& path, const RunManifest& manifest,
                     const SweepResult& sweep);

/// Summary record serializers (one JSON object per run / sweep).
std::string run_summary_json(const RunManifest& manifest, const RunSummary& summary);
std::string sweep_summary_json(const RunManifest& manifest, const SweepResult& sweep);

}  // namespace vodsim
