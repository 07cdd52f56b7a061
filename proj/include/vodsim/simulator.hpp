#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vodsim/allocation.hpp"
#include "vodsim/bandwidth_model.hpp"
#include "vodsim/rng.hpp"

namespace vodsim {

enum class ViewerStatus { Active, Queued, Departed, Rejected };

struct ViewerState {
    int id;
    InteractiveMode mode;
    Kbps granted = 0;
    ViewerStatus status = ViewerStatus::Active;
    int ops_executed = 0;
    std::int64_t dwell_ticks_remaining = 0;
};

/// Full description of one simulation run. Defaults reproduce the reference
/// setup: viewers ramp exponentially from 0 to 1000 over 60 seconds on a
/// 1 Gbps trunk, five interactive modes with uniform switching probabilities,
/// ten operations per session with 5 s mean dwell.
struct SimulationConfig {
    double duration_s = 60.0;
    double tick_s = 0.1;
    int target_viewers = 1000;
    SessionSpec session{10, 5, {0.2, 0.2, 0.2, 0.2, 0.2}, 5};
    BandwidthConfig bandwidth{1000.0, 0.5, 4.0, 0.5};
    std::vector<double> demand_fractions = {1.0, 0.75, 0.5, 1.0, 0.0};
    int pause_mode = kPause;
    double dwell_mean_s = 5.0;
    std::uint64_t seed = 42;
    std::size_t queue_limit = 10000;
    bool persist = false;  // viewers never depart when set
    std::vector<double> sweep;

    void validate() const;
    std::int64_t total_ticks() const;
    ModeDemandTable derive_demand_table() const;
};

/// One tick's output record. normalized_load is aggregate granted bandwidth
/// over trunk capacity; population_fraction is the alternative
/// active-viewers-over-target reading.
struct LoadSample {
    double t;
    double normalized_load;
    double population_fraction;
    int active;
    int queued;
    int departed;
    std::int64_t rejected_cumulative;
    std::int64_t arrivals_cumulative;
};

struct RunSummary {
    double peak_load = 0.0;
    double mean_load = 0.0;
    std::int64_t total_arrivals = 0;
    std::int64_t total_rejected = 0;
    int final_active = 0;
    int final_queued = 0;
    int final_departed = 0;
};

struct SimulationResult {
    std::vector<LoadSample> samples;
    RunSummary summary;
};

/// Cumulative arrival curve: round(exp(r t) - 1) with
/// r = ln(target + 1) / duration, so N(0) = 0 and N(duration) = target.
std::int64_t arrival_count(double t, int target_viewers, double duration_s);
std::int64_t arrival_count(double t, const SimulationConfig& cfg);

/// Deterministic tick-loop simulator. Each step admits the new arrivals,
/// advances per-viewer dwell clocks, switches or departs expired viewers,
/// drains the proxy queue, and emits one LoadSample.
class SessionSimulator {
public:
    explicit SessionSimulator(const SimulationConfig& cfg);

    bool done() const { return tick_index_ >= total_ticks_; }
    std::int64_t tick_index() const { return tick_index_; }

    LoadSample step();

    const ChannelTable& channels() const { return channels_; }
    const std::vector<ViewerState>& viewers() const { return viewers_; }

private:
    void spawn_viewer();
    void apply_admissions(std::span<const QueueAdmission> admissions);
    std::int64_t sample_dwell_ticks();
    InteractiveMode sample_mode();
    LoadSample emit_sample(double t) const;

    SimulationConfig cfg_;
    ModeDemandTable demands_;
    ChannelTable channels_;
    Rng rng_;
    std::vector<ViewerState> viewers_;
    std::int64_t total_ticks_;
    std::int64_t tick_index_ = 0;
    std::int64_t arrivals_ = 0;
    std::int64_t rejected_ = 0;
};

SimulationResult run(const SimulationConfig& cfg);

struct SweepEntry {
    double rho;
    double w_max_mbps;
    std::uint64_t sub_seed;
    SimulationResult result;
};

struct SweepWarning {
    double rho;
    std::string message;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    std::vector<SweepWarning> warnings;
};

/// Runs one simulation per unified-demand-parameter value, holding the trunk
/// capacity and mode count fixed and solving w_max = rho * B / k. The demand
/// table is re-derived from the configured fractions at each rho; rho = 0
/// collapses every demand to the keep-alive reserve. Each run gets a
/// deterministic sub-seed. Values that put w_max outside [w_min, B] are
/// skipped with a warning record.
SweepResult run_sweep(const SimulationConfig& base, std::span<const double> rhos);

/// Preset sweep values: 6 values starting at 0.01 with step 0.02.
std::vector<double> sweep_preset_set1();
/// Preset sweep values: 0.0 through 1.0 with step 0.2.
std::vector<double> sweep_preset_set2();

}  // namespace vodsim
