#include "vodsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vodsim {

void SimulationConfig::validate() const {
    if (!(duration_s > 0.0)) {
        throw std::invalid_argument("SimulationConfig: duration must be positive");
    }
    if (!(tick_s > 0.0) || tick_s > duration_s) {
        throw std::invalid_argument("SimulationConfig: require 0 < tick <= duration");
    }
    if (target_viewers < 0) {
        throw std::invalid_argument("SimulationConfig: target viewers must be >= 0");
    }
    if (!(dwell_mean_s > 0.0)) {
        throw std::invalid_argument("SimulationConfig: dwell mean must be positive");
    }
    if (static_cast<int>(demand_fractions.size()) != session.k()) {
        throw std::invalid_argument(
            "SimulationConfig: demand fractions size must equal mode count");
    }
    if (pause_mode < 0 || pause_mode > session.k()) {
        throw std::invalid_argument("SimulationConfig: pause mode index out of range");
    }
    for (double rho : sweep) {
        if (rho < 0.0) {
            throw std::invalid_argument("SimulationConfig: sweep values must be >= 0");
        }
    }
}

std::int64_t SimulationConfig::total_ticks() const {
    return std::llround(duration_s / tick_s);
}

ModeDemandTable SimulationConfig::derive_demand_table() const {
    return ModeDemandTable::from_fractions(bandwidth, demand_fractions, pause_mode);
}

std::int64_t arrival_count(double t, int target_viewers, double duration_s) {
    if (t < 0.0 || t > duration_s) {
        throw std::out_of_range("arrival_count: t outside [0, duration]");
    }
    const double rate = std::log(static_cast<double>(target_viewers) + 1.0) / duration_s;
    return std::llround(std::exp(rate * t) - 1.0);
}

std::int64_t arrival_count(double t, const SimulationConfig& cfg) {
    return arrival_count(t, cfg.target_viewers, cfg.duration_s);
}

namespace {

const SimulationConfig& validated(const SimulationConfig& cfg) {
    cfg.validate();
    return cfg;
}

}  // namespace

SessionSimulator::SessionSimulator(const SimulationConfig& cfg)
    : cfg_(validated(cfg)), demands_(cfg.derive_demand_table()),
      channels_(cfg.bandwidth, cfg.queue_limit), rng_(cfg.seed),
      total_ticks_(cfg.total_ticks()) {
    viewers_.reserve(static_cast<std::size_t>(cfg_.target_viewers));
}

std::int64_t SessionSimulator::sample_dwell_ticks() {
    const double dwell_s = rng_.exponential(cfg_.dwell_mean_s);
    return std::max<std::int64_t>(1, std::llround(dwell_s / cfg_.tick_s));
}

InteractiveMode SessionSimulator::sample_mode() {
    return InteractiveMode(rng_.categorical(cfg_.session.probs()) + 1);
}

void SessionSimulator::spawn_viewer() {
    const int id = static_cast<int>(viewers_.size());
    ViewerState viewer{id, sample_mode()};
    if (cfg_.session.m() == 0) {
        // Degenerate session with nothing to observe; arrives and leaves.
        viewer.status = ViewerStatus::Departed;
        viewers_.push_back(viewer);
        return;
    }
    viewer.ops_executed = 1;  // the initial mode is the first observed operation
    const AllocationDecision decision =
        channels_.admit(id, viewer.mode, demands_, tick_index_);
    switch (decision.kind) {
        case DecisionKind::Full:
        case DecisionKind::Adjusted:
        case DecisionKind::Floor:
            viewer.status = ViewerStatus::Active;
            viewer.granted = decision.granted;
            viewer.dwell_ticks_remaining = sample_dwell_ticks();
            break;
        case DecisionKind::Queued:
            viewer.status = ViewerStatus::Queued;
            break;
        case DecisionKind::Rejected:
            viewer.status = ViewerStatus::Rejected;
            ++rejected_;
            break;
    }
    viewers_.push_back(viewer);
}

void SessionSimulator::apply_admissions(std::span<const QueueAdmission> admissions) {
    for (const QueueAdmission& admission : admissions) {
        ViewerState& viewer = viewers_[static_cast<std::size_t>(admission.viewer_id)];
        viewer.status = ViewerStatus::Active;
        viewer.granted = admission.granted;
        viewer.dwell_ticks_remaining = sample_dwell_ticks();
    }
}

LoadSample SessionSimulator::emit_sample(double t) const {
    int active = 0;
    int queued = 0;
    int departed = 0;
    std::int64_t rejected = 0;
    for (const ViewerState& viewer : viewers_) {
        switch (viewer.status) {
            case ViewerStatus::Active: ++active; break;
            case ViewerStatus::Queued: ++queued; break;
            case ViewerStatus::Departed: ++departed; break;
            case ViewerStatus::Rejected: ++rejected; break;
        }
    }
    if (active + queued + departed + rejected != arrivals_) {
        throw std::logic_error("SessionSimulator: viewer accounting out of sync");
    }
    if (rejected != rejected_) {
        throw std::logic_error("SessionSimulator: rejection count out of sync");
    }
    const double load = static_cast<double>(channels_.allocated_total()) /
                        static_cast<double>(channels_.capacity());
    if (load < 0.0 || load > 1.0) {
        throw std::logic_error("SessionSimulator: normalized load outside [0, 1]");
    }
    const double population =
        cfg_.target_viewers > 0
            ? static_cast<double>(active) / static_cast<double>(cfg_.target_viewers)
            : 0.0;
    return LoadSample{t,      load,     population, active,
                      queued, departed, rejected_,  arrivals_};
}

LoadSample SessionSimulator::step() {
    if (done()) {
        throw std::logic_error("SessionSimulator: stepping past the run duration");
    }
    ++tick_index_;
    const double t = tick_index_ == total_ticks_
                         ? cfg_.duration_s
                         : static_cast<double>(tick_index_) * cfg_.tick_s;

    // 1. Admit the new arrivals for this tick.
    const std::int64_t target_count = arrival_count(t, cfg_);
    while (arrivals_ < target_count) {
        spawn_viewer();
        ++arrivals_;
    }

    // 2. Advance dwell clocks; switch or depart expired viewers in id order.
    for (ViewerState& viewer : viewers_) {
        if (viewer.status != ViewerStatus::Active) {
            continue;
        }
        if (--viewer.dwell_ticks_remaining > 0) {
            continue;
        }
        if (viewer.ops_executed < cfg_.session.m() || cfg_.persist) {
            const InteractiveMode next = sample_mode();
            const auto outcome =
                channels_.switch_mode(viewer.id, next, demands_, tick_index_);
            viewer.mode = next;
            viewer.granted = outcome.decision.granted;
            viewer.ops_executed = std::min(viewer.ops_executed + 1, cfg_.session.m());
            viewer.dwell_ticks_remaining = sample_dwell_ticks();
            apply_admissions(outcome.admitted);
        } else {
            const auto outcome = channels_.release(viewer.id, demands_, tick_index_);
            viewer.status = ViewerStatus::Departed;
            viewer.granted = 0;
            apply_admissions(outcome.admitted);
        }
    }

    // 3. Drain anything the queue can now fit.
    apply_admissions(channels_.drain(demands_, tick_index_));

    // 4. Emit the sample for this tick.
    return emit_sample(t);
}

SimulationResult run(const SimulationConfig& cfg) {
    cfg.validate();
    SessionSimulator sim(cfg);
    SimulationResult out;
    out.samples.reserve(static_cast<std::size_t>(cfg.total_ticks()));
    while (!sim.done()) {
        out.samples.push_back(sim.step());
    }

    RunSummary& summary = out.summary;
    double load_sum = 0.0;
    for (const LoadSample& sample : out.samples) {
        summary.peak_load = std::max(summary.peak_load, sample.normalized_load);
        load_sum += sample.normalized_load;
    }
    if (!out.samples.empty()) {
        summary.mean_load = load_sum / static_cast<double>(out.samples.size());
        const LoadSample& last = out.samples.back();
        summary.total_arrivals = last.arrivals_cumulative;
        summary.total_rejected = last.rejected_cumulative;
        summary.final_active = last.active;
        summary.final_queued = last.queued;
        summary.final_departed = last.departed;
    }
    return out;
}

SweepResult run_sweep(const SimulationConfig& base, std::span<const double> rhos) {
    if (rhos.empty()) {
        throw std::invalid_argument("run_sweep: empty sweep list");
    }
    base.validate();
    SweepResult out;
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        const double rho = rhos[i];
        if (rho < 0.0) {
            throw std::invalid_argument("run_sweep: sweep values must be >= 0");
        }
        SimulationConfig cfg = base;
        cfg.seed = derive_subseed(base.seed, i);
        cfg.sweep.clear();
        if (rho == 0.0) {
            // Zero offered demand: every mode holds only the keep-alive
            // reserve, which also becomes the connection floor.
            cfg.bandwidth = BandwidthConfig(base.bandwidth.trunk, base.bandwidth.reserve,
                                            base.bandwidth.reserve, base.bandwidth.reserve);
        } else {
            const double w_max =
                rho * base.bandwidth.trunk / static_cast<double>(base.session.k());
            if (w_max < base.bandwidth.w_min) {
                out.warnings.push_back(SweepWarning{
                    rho, "w_max below w_min at this demand parameter; run skipped"});
                continue;
            }
            if (w_max > base.bandwidth.trunk) {
                out.warnings.push_back(SweepWarning{
                    rho, "w_max above trunk capacity at this demand parameter; run skipped"});
                continue;
            }
            cfg.bandwidth = BandwidthConfig(base.bandwidth.trunk, base.bandwidth.w_min,
                                            w_max, base.bandwidth.reserve);
        }
        out.entries.push_back(
            SweepEntry{rho, cfg.bandwidth.w_max, cfg.seed, run(cfg)});
    }
    return out;
}

std::vector<double> sweep_preset_set1() {
    std::vector<double> values;
    for (int i = 0; i < 6; ++i) {
        values.push_back(static_cast<double>(2 * i + 1) / 100.0);
    }
    return values;
}

std::vector<double> sweep_preset_set2() {
    std::vector<double> values;
    for (int i = 0; i <= 5; ++i) {
        values.push_back(static_cast<double>(2 * i) / 10.0);
    }
    return values;
}

}  // namespace vodsim
