#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "vodsim/simulator.hpp"

using namespace vodsim;

namespace {

SimulationConfig small_config() {
    SimulationConfig cfg;
    cfg.duration_s = 10.0;
    cfg.target_viewers = 100;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("arrival curve endpoints and shape") {
    CHECK(arrival_count(0.0, 1000, 60.0) == 0);
    CHECK(arrival_count(60.0, 1000, 60.0) == 1000);
    CHECK(arrival_count(30.0, 1000, 60.0) == 31);  // exp midpoint, sqrt(1001) - 1

    std::int64_t previous = 0;
    for (int i = 0; i <= 600; ++i) {
        const std::int64_t n = arrival_count(0.1 * i, 1000, 60.0);
        CHECK(n >= previous);
        previous = n;
    }
    CHECK_THROWS_AS(arrival_count(-0.1, 1000, 60.0), std::out_of_range);
    CHECK_THROWS_AS(arrival_count(60.1, 1000, 60.0), std::out_of_range);
}

TEST_CASE("config validation") {
    SimulationConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.total_ticks() == 600);

    cfg.tick_s = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SimulationConfig{};
    cfg.duration_s = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SimulationConfig{};
    cfg.demand_fractions = {1.0, 0.5};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SimulationConfig{};
    cfg.pause_mode = 9;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SimulationConfig{};
    cfg.sweep = {-0.5};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("run emits one sample per tick") {
    const SimulationConfig cfg = small_config();
    const SimulationResult result = run(cfg);
    REQUIRE(result.samples.size() == 100);
    CHECK(result.samples.front().t == doctest::Approx(0.1));
    CHECK(result.samples.back().t == doctest::Approx(10.0));
    CHECK(result.samples.back().arrivals_cumulative == 100);
    CHECK(result.summary.total_arrivals == 100);

    for (const LoadSample& s : result.samples) {
        CHECK(s.normalized_load >= 0.0);
        CHECK(s.normalized_load <= 1.0);
        CHECK(s.active + s.queued + s.departed + s.rejected_cumulative ==
              s.arrivals_cumulative);
    }
    CHECK(result.summary.peak_load <= 1.0);
    CHECK(result.summary.peak_load >= result.summary.mean_load);
}

TEST_CASE("stepping past the end throws") {
    SessionSimulator sim(small_config());
    while (!sim.done()) {
        sim.step();
    }
    CHECK_THROWS_AS(sim.step(), std::logic_error);
}

TEST_CASE("runs are deterministic in the seed") {
    const SimulationConfig cfg = small_config();
    const SimulationResult a = run(cfg);
    const SimulationResult b = run(cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].normalized_load == b.samples[i].normalized_load);
        CHECK(a.samples[i].active == b.samples[i].active);
        CHECK(a.samples[i].queued == b.samples[i].queued);
        CHECK(a.samples[i].departed == b.samples[i].departed);
    }

    SimulationConfig other = cfg;
    other.seed = 8;
    const SimulationResult c = run(other);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        any_difference = any_difference ||
                         a.samples[i].normalized_load != c.samples[i].normalized_load;
    }
    CHECK(any_difference);
}

TEST_CASE("viewers depart after their operations unless persistent") {
    SimulationConfig cfg = small_config();
    cfg.duration_s = 40.0;
    cfg.target_viewers = 30;
    cfg.session = SessionSpec(3, 5, {0.2, 0.2, 0.2, 0.2, 0.2}, 5);
    cfg.dwell_mean_s = 1.0;
    const SimulationResult finite = run(cfg);
    CHECK(finite.summary.final_departed > 0);

    cfg.persist = true;
    const SimulationResult persistent = run(cfg);
    CHECK(persistent.summary.final_departed == 0);
    CHECK(persistent.summary.final_active +
              persistent.summary.final_queued ==
          persistent.summary.total_arrivals -
              persistent.summary.total_rejected);
}

TEST_CASE("zero-observation sessions pass through") {
    SimulationConfig cfg = small_config();
    cfg.session = SessionSpec(0, 5, {0.2, 0.2, 0.2, 0.2, 0.2}, 5);
    const SimulationResult result = run(cfg);
    CHECK(result.summary.final_departed == result.summary.total_arrivals);
    CHECK(result.summary.peak_load == 0.0);
}

TEST_CASE("a congested trunk queues and rejects") {
    SimulationConfig cfg = small_config();
    cfg.bandwidth = BandwidthConfig(5.0, 0.5, 4.0, 0.5);
    cfg.target_viewers = 200;
    cfg.queue_limit = 5;
    cfg.persist = true;
    const SimulationResult result = run(cfg);
    CHECK(result.summary.final_queued > 0);
    CHECK(result.summary.final_queued <= 5);
    CHECK(result.summary.total_rejected > 0);
    CHECK(result.summary.peak_load <= 1.0);
}

TEST_CASE("sweep presets") {
    const std::vector<double> set1 = sweep_preset_set1();
    const std::vector<double> set2 = sweep_preset_set2();
    CHECK((set1 == std::vector<double>{0.01, 0.03, 0.05, 0.07, 0.09, 0.11}));
    CHECK((set2 == std::vector<double>{0.0, 0.2, 0.4, 0.6, 0.8, 1.0}));
}

TEST_CASE("sweep solves w_max from the demand parameter") {
    SimulationConfig base = small_config();
    base.duration_s = 5.0;
    base.target_viewers = 20;
    const SweepResult sweep = run_sweep(base, sweep_preset_set2());
    REQUIRE(sweep.entries.size() == 6);
    CHECK(sweep.warnings.empty());

    // rho = 0 pins demands at the reserve; others solve w_max = rho B / k.
    CHECK(sweep.entries[0].w_max_mbps == doctest::Approx(0.5));
    CHECK(sweep.entries[1].w_max_mbps == doctest::Approx(40.0));
    CHECK(sweep.entries[5].w_max_mbps == doctest::Approx(200.0));

    std::set<std::uint64_t> seeds;
    for (const SweepEntry& entry : sweep.entries) {
        seeds.insert(entry.sub_seed);
        CHECK(entry.result.samples.size() == 50);
    }
    CHECK(seeds.size() == 6);  // distinct per-entry sub-seeds

    // The rho = 0 run carries only keep-alive traffic.
    CHECK(sweep.entries[0].result.summary.peak_load <=
          sweep.entries[5].result.summary.peak_load);

    CHECK_THROWS_AS(run_sweep(base, {}), std::invalid_argument);
}

TEST_CASE("sweep skips unreachable demand parameters") {
    SimulationConfig base = small_config();
    base.duration_s = 2.0;
    base.target_viewers = 5;
    const std::vector<double> rhos = {0.001, 0.2, 7.0};
    const SweepResult sweep = run_sweep(base, rhos);
    REQUIRE(sweep.entries.size() == 1);
    CHECK(sweep.entries[0].rho == 0.2);
    REQUIRE(sweep.warnings.size() == 2);
    CHECK(sweep.warnings[0].rho == 0.001);
    CHECK(sweep.warnings[1].rho == 7.0);
}

TEST_CASE("population fraction tracks active viewers") {
    const SimulationConfig cfg = small_config();
    const SimulationResult result = run(cfg);
    for (const LoadSample& s : result.samples) {
        CHECK(s.population_fraction ==
              doctest::Approx(static_cast<double>(s.active) / 100.0));
    }
}
