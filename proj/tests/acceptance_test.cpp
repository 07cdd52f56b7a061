// Acceptance battery: one pass/fail line per criterion, non-zero exit on any
// failure. Every numeric bound here is frozen; edit only with a matching
// change to the checked contract.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vodsim/allocation.hpp"
#include "vodsim/bandwidth_model.hpp"
#include "vodsim/config.hpp"
#include "vodsim/geometry.hpp"
#include "vodsim/oracles.hpp"
#include "vodsim/rng.hpp"
#include "vodsim/simulator.hpp"

using namespace vodsim;

namespace {

struct Criterion {
    std::string name;
    bool passed;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::vector<double> random_prob_vector(Rng& rng, int k) {
    std::vector<double> p(static_cast<std::size_t>(k));
    double sum = 0.0;
    for (double& v : p) {
        v = rng.uniform01() + 1e-3;
        sum += v;
    }
    for (double& v : p) {
        v /= sum;
    }
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        head += p[i];
    }
    p.back() = 1.0 - head;
    return p;
}

Criterion criterion_normalization() {
    Rng rng(2024);
    double worst = 0.0;
    for (int m = 0; m <= 6; ++m) {
        for (int k = 1; k <= 4; ++k) {
            for (int trial = 0; trial < 20; ++trial) {
                const SessionSpec spec(m, k, random_prob_vector(rng, k), k);
                double sum = 0.0;
                for (const auto& comp : enumerate_compositions(m, k)) {
                    sum += multinomial_pmf(ModeCounts{comp}, spec);
                }
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        }
    }
    return {"multinomial-normalization", worst <= 1e-10,
            "max |sum - 1| = " + fmt(worst)};
}

Criterion criterion_enumeration() {
    Rng rng(77);
    double worst = 0.0;
    for (int m = 0; m <= 8; ++m) {
        for (int k = 1; k <= 3; ++k) {
            const SessionSpec spec(m, k, random_prob_vector(rng, k), k);
            for (const auto& comp : enumerate_compositions(m, k)) {
                const double expected = oracles::enumerated_multinomial_probability(
                    m, spec.probs(), comp);
                worst = std::max(
                    worst, std::abs(multinomial_pmf(ModeCounts{comp}, spec) - expected));
            }
        }
    }
    return {"pmf-enumeration-oracle", worst <= 1e-12, "max gap = " + fmt(worst)};
}

Criterion criterion_ball_forms() {
    double worst = 0.0;
    for (int k = 1; k <= 12; ++k) {
        for (double radius : {0.5, 1.0, 2.5}) {
            const double general = ball_volume(k, radius);
            const double special = k % 2 == 0 ? ball_volume_even_form(k, radius)
                                              : ball_volume_odd_form(k, radius);
            worst = std::max(worst, std::abs(special - general) / general);
        }
    }
    const double v3 = ball_volume(3, 1.0);
    const bool ok = worst <= 1e-9 && std::abs(v3 - 4.188790) <= 1e-5;
    return {"ball-volume-forms", ok,
            "max rel gap = " + fmt(worst) + ", V3(1) = " + fmt(v3)};
}

Criterion criterion_volume_oracle() {
    Rng rng(555);
    int failures = 0;
    double worst_sigma = 0.0;
    for (int i = 0; i < 200; ++i) {
        const int k = 1 + static_cast<int>(rng.raw() % 6);
        const double lo = rng.uniform(0.0, 2.0);
        const double hi = lo + rng.uniform(0.05, 3.0);
        const double span = static_cast<double>(k) * (hi - lo);
        const double budget =
            std::max(0.0, static_cast<double>(k) * lo + rng.uniform(-0.2, 1.2) * span);
        const ConstraintRegion region(k, budget, lo, hi);
        const double exact = capped_simplex_volume(region);
        const McVolumeEstimate mc = mc_volume(region, 1000000, rng.raw());
        const double gap = std::abs(mc.estimate - exact);
        // Rule-of-three floor: at 0 or n hits the binomial standard error is
        // zero while the true sliver volume need not be.
        if (gap > 3.0 * (mc.std_error + region.box_volume() / 1000000.0)) {
            ++failures;
        }
        if (mc.std_error > 0.0) {
            worst_sigma = std::max(worst_sigma, gap / mc.std_error);
        }
    }
    return {"volume-oracle-equivalence", failures == 0,
            "200 regions, worst gap = " + fmt(worst_sigma) + " sigma"};
}

Criterion criterion_quadrature() {
    Rng rng(31);
    double worst = 0.0;
    for (int pair = 0; pair < 10; ++pair) {
        const double w_min = rng.uniform(0.1, 5.0);
        const double w_max = w_min + rng.uniform(0.2, 6.0);
        const BandwidthConfig cfg(w_max + 1.0, w_min, w_max, w_min);
        for (int x = 0; x <= 20; ++x) {
            const double closed = allocation_moment_integral(x, cfg);
            const double numeric = oracles::richardson_trapezoid(
                [&](double y) {
                    return std::pow((y - w_min) / (w_max - w_min), x);
                },
                w_min, w_max, 10000);
            worst = std::max(worst, std::abs(numeric - closed) / closed);
        }
    }
    return {"moment-quadrature", worst <= 1e-9, "max rel error = " + fmt(worst)};
}

Criterion criterion_arrival_endpoints() {
    const SimulationConfig cfg;
    const bool ok = arrival_count(0.0, cfg) == 0 &&
                    arrival_count(cfg.duration_s, cfg) == cfg.target_viewers;
    return {"arrival-endpoints", ok,
            "N(0) = " + std::to_string(arrival_count(0.0, cfg)) + ", N(" +
                fmt(cfg.duration_s) + ") = " +
                std::to_string(arrival_count(cfg.duration_s, cfg))};
}

Criterion criterion_conservation() {
    const SimulationConfig cfg;
    SessionSimulator sim(cfg);
    std::int64_t ticks = 0;
    bool load_ok = true;
    while (!sim.done()) {
        const LoadSample sample = sim.step();
        sim.channels().audit();
        load_ok = load_ok && sample.normalized_load >= 0.0 &&
                  sample.normalized_load <= 1.0;
        ++ticks;
    }
    const bool ok = ticks == 600 && load_ok;
    return {"conservation-replay", ok,
            std::to_string(ticks) + " ticks audited, loads in [0,1]"};
}

Criterion criterion_determinism() {
    namespace fs = std::filesystem;
    const SimulationConfig cfg;
    RunManifest manifest;
    manifest.command = "acceptance";
    manifest.seed = cfg.seed;
    manifest.version = "test";
    manifest.config_json = config_to_json(cfg);
    manifest.config_hash = config_hash(manifest.config_json);

    const fs::path dir = fs::temp_directory_path() / "vodsim_acceptance";
    fs::create_directories(dir);
    const fs::path path_a = dir / "determinism_a.csv";
    const fs::path path_b = dir / "determinism_b.csv";
    write_samples_csv(path_a, manifest, run(cfg).samples);
    write_samples_csv(path_b, manifest, run(cfg).samples);

    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    };
    const std::string a = slurp(path_a);
    const std::string b = slurp(path_b);
    const bool ok = !a.empty() && a == b;
    return {"determinism", ok,
            ok ? "two runs, byte-identical files" : "output files differ"};
}

double tail_mean_load(const SimulationResult& result, double tail_seconds,
                      double duration) {
    double sum = 0.0;
    int count = 0;
    for (const LoadSample& s : result.samples) {
        if (s.t > duration - tail_seconds) {
            sum += s.normalized_load;
            ++count;
        }
    }
    return count > 0 ? sum / count : 0.0;
}

Criterion criterion_sweep_monotonicity() {
    // Sub-saturated setup: a small viewer population keeps the trunk from
    // pinning every curve at 1.0, which would erase the ordering the check
    // looks for.
    SimulationConfig base;
    base.target_viewers = 8;
    base.seed = 42;

    const SweepResult sweep = run_sweep(base, sweep_preset_set2());
    if (sweep.entries.size() != 6) {
        return {"sweep-load-ordering", false,
                "expected 6 sweep entries, got " +
                    std::to_string(sweep.entries.size())};
    }
    bool non_decreasing = true;
    double previous = -1.0;
    std::string means;
    for (const SweepEntry& entry : sweep.entries) {
        const double mean = tail_mean_load(entry.result, 10.0, base.duration_s);
        non_decreasing = non_decreasing && mean >= previous;
        previous = mean;
        means += (means.empty() ? "" : " ") + fmt(mean);
    }
    const double peak_low = sweep.entries[1].result.summary.peak_load;
    const double peak_high = sweep.entries[5].result.summary.peak_load;
    const bool ok = non_decreasing && peak_high > peak_low;
    return {"sweep-load-ordering", ok,
            "tail means [" + means + "], peak(1.0) = " + fmt(peak_high) +
                " vs peak(0.2) = " + fmt(peak_low)};
}

Criterion criterion_sampler_fidelity() {
    const std::vector<std::vector<double>> prob_sets = {
        {0.2, 0.2, 0.2, 0.2, 0.2}, {0.4, 0.3, 0.2, 0.05, 0.05}};
    Rng rng(4242);
    const int n = 100000;
    bool ok = true;
    double worst_sigma = 0.0;
    for (const std::vector<double>& probs : prob_sets) {
        std::vector<int> counts(probs.size(), 0);
        for (int i = 0; i < n; ++i) {
            ++counts[static_cast<std::size_t>(rng.categorical(probs))];
        }
        for (std::size_t i = 0; i < probs.size(); ++i) {
            const double sigma = std::sqrt(n * probs[i] * (1.0 - probs[i]));
            const double gap = std::abs(counts[i] - n * probs[i]);
            ok = ok && gap <= 3.0 * sigma;
            worst_sigma = std::max(worst_sigma, gap / sigma);
        }
    }
    return {"sampler-fidelity", ok,
            "100000 draws x2 prob sets, worst gap = " + fmt(worst_sigma) + " sigma"};
}

Criterion criterion_demand_parameter() {
    const BandwidthConfig cfg(100.0, 0.5, 2.0, 0.5);
    const bool udp_ok = unified_demand_parameter(5, cfg) == 0.1;
    const bool set1_ok =
        sweep_preset_set1() == std::vector<double>{0.01, 0.03, 0.05, 0.07, 0.09, 0.11};
    const bool set2_ok =
        sweep_preset_set2() == std::vector<double>{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    return {"demand-parameter-arithmetic", udp_ok && set1_ok && set2_ok,
            std::string("udp exact: ") + (udp_ok ? "yes" : "no") +
                ", presets exact: " + (set1_ok && set2_ok ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::function<Criterion()>> criteria = {
        criterion_normalization,    criterion_enumeration,
        criterion_ball_forms,       criterion_volume_oracle,
        criterion_quadrature,       criterion_arrival_endpoints,
        criterion_conservation,     criterion_determinism,
        criterion_sweep_monotonicity, criterion_sampler_fidelity,
        criterion_demand_parameter};

    int failures = 0;
    int index = 0;
    for (const auto& run_criterion : criteria) {
        ++index;
        Criterion result;
        try {
            result = run_criterion();
        } catch (const std::exception& e) {
            result = {"criterion-" + std::to_string(index), false,
                      std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %02d %s: %s\n", result.passed ? "PASS" : "FAIL", index,
                    result.name.c_str(), result.detail.c_str());
        failures += result.passed ? 0 : 1;
    }
    std::printf("acceptance: %d/%d criteria passed\n",
                static_cast<int>(criteria.size()) - failures,
                static_cast<int>(criteria.size()));
    return failures == 0 ? 0 : 1;
}
