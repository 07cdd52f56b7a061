#include "vodsim/bandwidth_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vodsim {

namespace {

constexpr double kProbSumTolerance = 1e-12;
constexpr int kNormalizeCap = 24;  // largest m*k enumerated by the normalize path

double clamp_probability(double v) {
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace

InteractiveMode::InteractiveMode(int idx) : index(idx) {
    if (idx < 1) {
        throw std::invalid_argument("InteractiveMode: index must be >= 1");
    }
}

BandwidthConfig::BandwidthConfig(double trunk_mbps, double w_min_mbps,
                                 double w_max_mbps, double reserve_mbps)
    : trunk(trunk_mbps), w_min(w_min_mbps), w_max(w_max_mbps), reserve(reserve_mbps) {
    if (!(w_min > 0.0) || !(w_min <= w_max) || !(w_max <= trunk)) {
        throw std::invalid_argument(
            "BandwidthConfig: require 0 < w_min <= w_max <= trunk");
    }
    if (!(reserve > 0.0) || !(reserve <= w_min)) {
        throw std::invalid_argument("BandwidthConfig: require 0 < reserve <= w_min");
    }
}

SessionSpec::SessionSpec(int observations, int mode_count, std::vector<double> probs,
                         int executable_modes)
    : m_(observations), k_(mode_count), probs_(std::move(probs)),
      executable_modes_(executable_modes) {
    if (m_ < 0) {
        throw std::invalid_argument("SessionSpec: observations must be >= 0");
    }
    if (k_ < 1) {
        throw std::invalid_argument("SessionSpec: mode count must be >= 1");
    }
    if (executable_modes_ < 1 || executable_modes_ > k_) {
        throw std::invalid_argument("SessionSpec: require 1 <= L <= k");
    }
    if (static_cast<int>(probs_.size()) != k_) {
        throw std::invalid_argument("SessionSpec: probs size must equal mode count");
    }
    double sum = 0.0;
    for (double p : probs_) {
        if (p < 0.0) {
            throw std::invalid_argument("SessionSpec: probabilities must be >= 0");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance) {
        throw std::invalid_argument("SessionSpec: probabilities must sum to 1");
    }
}

int ModeCounts::sum() const {
    return std::accumulate(counts.begin(), counts.end(), 0);
}

void ModeCounts::validate_for(const SessionSpec& spec) const {
    if (static_cast<int>(counts.size()) != spec.k()) {
        throw std::invalid_argument("ModeCounts: dimension mismatch with SessionSpec");
    }
    int total = 0;
    for (int c : counts) {
        if (c < 0) {
            throw std::invalid_argument("ModeCounts: counts must be >= 0");
        }
        total += c;
    }
    if (total != spec.m()) {
        throw std::invalid_argument("ModeCounts: counts must sum to m");
    }
}

double log_multinomial_pmf(const ModeCounts& counts, const SessionSpec& spec) {
    counts.validate_for(spec);
    double logp = std::lgamma(static_cast<double>(spec.m()) + 1.0);
    for (int i = 0; i < spec.k(); ++i) {
        const int x = counts.counts[i];
        const double p = spec.probs()[i];
        logp -= std::lgamma(static_cast<double>(x) + 1.0);
        if (x > 0) {
            if (p == 0.0) {
                return -std::numeric_limits<double>::infinity();
            }
            logp += x * std::log(p);
        }
        // x == 0 contributes factor 1 regardless of p (0^0 convention).
    }
    return logp;
}

double multinomial_pmf(const ModeCounts& counts, const SessionSpec& spec) {
    const double logp = log_multinomial_pmf(counts, spec);
    if (logp == -std::numeric_limits<double>::infinity()) {
        return 0.0;
    }
    return clamp_probability(std::exp(logp));
}

double joint_session_probability(std::span<const ModeCounts> all_counts,
                                 const SessionSpec& spec) {
    if (all_counts.empty()) {
        throw std::invalid_argument("joint_session_probability: empty viewer list");
    }
    double logp = 0.0;
    for (const ModeCounts& counts : all_counts) {
        const double term = log_multinomial_pmf(counts, spec);
        if (term == -std::numeric_limits<double>::infinity()) {
            return 0.0;
        }
        logp += term;
    }
    return clamp_probability(std::exp(logp));
}

double allocation_probability(double y, const BandwidthConfig& cfg) {
    if (cfg.range() <= 0.0) {
        throw std::domain_error("allocation_probability: w_max must exceed w_min");
    }
    if (y < cfg.w_min || y > cfg.w_max) {
        throw std::out_of_range("allocation_probability: y outside [w_min, w_max]");
    }
    return (y - cfg.w_min) / cfg.range();
}

double allocation_moment_integral(int x, const BandwidthConfig& cfg) {
    if (x < 0) {
        throw std::invalid_argument("allocation_moment_integral: x must be >= 0");
    }
    return cfg.range() / (static_cast<double>(x) + 1.0);
}

namespace {

// log of [multinomial coefficient * prod_i moment_integral(x_i)] for one viewer.
double log_viewer_weight(const ModeCounts& counts, const SessionSpec& spec,
                         const BandwidthConfig& cfg) {
    counts.validate_for(spec);
    if (cfg.range() == 0.0 && spec.m() > 0) {
        return -std::numeric_limits<double>::infinity();
    }
    double logw = std::lgamma(static_cast<double>(spec.m()) + 1.0);
    for (int x : counts.counts) {
        logw -= std::lgamma(static_cast<double>(x) + 1.0);
        logw += std::log(allocation_moment_integral(x, cfg));
    }
    return logw;
}

}  // namespace

double mixed_session_weight(std::span<const ModeCounts> all_counts,
                            const SessionSpec& spec, const BandwidthConfig& cfg,
                            bool normalize) {
    if (all_counts.empty()) {
        throw std::invalid_argument("mixed_session_weight: empty viewer list");
    }
    double log_total = 0.0;
    for (const ModeCounts& counts : all_counts) {
        log_total += log_viewer_weight(counts, spec, cfg);
    }
    if (!normalize) {
        return std::exp(log_total);
    }

    if (spec.m() * spec.k() > kNormalizeCap) {
        throw std::invalid_argument(
            "mixed_session_weight: normalization requires m * k <= " +
            std::to_string(kNormalizeCap));
    }
    // Per-viewer normalizer: log-sum-exp over all count compositions.
    std::vector<double> log_terms;
    for (const auto& comp : enumerate_compositions(spec.m(), spec.k())) {
        log_terms.push_back(log_viewer_weight(ModeCounts{comp}, spec, cfg));
    }
    const double peak = *std::max_element(log_terms.begin(), log_terms.end());
    double sum = 0.0;
    for (double t : log_terms) {
        sum += std::exp(t - peak);
    }
    const double log_normalizer = peak + std::log(sum);
    return std::exp(log_total - static_cast<double>(all_counts.size()) * log_normalizer);
}

std::vector<std::vector<int>> enumerate_compositions(int m, int k) {
    if (m < 0 || k < 1) {
        throw std::invalid_argument("enumerate_compositions: require m >= 0, k >= 1");
    }
    std::vector<std::vector<int>> out;
    std::vector<int> current(static_cast<std::size_t>(k), 0);
    // Recursive descent over the first k-1 coordinates; the last absorbs the rest.
    auto recurse = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == k - 1) {
            current[pos] = remaining;
            out.push_back(current);
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            current[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    recurse(recurse, 0, m);
    return out;
}

}  // namespace vodsim
