#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vodsim {

/// A viewer playback operation. Index 1 is fast-forward, 2 normal play,
/// 3 slow play, 4 rewind, 5 pause; higher indices are open for extensions.
struct InteractiveMode {
    int index;

    explicit InteractiveMode(int idx);

    friend bool operator==(InteractiveMode a, InteractiveMode b) { return a.index == b.index; }
    friend bool operator!=(InteractiveMode a, InteractiveMode b) { return a.index != b.index; }
};

inline constexpr int kFastForward = 1;
inline constexpr int kNormalPlay = 2;
inline constexpr int kSlowPlay = 3;
inline constexpr int kRewind = 4;
inline constexpr int kPause = 5;

/// Trunk capacity and per-channel bandwidth bounds, in Mbps.
/// `reserve` is the keep-alive bandwidth held by passive modes.
struct BandwidthConfig {
    double trunk;    // B
    double w_min;
    double w_max;
    double reserve;  // c

    BandwidthConfig(double trunk_mbps, double w_min_mbps, double w_max_mbps,
                    double reserve_mbps);

    double range() const { return w_max - w_min; }
};

/// Per-session statistical description: m independent mode observations over
/// k mutually exclusive modes with probabilities `probs`, of which L are
/// executable in the session. Probabilities are validated here once so the
/// per-call paths stay cheap.
class SessionSpec {
public:
    SessionSpec(int observations, int mode_count, std::vector<double> probs,
                int executable_modes);

    int m() const { return m_; }
    int k() const { return k_; }
    int executable_modes() const { return executable_modes_; }
    const std::vector<double>& probs() const { return probs_; }

private:
    int m_;
    int k_;
    std::vector<double> probs_;
    int executable_modes_;
};

/// Observed per-mode occurrence counts x_i for one viewer; counts must sum
/// to the owning SessionSpec's m.
struct ModeCounts {
    std::vector<int> counts;

    int sum() const;
    void validate_for(const SessionSpec& spec) const;
};

/// Exact multinomial probability of observing `counts` under `spec`,
/// m!/(prod x_i!) * prod p_i^x_i. Factorials are accumulated as log-gamma
/// sums so values stay finite for m well into the hundreds.
double multinomial_pmf(const ModeCounts& counts, const SessionSpec& spec);

/// Log of multinomial_pmf; -inf when some p_i = 0 has x_i > 0.
double log_multinomial_pmf(const ModeCounts& counts, const SessionSpec& spec);

/// Joint probability over n viewers, the product of per-viewer multinomial
/// terms. Accumulated in log space and exponentiated once.
double joint_session_probability(std::span<const ModeCounts> all_counts,
                                 const SessionSpec& spec);

/// Probability that an allocation of y is granted under the uniform
/// allocation law, (y - w_min) / (w_max - w_min).
double allocation_probability(double y, const BandwidthConfig& cfg);

/// Closed form of the inner allocation integral
/// int_{w_min}^{w_max} ((y - w_min)/(w_max - w_min))^x dy = (w_max - w_min)/(x + 1).
double allocation_moment_integral(int x, const BandwidthConfig& cfg);

/// The mixed discrete/continuous session expression: per viewer, the
/// multinomial coefficient times the product of allocation moment integrals
/// over the mode counts. This is an unnormalized non-negative weight, not a
/// probability. With `normalize` set, the weight is divided by the sum over
/// all count compositions, which requires m * k <= 24.
double mixed_session_weight(std::span<const ModeCounts> all_counts,
                            const SessionSpec& spec, const BandwidthConfig& cfg,
                            bool normalize = false);

/// All vectors of k non-negative integers summing to m, in lexicographic
/// order. Intended for normalization and exhaustive checks; the count grows
/// as C(m+k-1, k-1).
std::vector<std::vector<int>> enumerate_compositions(int m, int k);

}  // namespace vodsim
