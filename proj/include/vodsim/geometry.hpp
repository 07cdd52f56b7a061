#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vodsim/bandwidth_model.hpp"

namespace vodsim {

/// The feasible allocation set {x in R^k : sum x_i <= W, lo <= x_i <= hi}.
/// `lo`/`hi` are the per-coordinate box bounds; conditional-probability use
/// sets lo = 0 and hi = w_max.
struct ConstraintRegion {
    int k;
    double budget;  // W
    double lo;
    double hi;

    ConstraintRegion(int dim, double w, double lower, double upper);

    double box_volume() const;
};

/// Per-mode bandwidth demands b_i (Mbps) with the mode under evaluation.
/// `active_index` is 1-based, matching InteractiveMode indices.
struct ModeDemandVector {
    std::vector<double> demands;
    int active_index;

    ModeDemandVector(std::vector<double> b, int active);

    int k() const { return static_cast<int>(demands.size()); }
    double active_demand() const { return demands[static_cast<std::size_t>(active_index - 1)]; }
};

/// Volume of the k-dimensional Euclidean ball of radius R,
/// pi^(k/2) / Gamma(k/2 + 1) * R^k.
double ball_volume(int k, double radius);

/// Even-dimension form: for k = 2j, pi^j / j! * R^k. Throws if k is odd.
double ball_volume_even_form(int k, double radius);

/// Odd-dimension form: for k = 2j+1, 2^(j+1) pi^j / (2j+1)!! * R^k.
/// Throws if k is even.
double ball_volume_odd_form(int k, double radius);

/// Exact volume of a ConstraintRegion by inclusion-exclusion over the box
/// faces after shifting out the lower bound:
///   vol = (1/k!) * sum_j (-1)^j C(k,j) max(0, W' - j s)^k,
/// with W' = W - k lo and s = hi - lo, clamped to [0, s^k].
/// Supported up to k = 16; beyond that the alternating factorial terms lose
/// precision.
double capped_simplex_volume(const ConstraintRegion& region);

/// Monte Carlo volume estimate with its binomial standard error.
struct McVolumeEstimate {
    double estimate;
    double std_error;
    std::int64_t hits;
    std::int64_t samples;
};

/// Hit-or-miss estimate of the region volume from `samples` uniform points in
/// the bounding box. Deterministic for a given (seed, samples, region).
McVolumeEstimate mc_volume(const ConstraintRegion& region, std::int64_t samples,
                           std::uint64_t seed);

/// Monte Carlo estimate of the integral of `f` over the region. The general
/// integrand hook; f = 1 reduces to mc_volume.
McVolumeEstimate mc_integral(const ConstraintRegion& region,
                             const std::function<double(std::span<const double>)>& f,
                             std::int64_t samples, std::uint64_t seed);

/// Conditional probability of one interactive sub-session: the feasible
/// passive-allocation volume over the ball-derived normalizer
/// pi^(k/2)/Gamma(k/2+1) * c^(k-1) * w_max. The raw ratio can exceed 1
/// (simplex numerator vs ball normalizer), so both the raw value and the
/// clamped probability are reported.
struct ConditionalProbability {
    double raw;
    double value;  // clamp(raw, 0, 1)
};

ConditionalProbability conditional_mode_probability(const ModeDemandVector& demand,
                                                    const BandwidthConfig& cfg,
                                                    double session_bandwidth);

/// Largest per-mode demand; the session bandwidth W when it clears w_min.
double max_demand(const ModeDemandVector& demand);

}  // namespace vodsim
