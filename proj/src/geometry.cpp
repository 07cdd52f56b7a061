#include "vodsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vodsim/rng.hpp"

namespace vodsim {

namespace {

constexpr int kMaxExactDimension = 16;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

double double_factorial(int n) {
    double f = 1.0;
    for (int i = n; i >= 2; i -= 2) {
        f *= i;
    }
    return f;
}

double binomial(int n, int r) {
    std::int64_t b = 1;  // exact for n <= 16
    for (int i = 1; i <= r; ++i) {
        b = b * (n - r + i) / i;
    }
    return static_cast<double>(b);
}

}  // namespace

ConstraintRegion::ConstraintRegion(int dim, double w, double lower, double upper)
    : k(dim), budget(w), lo(lower), hi(upper) {
    if (k < 1) {
        throw std::invalid_argument("ConstraintRegion: dimension must be >= 1");
    }
    if (!(lo >= 0.0) || !(lo <= hi)) {
        throw std::invalid_argument("ConstraintRegion: require 0 <= lo <= hi");
    }
    if (!(budget >= 0.0)) {
        throw std::invalid_argument("ConstraintRegion: budget must be >= 0");
    }
}

double ConstraintRegion::box_volume() const {
    return std::pow(hi - lo, k);
}

ModeDemandVector::ModeDemandVector(std::vector<double> b, int active)
    : demands(std::move(b)), active_index(active) {
    if (demands.empty()) {
        throw std::invalid_argument("ModeDemandVector: empty demand vector");
    }
    if (active_index < 1 || active_index > k()) {
        throw std::invalid_argument("ModeDemandVector: active index out of range");
    }
    for (double d : demands) {
        if (d < 0.0) {
            throw std::invalid_argument("ModeDemandVector: demands must be >= 0");
        }
    }
}

double ball_volume(int k, double radius) {
    if (k < 0 || radius < 0.0) {
        throw std::invalid_argument("ball_volume: require k >= 0 and radius >= 0");
    }
    const double half_k = 0.5 * static_cast<double>(k);
    return std::pow(std::numbers::pi, half_k) / std::tgamma(half_k + 1.0) *
           std::pow(radius, k);
}

double ball_volume_even_form(int k, double radius) {
    if (k < 0 || k % 2 != 0) {
        throw std::invalid_argument("ball_volume_even_form: k must be even and >= 0");
    }
    if (radius < 0.0) {
        throw std::invalid_argument("ball_volume_even_form: radius must be >= 0");
    }
    const int j = k / 2;
    return std::pow(std::numbers::pi, j) / factorial(j) * std::pow(radius, k);
}

double ball_volume_odd_form(int k, double radius) {
    if (k < 1 || k % 2 != 1) {
        throw std::invalid_argument("ball_volume_odd_form: k must be odd and >= 1");
    }
    if (radius < 0.0) {
        throw std::invalid_argument("ball_volume_odd_form: radius must be >= 0");
    }
    const int j = (k - 1) / 2;
    return std::pow(2.0, j + 1) * std::pow(std::numbers::pi, j) /
           double_factorial(2 * j + 1) * std::pow(radius, k);
}

double capped_simplex_volume(const ConstraintRegion& region) {
    const int k = region.k;
    if (k > kMaxExactDimension) {
        throw std::invalid_argument(
            "capped_simplex_volume: dimensions above 16 are not supported");
    }
    const double s = region.hi - region.lo;
    const double shifted_budget = region.budget - static_cast<double>(k) * region.lo;
    const double box = std::pow(s, k);
    if (shifted_budget <= 0.0) {
        return 0.0;
    }
    if (shifted_budget >= static_cast<double>(k) * s) {
        return box;
    }
    double volume = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double reach = shifted_budget - static_cast<double>(j) * s;
        if (reach <= 0.0) {
            break;  // later terms only shrink further
        }
        const double term = binomial(k, j) * std::pow(reach, k);
        volume += (j % 2 == 0) ? term : -term;
    }
    volume /= factorial(k);
    return std::clamp(volume, 0.0, box);
}

McVolumeEstimate mc_volume(const ConstraintRegion& region, std::int64_t samples,
                           std::uint64_t seed) {
    return mc_integral(region, nullptr, samples, seed);
}

McVolumeEstimate mc_integral(const ConstraintRegion& region,
                             const std::function<double(std::span<const double>)>& f,
                             std::int64_t samples, std::uint64_t seed) {
    if (samples < 1) {
        throw std::invalid_argument("mc_integral: need at least one sample");
    }
    Rng rng(seed);
    const double box = region.box_volume();
    std::vector<double> point(static_cast<std::size_t>(region.k));
    std::int64_t hits = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::int64_t n = 0; n < samples; ++n) {
        double coord_sum = 0.0;
        for (double& x : point) {
            x = rng.uniform(region.lo, region.hi);
            coord_sum += x;
        }
        if (coord_sum <= region.budget) {
            ++hits;
            const double v = f ? f(point) : 1.0;
            sum += v;
            sum_sq += v * v;
        }
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    // Sample variance of f * indicator; reduces to p(1-p) for f = 1.
    const double variance = std::max(0.0, sum_sq / n - mean * mean);
    return McVolumeEstimate{box * mean, box * std::sqrt(variance / n), hits, samples};
}

ConditionalProbability conditional_mode_probability(const ModeDemandVector& demand,
                                                    const BandwidthConfig& cfg,
                                                    double session_bandwidth) {
    const int k = demand.k();
    if (cfg.w_max <= 0.0) {
        throw std::domain_error("conditional_mode_probability: w_max must be positive");
    }
    if (k >= 2 && cfg.reserve <= 0.0) {
        throw std::domain_error(
            "conditional_mode_probability: reserve must be positive for k >= 2");
    }
    if (session_bandwidth < 0.0) {
        throw std::invalid_argument(
            "conditional_mode_probability: session bandwidth must be >= 0");
    }

    const double normalizer =
        ball_volume(k, 1.0) * std::pow(cfg.reserve, k - 1) * cfg.w_max;

    double feasible_volume = 0.0;
    if (k == 1) {
        // Single mode: the active coordinate itself ranges over the budget,
        // capped by the box.
        feasible_volume =
            capped_simplex_volume(ConstraintRegion(1, session_bandwidth, 0.0, cfg.w_max));
    } else {
        // The active coordinate is pinned at its demand; the k-1 passive
        // coordinates share the remaining budget inside [0, w_max].
        const double remaining = session_bandwidth - demand.active_demand();
        if (remaining > 0.0) {
            feasible_volume =
                capped_simplex_volume(ConstraintRegion(k - 1, remaining, 0.0, cfg.w_max));
        }
    }

    const double raw = feasible_volume / normalizer;
    return ConditionalProbability{raw, std::clamp(raw, 0.0, 1.0)};
}

double max_demand(const ModeDemandVector& demand) {
    return *std::max_element(demand.demands.begin(), demand.demands.end());
}

}  // namespace vodsim
