#pragma once

#include <functional>
#include <span>
#include <vector>

namespace vodsim::oracles {

/// Brute-force multinomial probability: walks every ordered outcome sequence
/// of length m over k modes and sums the probability of those matching the
/// requested count vector. Exponential in m; independent of the analytic
/// path it cross-checks.
double enumerated_multinomial_probability(int m, std::span<const double> probs,
                                          std::span<const int> counts);

/// Composite trapezoid sum with n panels.
double trapezoid_sum(const std::function<double(double)>& f, double a, double b,
                     long long panels);

/// One Richardson extrapolation step over trapezoid sums at `panels` and
/// 2*`panels`, cancelling the h^2 error term.
double richardson_trapezoid(const std::function<double(double)>& f, double a,
                            double b, long long panels);

}  // namespace vodsim::oracles
