#pragma once

#include <span>
#include <utility>
#include <vector>

#include "augsel/common.hpp"

namespace augsel {

// Trapezoidal area under an accuracy-vs-budget curve with strictly ascending
// budgets; needs at least two points.
double auc(const std::vector<std::pair<double, double>>& curve);

struct SpearmanResult {
  double rho = 0.0;
  double p_approx = 1.0;  // normal approximation to the t distribution
};

// Spearman rank correlation with average ranks for ties; p-value from
// t = rho*sqrt((n-2)/(1-rho^2)) under a normal approximation (documented as
// approximate). Throws a metric error for n < 3 or a constant input.
SpearmanResult spearman(std::span<const double> a, std::span<const double> b);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<long> counts;  // equal-width bins over [lo, hi]
};

Histogram score_histogram(std::span<const double> values, int bins);

// mean +/- z * sd/sqrt(n) with z = 1.959964 at the default 0.95 level
// (normal approximation; sample standard deviation).
std::pair<double, double> confidence_interval(std::span<const double> samples,
                                              double level = 0.95);

std::vector<double> average_ranks(std::span<const double> v);

}  // namespace augsel
