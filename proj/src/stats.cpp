#include "augsel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace augsel {

double auc(const std::vector<std::pair<double, double>>& curve) {
  require(curve.size() >= 2, ErrorKind::metric, "AUC needs at least two curve points");
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const auto& [b0, a0] = curve[i - 1];
    const auto& [b1, a1] = curve[i];
    require(b1 > b0, ErrorKind::metric, "curve budgets must be strictly ascending");
    area += (b1 - b0) * (a0 + a1) / 2.0;
  }
  return area;
}

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorKind::invalid_argument, "vectors must have equal length");
  const std::size_t n = a.size();
  require(n >= 3, ErrorKind::metric, "Spearman needs at least 3 samples");

  auto ra = average_ranks(a);
  auto rb = average_ranks(b);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  require(saa > 0.0 && sbb > 0.0, ErrorKind::metric,
          "Spearman is undefined for a constant vector");
  SpearmanResult result;
  result.rho = sab / std::sqrt(saa * sbb);

  const double r2 = std::min(result.rho * result.rho, 1.0);
  if (r2 >= 1.0) {
    result.p_approx = 0.0;
  } else {
    const double t = std::abs(result.rho) * std::sqrt((static_cast<double>(n) - 2.0) / (1.0 - r2));
    result.p_approx = std::erfc(t / std::sqrt(2.0));  // two-sided normal tail
  }
  return result;
}

Histogram score_histogram(std::span<const double> values, int bins) {
  require(bins >= 1, ErrorKind::invalid_argument, "need at least one bin");
  require(!values.empty(), ErrorKind::invalid_argument, "cannot histogram nothing");
  Histogram h;
  h.lo = *std::min_element(values.begin(), values.end());
  h.hi = *std::max_element(values.begin(), values.end());
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  if (h.hi == h.lo) {
    h.counts[0] = static_cast<long>(values.size());
    return h;
  }
  const double width = (h.hi - h.lo) / bins;
  for (double v : values) {
    int idx = static_cast<int>((v - h.lo) / width);
    if (idx >= bins) idx = bins - 1;  // the maximum lands in the last bin
    h.counts[static_cast<std::size_t>(idx)]++;
  }
  return h;
}

std::pair<double, double> confidence_interval(std::span<const double> samples, double level) {
  require(samples.size() >= 2, ErrorKind::metric, "confidence interval needs at least 2 samples");
  double z;
  if (level == 0.95)
    z = 1.959964;
  else if (level == 0.90)
    z = 1.644854;
  else if (level == 0.99)
    z = 2.575829;
  else
    raise(ErrorKind::invalid_argument, "supported confidence levels: 0.90, 0.95, 0.99");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double half = z * sd / std::sqrt(n);
  return {mean - half, mean + half};
}

}  // namespace augsel
