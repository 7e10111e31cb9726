#include "alphasmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace alphasmc {

WeightedSample WeightedSample::normalized(std::vector<double> values,
                                          std::vector<double> weights) {
  if (values.size() != weights.size() || values.empty()) {
    throw std::invalid_argument("WeightedSample: size mismatch or empty");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw std::invalid_argument("WeightedSample: negative or non-finite weight");
    }
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("WeightedSample: zero total weight");
  for (double& w : weights) w /= total;
  return {std::move(values), std::move(weights)};
}

WeightedSample WeightedSample::uniform(std::vector<double> values) {
  std::vector<double> w(values.size(), 1.0 / static_cast<double>(values.size()));
  return normalized(std::move(values), std::move(w));
}

double wasserstein1(const WeightedSample& a, const WeightedSample& b) {
  if (a.values.empty() || b.values.empty()) {
    throw std::invalid_argument("wasserstein1: empty sample");
  }
  auto sorted_order = [](const WeightedSample& s) {
    std::vector<std::size_t> idx(s.values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t i, std::size_t j) { return s.values[i] < s.values[j]; });
    return idx;
  };
  const auto ia = sorted_order(a);
  const auto ib = sorted_order(b);

  double dist = 0.0;
  double cdf_a = 0.0, cdf_b = 0.0;
  std::size_t pa = 0, pb = 0;
  double prev = std::min(a.values[ia[0]], b.values[ib[0]]);
  while (pa < ia.size() || pb < ib.size()) {
    const double xa = pa < ia.size() ? a.values[ia[pa]]
                                     : std::numeric_limits<double>::infinity();
    const double xb = pb < ib.size() ? b.values[ib[pb]]
                                     : std::numeric_limits<double>::infinity();
    const double x = std::min(xa, xb);
    dist += std::abs(cdf_a - cdf_b) * (x - prev);
    while (pa < ia.size() && a.values[ia[pa]] == x) cdf_a += a.weights[ia[pa++]];
    while (pb < ib.size() && b.values[ib[pb]] == x) cdf_b += b.weights[ib[pb++]];
    prev = x;
  }
  return dist;
}

double mse(const std::vector<double>& xs, double truth) {
  if (xs.empty()) throw std::invalid_argument("mse: empty input");
  double s = 0.0;
  for (double x : xs) s += (x - truth) * (x - truth);
  return s / static_cast<double>(xs.size());
}

double relative_mse(const std::vector<double>& method,
                    const std::vector<double>& baseline, double truth) {
  if (method.empty() || baseline.empty()) {
    throw std::invalid_argument("relative_mse: empty input");
  }
  if (method.size() != baseline.size()) {
    throw std::invalid_argument("relative_mse: replicate count mismatch");
  }
  if (!std::isfinite(truth)) throw std::invalid_argument("relative_mse: non-finite truth");
  const double num = mse(method, truth);
  const double den = mse(baseline, truth);
  if (den == 0.0) {
    return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return num / den;
}

double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty input");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - std::floor(h)) * (xs[hi] - xs[lo]);
}

SummaryRow summarize(const std::string& key, const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("summarize: empty group");
  SummaryRow row;
  row.key = key;
  row.median = quantile(xs, 0.5);
  row.q05 = quantile(xs, 0.05);
  row.q95 = quantile(xs, 0.95);
  row.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  row.count = xs.size();
  return row;
}

}  // namespace alphasmc
