#ifndef ALPHASMC_METRICS_HPP
#define ALPHASMC_METRICS_HPP

#include <string>
#include <vector>

namespace alphasmc {

/// Weighted sample on the real line; weights sum to one.
struct WeightedSample {
  std::vector<double> values;
  std::vector<double> weights;

  static WeightedSample normalized(std::vector<double> values,
                                   std::vector<double> weights);
  static WeightedSample uniform(std::vector<double> values);
};

/// Exact 1-d Wasserstein-1 distance between two weighted empirical
/// measures, by integrating |F_a - F_b| between merged support points.
double wasserstein1(const WeightedSample& a, const WeightedSample& b);

/// Ratio of mean squared errors against a common truth. Returns +infinity
/// when the baseline MSE is zero and the numerator is not.
double relative_mse(const std::vector<double>& method,
                    const std::vector<double>& baseline, double truth);

double mse(const std::vector<double>& xs, double truth);

/// Type-7 empirical quantile (linear interpolation).
double quantile(std::vector<double> xs, double p);

struct SummaryRow {
  std::string key;
  double median = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  double mean = 0.0;
  std::size_t count = 0;
};

SummaryRow summarize(const std::string& key, const std::vector<double>& xs);

}  // namespace alphasmc

#endif
