#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "alphasmc/metrics.hpp"
#include "alphasmc/rng.hpp"

using namespace alphasmc;

namespace {

// Independent W1 oracle: two-pointer mass transport between sorted atoms.
double transport_w1(const WeightedSample& a, const WeightedSample& b) {
  auto sorted = [](const WeightedSample& s) {
    std::vector<std::pair<double, double>> atoms;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      atoms.emplace_back(s.values[i], s.weights[i]);
    }
    std::sort(atoms.begin(), atoms.end());
    return atoms;
  };
  auto xs = sorted(a);
  auto ys = sorted(b);
  double cost = 0.0;
  std::size_t i = 0, j = 0;
  while (i < xs.size() && j < ys.size()) {
    const double m = std::min(xs[i].second, ys[j].second);
    cost += m * std::abs(xs[i].first - ys[j].first);
    xs[i].second -= m;
    ys[j].second -= m;
    if (xs[i].second <= 1e-15) ++i;
    if (ys[j].second <= 1e-15) ++j;
  }
  return cost;
}

WeightedSample random_sample(std::uint64_t key, int n) {
  RngStream rng(1234, key, 0, 0, Draw::Init);
  std::vector<double> v(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = 10.0 * (rng.uniform() - 0.5);
    w[static_cast<std::size_t>(i)] = rng.uniform() + 0.01;
  }
  return WeightedSample::normalized(std::move(v), std::move(w));
}

}  // namespace

TEST_CASE("metrics: weighted sample validation") {
  CHECK_THROWS_AS(WeightedSample::normalized({1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(WeightedSample::normalized({1.0}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(WeightedSample::normalized({1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(WeightedSample::normalized({}, {}), std::invalid_argument);
  const auto s = WeightedSample::uniform({1.0, 2.0, 3.0, 4.0});
  double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("metrics: wasserstein1 closed-form cases") {
  const auto d0 = WeightedSample::uniform({0.0});
  const auto d1 = WeightedSample::uniform({1.0});
  CHECK(wasserstein1(d0, d1) == doctest::Approx(1.0));
  const auto a = WeightedSample::uniform({3.0, -1.0, 2.0});
  CHECK(wasserstein1(a, a) == doctest::Approx(0.0));
  const auto u01 = WeightedSample::uniform({0.0, 1.0});
  const auto u02 = WeightedSample::uniform({0.0, 2.0});
  CHECK(wasserstein1(u01, u02) == doctest::Approx(0.5));
}

TEST_CASE("metrics: wasserstein1 matches an independent transport oracle") {
  for (int rep = 0; rep < 25; ++rep) {
    const auto a = random_sample(static_cast<std::uint64_t>(2 * rep), 37 * (rep % 5 + 1));
    const auto b = random_sample(static_cast<std::uint64_t>(2 * rep + 1), 1000);
    CHECK(wasserstein1(a, b) == doctest::Approx(transport_w1(a, b)).epsilon(1e-10));
    CHECK(wasserstein1(a, b) == doctest::Approx(wasserstein1(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("metrics: wasserstein1 triangle inequality") {
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = random_sample(static_cast<std::uint64_t>(100 + 3 * rep), 41);
    const auto b = random_sample(static_cast<std::uint64_t>(101 + 3 * rep), 67);
    const auto c = random_sample(static_cast<std::uint64_t>(102 + 3 * rep), 29);
    CHECK(wasserstein1(a, c) <= wasserstein1(a, b) + wasserstein1(b, c) + 1e-9);
    CHECK(wasserstein1(a, b) >= 0.0);
  }
}

TEST_CASE("metrics: mse and relative mse") {
  CHECK(mse({1.0, 3.0}, 2.0) == doctest::Approx(1.0));
  CHECK(relative_mse({2.0, 4.0}, {1.0, 3.0}, 2.0) == doctest::Approx(2.0));
  CHECK(relative_mse({1.0, 3.0}, {1.0, 3.0}, 2.0) == doctest::Approx(1.0));
  CHECK(relative_mse({2.0, 2.0}, {1.0, 3.0}, 2.0) == doctest::Approx(0.0));
  CHECK(std::isinf(relative_mse({1.0}, {2.0}, 2.0)));
  CHECK(relative_mse({2.0}, {2.0}, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(relative_mse({}, {}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(relative_mse({1.0}, {1.0, 2.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(relative_mse({1.0}, {1.0}, NAN), std::invalid_argument);
}

TEST_CASE("metrics: type-7 quantiles") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  CHECK(quantile(v, 0.5) == doctest::Approx(50.5));
  std::vector<double> w(20);
  std::iota(w.begin(), w.end(), 1.0);
  CHECK(quantile(w, 0.05) == doctest::Approx(1.95));
  CHECK(quantile({7.0}, 0.5) == doctest::Approx(7.0));
  CHECK(quantile({7.0}, 0.05) == doctest::Approx(7.0));
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("metrics: summarize") {
  const auto s = summarize("k", {3.0, 1.0, 2.0, 5.0, 4.0});
  CHECK(s.key == "k");
  CHECK(s.median == doctest::Approx(3.0));
  CHECK(s.mean == doctest::Approx(3.0));
  CHECK(s.count == 5);
  CHECK(s.q05 <= s.median);
  CHECK(s.median <= s.q95);
  const auto single = summarize("x", {9.0});
  CHECK(single.median == 9.0);
  CHECK(single.q05 == 9.0);
  CHECK(single.q95 == 9.0);
  CHECK_THROWS_AS(summarize("e", {}), std::invalid_argument);
}
