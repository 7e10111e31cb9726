#include "alphasmc/model.hpp"

#include <cmath>
#include <memory>

namespace alphasmc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double gaussian_density(double x, double sigma) {
  return std::exp(-0.5 * (x / sigma) * (x / sigma)) /
         (sigma * std::sqrt(kTwoPi));
}

HmmModel make_ar1_indicator(const BuiltinParams& params) {
  if (params.horizon < 1) throw std::invalid_argument("ar1-indicator: horizon < 1");
  HmmModel m;
  m.tag = "ar1-indicator";
  m.state_kind = StateKind::Continuous1d;
  m.horizon = params.horizon;
  m.kappa_g = 10.1;  // exact supremum of the potential
  const double beta = 0.9;
  const double noise = std::sqrt(1.0 - beta * beta);
  m.initial_sampler = [](RngStream& rng) { return rng.normal(); };
  m.transition_sampler = [beta, noise](int, double x, RngStream& rng) {
    return beta * x + noise * rng.normal();
  };
  m.potential_fn = [](int, double x) {
    return 0.1 + (std::abs(x - 2.0) < 0.1 ? 10.0 : 0.0);
  };
  return m;
}

HmmModel make_tracking(const BuiltinParams& params, std::uint64_t obs_seed) {
  if (params.horizon < 1) throw std::invalid_argument("tracking: horizon < 1");
  if (params.sigma <= 0.0) throw std::invalid_argument("tracking: sigma <= 0");
  HmmModel m;
  m.tag = "tracking";
  m.state_kind = StateKind::Continuous1d;
  m.horizon = params.horizon;
  const double sigma = params.sigma;
  m.kappa_g = 1.0 / (sigma * std::sqrt(kTwoPi));  // density mode

  // Simulate a latent path from the model and freeze y_t = x_t + eps_t.
  // x_0 is a point mass at 0.
  std::vector<double> y(static_cast<std::size_t>(params.horizon) + 1);
  double x = 0.0;
  for (int t = 0; t <= params.horizon; ++t) {
    if (t > 0) {
      RngStream rng(obs_seed, 0, static_cast<std::uint64_t>(t), 0, Draw::Observation);
      x = -(x - 1.0) / 2.0 + rng.normal();
    }
    RngStream rng(obs_seed, 1, static_cast<std::uint64_t>(t), 0, Draw::Observation);
    y[static_cast<std::size_t>(t)] = x + sigma * rng.normal();
  }
  m.observations = y;

  auto obs = std::make_shared<std::vector<double>>(std::move(y));
  m.initial_sampler = [](RngStream&) { return 0.0; };
  m.transition_sampler = [](int, double xv, RngStream& rng) {
    return -(xv - 1.0) / 2.0 + rng.normal();
  };
  m.potential_fn = [obs, sigma](int t, double xv) {
    return gaussian_density((*obs)[static_cast<std::size_t>(t)] - xv, sigma);
  };
  return m;
}

HmmModel make_tail_example() {
  HmmModel m;
  m.tag = "tail-example";
  m.state_kind = StateKind::Continuous1d;
  m.horizon = 1;
  m.kappa_g = 100.1;
  m.initial_sampler = [](RngStream& rng) { return rng.normal(); };
  m.transition_sampler = [](int, double x, RngStream&) { return x; };  // identity kernel
  m.potential_fn = [](int, double x) {
    return 0.1 + (std::abs(x) < 0.1 ? 100.0 : 0.0);
  };
  return m;
}

HmmModel make_two_state(const BuiltinParams& params) {
  const auto n = params.pi0.size();
  if (n < 1) throw std::invalid_argument("two-state: empty initial vector");
  if (params.transition.size() != n * n || params.potential.size() != n) {
    throw std::invalid_argument("two-state: inconsistent array sizes");
  }
  if (params.horizon < 1) throw std::invalid_argument("two-state: horizon < 1");
  DiscreteArrays arrays;
  arrays.n_states = static_cast<int>(n);
  arrays.pi0 = params.pi0;
  arrays.transition = params.transition;
  arrays.potential = params.potential;

  HmmModel m;
  m.tag = "two-state";
  m.state_kind = StateKind::Discrete;
  m.horizon = params.horizon;
  double gmax = arrays.potential[0];
  double gmin = arrays.potential[0];
  for (double g : arrays.potential) {
    if (g <= 0.0) throw std::invalid_argument("two-state: non-positive potential");
    gmax = std::max(gmax, g);
    gmin = std::min(gmin, g);
  }
  m.kappa_g = gmax;
  m.kappa_g_inv = gmin;

  auto shared = std::make_shared<DiscreteArrays>(arrays);
  m.initial_sampler = [shared](RngStream& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < shared->pi0.size(); ++k) {
      acc += shared->pi0[k];
      if (u < acc) return static_cast<double>(k);
    }
    return static_cast<double>(shared->pi0.size() - 1);
  };
  m.transition_sampler = [shared](int, double x, RngStream& rng) {
    const auto ns = static_cast<std::size_t>(shared->n_states);
    const std::size_t row = static_cast<std::size_t>(x) * ns;
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < ns; ++k) {
      acc += shared->transition[row + k];
      if (u < acc) return static_cast<double>(k);
    }
    return static_cast<double>(ns - 1);
  };
  m.potential_fn = [shared](int, double x) {
    return shared->potential[static_cast<std::size_t>(x)];
  };
  m.arrays = std::move(arrays);
  return m;
}

}  // namespace

HmmModel make_builtin(const std::string& tag, const BuiltinParams& params,
                      std::uint64_t observation_seed) {
  if (tag == "ar1-indicator") return make_ar1_indicator(params);
  if (tag == "tracking") return make_tracking(params, observation_seed);
  if (tag == "tail-example") return make_tail_example();
  if (tag == "two-state") return make_two_state(params);
  throw std::invalid_argument("unknown model tag: " + tag);
}

}  // namespace alphasmc
