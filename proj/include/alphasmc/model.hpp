#ifndef ALPHASMC_MODEL_HPP
#define ALPHASMC_MODEL_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alphasmc/rng.hpp"

namespace alphasmc {

/// Exact arrays of a finite-state model, used by the oracle module.
/// Transition rows sum to one; the same matrix and potential vector are
/// applied at every time index.
struct DiscreteArrays {
  std::vector<double> pi0;         // n_states
  std::vector<double> transition;  // n_states x n_states, row-major
  std::vector<double> potential;   // n_states
  int n_states = 0;
};

enum class StateKind { Continuous1d, Discrete };

/// State-space model bundle: initial sampler, Markov kernel sampler and
/// potential evaluator, with declared potential bounds. Observations, where
/// a model has them, are pre-generated at construction and folded into the
/// potential; filters never see raw observations. Immutable after
/// construction and safe to share across workers.
struct HmmModel {
  std::string tag;
  StateKind state_kind = StateKind::Continuous1d;
  int horizon = 0;
  double kappa_g = 0.0;                   // sup over all g_t
  std::optional<double> kappa_g_inv;      // inf over all g_t, when declared
  std::function<double(RngStream&)> initial_sampler;
  std::function<double(int, double, RngStream&)> transition_sampler;
  std::function<double(int, double)> potential_fn;
  std::optional<DiscreteArrays> arrays;
  std::vector<double> observations;       // tracking only, for inspection

  double potential(int t, double x) const {
    if (t < 0 || t > horizon) {
      throw std::out_of_range("potential: time index " + std::to_string(t) +
                              " outside [0, " + std::to_string(horizon) + "]");
    }
    return potential_fn(t, x);
  }

  /// Two-sided bound kappa such that 1/kappa <= g_t <= kappa, when the
  /// model declares a lower bound.
  std::optional<double> two_sided_bound() const {
    if (!kappa_g_inv) return std::nullopt;
    return std::max(kappa_g, 1.0 / *kappa_g_inv);
  }
};

/// Parameters for make_builtin. Only the fields relevant to the chosen tag
/// are read.
struct BuiltinParams {
  int horizon = 10;
  double sigma = 0.2;                // tracking observation noise
  std::vector<double> pi0;           // two-state
  std::vector<double> transition;    // two-state, row-major
  std::vector<double> potential;     // two-state
};

/// Builds one of the built-in models:
///   ar1-indicator  AR(1) dynamics with an indicator bump potential
///   tracking       mean-reverting dynamics, Gaussian likelihood of frozen
///                  simulated observations
///   tail-example   one-step model with identity kernel and a spike at 0
///   two-state      finite model from user-supplied arrays
/// Identical inputs produce identical models; tracking observations are a
/// deterministic function of observation_seed.
HmmModel make_builtin(const std::string& tag, const BuiltinParams& params,
                      std::uint64_t observation_seed = 0);

}  // namespace alphasmc

#endif
