#include "alphasmc/filter.hpp"

#include <algorithm>
#include <cmath>

namespace alphasmc {

namespace {

// Smallest index whose cumulative mass strictly exceeds the target.
std::size_t pick_index(const std::vector<double>& cum, double target) {
  auto it = std::upper_bound(cum.begin(), cum.end(), target);
  std::size_t idx = static_cast<std::size_t>(it - cum.begin());
  return std::min(idx, cum.size() - 1);
}

// Shared core of the bootstrap step and the complete-matrix shortcut: the
// row masses are the same for every particle, so one cumulative array
// serves all ancestor draws. Both callers must see bitwise-identical
// weights and log-Z increments.
void complete_step_core(ParticleSystem& system, const HmmModel& model,
                        const std::vector<double>& logm, std::uint64_t seed,
                        std::uint64_t replicate) {
  const int n = system.size();
  const int t_new = system.t + 1;
  double rowmax = logm[0];
  for (double v : logm) rowmax = std::max(rowmax, v);
  std::vector<double> cum(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    total += std::exp(logm[static_cast<std::size_t>(j)] - rowmax);
    cum[static_cast<std::size_t>(j)] = total;
  }
  if (!(total > 0.0)) {
    throw std::logic_error("alpha-SMC step: zero total mass despite positive potentials");
  }
  const double q = rowmax + std::log(total) - std::log(static_cast<double>(n));

  std::vector<double> next(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    RngStream anc(seed, replicate, static_cast<std::uint64_t>(t_new),
                  static_cast<std::uint64_t>(i), Draw::Ancestor);
    const std::size_t j = pick_index(cum, anc.uniform() * total);
    RngStream ker(seed, replicate, static_cast<std::uint64_t>(t_new),
                  static_cast<std::uint64_t>(i), Draw::Kernel);
    next[static_cast<std::size_t>(i)] =
        model.transition_sampler(t_new, system.states[j], ker);
  }
  system.states.swap(next);
  std::fill(system.log_weights.begin(), system.log_weights.end(), 0.0);
  system.log_z_shift += q;
  system.t = t_new;
}

std::vector<double> step_log_masses(const ParticleSystem& system,
                                    const HmmModel& model) {
  const int n = system.size();
  std::vector<double> logm(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double g = model.potential(system.t, system.states[static_cast<std::size_t>(j)]);
    logm[static_cast<std::size_t>(j)] =
        system.log_weights[static_cast<std::size_t>(j)] + std::log(g);
  }
  return logm;
}

}  // namespace

ParticleSystem init(const HmmModel& model, int n, std::uint64_t seed,
                    std::uint64_t replicate) {
  if (n < 1) throw std::invalid_argument("init: n < 1");
  ParticleSystem s;
  s.t = 0;
  s.states.resize(static_cast<std::size_t>(n));
  s.log_weights.assign(static_cast<std::size_t>(n), 0.0);
  s.log_z_shift = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream rng(seed, replicate, 0, static_cast<std::uint64_t>(i), Draw::Init);
    s.states[static_cast<std::size_t>(i)] = model.initial_sampler(rng);
  }
  return s;
}

void step_with_matrix(ParticleSystem& system, const HmmModel& model,
                      const ConnectivityMatrix& alpha, std::uint64_t seed,
                      std::uint64_t replicate) {
  const int n = system.size();
  if (system.t >= model.horizon) {
    throw std::out_of_range("step: time horizon reached");
  }
  if (alpha.n != n) throw std::invalid_argument("step: matrix size mismatch");
  const std::vector<double> logm = step_log_masses(system, model);
  if (alpha.complete) {
    complete_step_core(system, model, logm, seed, replicate);
    return;
  }

  const int t_new = system.t + 1;
  std::vector<double> q(static_cast<std::size_t>(n));
  std::vector<int> ancestor(static_cast<std::size_t>(n));
  std::vector<double> mass;  // per-row shifted masses, column order
  for (int i = 0; i < n; ++i) {
    const int lo = alpha.row_ptr[static_cast<std::size_t>(i)];
    const int hi = alpha.row_ptr[static_cast<std::size_t>(i) + 1];
    mass.resize(static_cast<std::size_t>(hi - lo));
    double rowmax = -HUGE_VAL;
    for (int k = lo; k < hi; ++k) {
      const double term = std::log(alpha.weight[static_cast<std::size_t>(k)]) +
                          logm[static_cast<std::size_t>(alpha.col[static_cast<std::size_t>(k)])];
      mass[static_cast<std::size_t>(k - lo)] = term;
      rowmax = std::max(rowmax, term);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < mass.size(); ++k) {
      total += std::exp(mass[k] - rowmax);
      mass[k] = total;  // cumulative, column order
    }
    if (!(total > 0.0)) {
      throw std::logic_error("alpha-SMC step: zero row mass despite positive potentials");
    }
    q[static_cast<std::size_t>(i)] = rowmax + std::log(total);

    RngStream anc(seed, replicate, static_cast<std::uint64_t>(t_new),
                  static_cast<std::uint64_t>(i), Draw::Ancestor);
    const double target = anc.uniform() * total;
    auto it = std::upper_bound(mass.begin(), mass.end(), target);
    std::size_t pos = std::min(static_cast<std::size_t>(it - mass.begin()),
                               mass.size() - 1);
    ancestor[static_cast<std::size_t>(i)] = alpha.col[static_cast<std::size_t>(lo) + pos];
  }

  std::vector<double> next(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    RngStream ker(seed, replicate, static_cast<std::uint64_t>(t_new),
                  static_cast<std::uint64_t>(i), Draw::Kernel);
    next[static_cast<std::size_t>(i)] = model.transition_sampler(
        t_new, system.states[static_cast<std::size_t>(ancestor[static_cast<std::size_t>(i)])], ker);
  }
  system.states.swap(next);

  double shift = q[0];
  for (double v : q) shift = std::max(shift, v);
  for (int i = 0; i < n; ++i) {
    system.log_weights[static_cast<std::size_t>(i)] = q[static_cast<std::size_t>(i)] - shift;
  }
  system.log_z_shift += shift;
  system.t = t_new;
}

void bootstrap_step(ParticleSystem& system, const HmmModel& model,
                    std::uint64_t seed, std::uint64_t replicate) {
  if (system.t >= model.horizon) {
    throw std::out_of_range("bootstrap_step: time horizon reached");
  }
  const std::vector<double> logm = step_log_masses(system, model);
  complete_step_core(system, model, logm, seed, replicate);
}

double weight_norm2(const ParticleSystem& system) {
  double sw = 0.0, sw2 = 0.0;
  for (double lw : system.log_weights) {
    const double w = std::exp(lw);
    sw += w;
    sw2 += w * w;
  }
  return sw2 / (sw * sw);
}

EstimateRow estimates(const ParticleSystem& system,
                      const std::vector<TestFunction>& fns) {
  const int n = system.size();
  EstimateRow row;
  row.t = system.t;
  double sw = 0.0, sw2 = 0.0;
  for (double lw : system.log_weights) {
    const double w = std::exp(lw);
    sw += w;
    sw2 += w * w;
  }
  row.log_z_hat = system.log_z_shift + std::log(sw) - std::log(static_cast<double>(n));
  row.ess_ratio = sw * sw / (static_cast<double>(n) * sw2);
  row.mu_log_scale = 2.0 * system.log_z_shift;
  row.pi_hat.resize(fns.size());
  row.mu_reduced.resize(fns.size());
  for (std::size_t k = 0; k < fns.size(); ++k) {
    double acc_pi = 0.0, acc_mu = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = std::exp(system.log_weights[static_cast<std::size_t>(i)]);
      const double phi = fns[k].fn(system.states[static_cast<std::size_t>(i)]);
      acc_pi += w * phi;
      acc_mu += w * w * phi;
    }
    row.pi_hat[k] = acc_pi / sw;
    row.mu_reduced[k] = acc_mu / static_cast<double>(n);
  }
  return row;
}

ConnectivityMatrix materialize(const ConnectivitySpec& spec, int n,
                               std::uint64_t seed, std::uint64_t replicate,
                               int step_index) {
  switch (spec.kind) {
    case ConnectivityKind::Complete:
      return complete_matrix(n);
    case ConnectivityKind::FixedRegular: {
      RngStream rng(spec.graph_seed, replicate, 0, 0, Draw::Graph);
      return random_regular_matrix(n, spec.c, rng);
    }
    case ConnectivityKind::LocalExchange:
      return local_exchange_matrix(n, spec.c);
    case ConnectivityKind::PerStepRandomRows: {
      RngStream rng(seed, replicate, static_cast<std::uint64_t>(step_index), 0,
                    Draw::Graph);
      return random_rows_matrix(n, spec.c, rng);
    }
  }
  throw std::logic_error("materialize: unreachable");
}

std::vector<EstimateRow> run(const HmmModel& model, int n,
                             const ConnectivitySpec& spec, std::uint64_t seed,
                             std::uint64_t replicate,
                             const std::vector<TestFunction>& fns, int horizon,
                             ParticleSystem* final_system) {
  const int T = horizon < 0 ? model.horizon : horizon;
  ParticleSystem system = init(model, n, seed, replicate);
  std::vector<EstimateRow> trace;
  trace.reserve(static_cast<std::size_t>(T) + 1);
  trace.push_back(estimates(system, fns));

  ConnectivityMatrix fixed;
  const bool per_step = spec.kind == ConnectivityKind::PerStepRandomRows;
  if (!per_step) fixed = materialize(spec, n, seed, replicate, 0);
  for (int t = 1; t <= T; ++t) {
    if (per_step) {
      const ConnectivityMatrix alpha = materialize(spec, n, seed, replicate, t);
      step_with_matrix(system, model, alpha, seed, replicate);
    } else {
      step_with_matrix(system, model, fixed, seed, replicate);
    }
    trace.push_back(estimates(system, fns));
  }
  if (final_system) *final_system = std::move(system);
  return trace;
}

std::vector<EstimateRow> run_bootstrap(const HmmModel& model, int n,
                                       std::uint64_t seed,
                                       std::uint64_t replicate,
                                       const std::vector<TestFunction>& fns,
                                       int horizon, ParticleSystem* final_system) {
  const int T = horizon < 0 ? model.horizon : horizon;
  ParticleSystem system = init(model, n, seed, replicate);
  std::vector<EstimateRow> trace;
  trace.reserve(static_cast<std::size_t>(T) + 1);
  trace.push_back(estimates(system, fns));
  for (int t = 1; t <= T; ++t) {
    bootstrap_step(system, model, seed, replicate);
    trace.push_back(estimates(system, fns));
  }
  if (final_system) *final_system = std::move(system);
  return trace;
}

}  // namespace alphasmc
