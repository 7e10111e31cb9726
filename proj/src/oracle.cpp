#include "alphasmc/oracle.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace alphasmc {

namespace {

// (K phi)_i = sum_j K_ij phi_j
std::vector<double> kernel_apply(const ExactModel& em, const std::vector<double>& phi) {
  if (em.identity_kernel()) return phi;
  const int m = em.m();
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      s += em.kernel[static_cast<std::size_t>(i) * m + j] * phi[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

// (K^T nu)_j = sum_i K_ij nu_i
std::vector<double> kernel_pushforward(const ExactModel& em, const std::vector<double>& nu) {
  if (em.identity_kernel()) return nu;
  const int m = em.m();
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    const double w = nu[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j) {
      out[static_cast<std::size_t>(j)] += em.kernel[static_cast<std::size_t>(i) * m + j] * w;
    }
  }
  return out;
}

double variance_under(const std::vector<double>& nu, const std::vector<double>& phi) {
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    m1 += nu[i] * phi[i];
    m2 += nu[i] * phi[i] * phi[i];
  }
  return m2 - m1 * m1;
}

double v_pi_rec(const ExactModel& em, const OracleRun& run, int t,
                const std::vector<double>& phi) {
  if (t == 0) return variance_under(run.pi[0], phi);
  const double c = measure_apply(run.pi[static_cast<std::size_t>(t)], phi);
  std::vector<double> centred(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) centred[i] = phi[i] - c;

  std::vector<double> pushed = kernel_apply(em, centred);
  for (std::size_t i = 0; i < pushed.size(); ++i) pushed[i] *= em.g[i];  // Q_t

  std::vector<double> centred2(centred.size());
  for (std::size_t i = 0; i < centred.size(); ++i) centred2[i] = centred[i] * centred[i];

  const double s = run.step_norm[static_cast<std::size_t>(t)];
  return v_pi_rec(em, run, t - 1, pushed) / (s * s) +
         measure_apply(run.mu[static_cast<std::size_t>(t)], centred2);
}

}  // namespace

ExactModel exact_from_discrete(const HmmModel& model) {
  if (!model.arrays) {
    throw std::invalid_argument("exact_from_discrete: model has no exact arrays");
  }
  const auto& a = *model.arrays;
  ExactModel em;
  em.horizon = model.horizon;
  em.grid.resize(static_cast<std::size_t>(a.n_states));
  for (int i = 0; i < a.n_states; ++i) em.grid[static_cast<std::size_t>(i)] = i;
  em.pi0 = a.pi0;
  em.g = a.potential;
  em.kernel = a.transition;
  return em;
}

ExactModel exact_tail_example(int nodes, double lo, double hi) {
  ExactModel em;
  em.horizon = 1;
  em.grid.resize(static_cast<std::size_t>(nodes));
  em.pi0.resize(static_cast<std::size_t>(nodes));
  em.g.resize(static_cast<std::size_t>(nodes));
  const double h = (hi - lo) / (nodes - 1);
  const double norm = 1.0 / std::sqrt(6.283185307179586476925286766559);
  for (int i = 0; i < nodes; ++i) {
    const double x = lo + h * i;
    const double w = (i == 0 || i == nodes - 1) ? h / 2.0 : h;
    em.grid[static_cast<std::size_t>(i)] = x;
    em.pi0[static_cast<std::size_t>(i)] = w * norm * std::exp(-0.5 * x * x);
    // Nodes landing exactly on the jump take the midpoint value, keeping the
    // trapezoid rule second-order accurate across the discontinuity.
    const double edge_gap = std::abs(std::abs(x) - 0.1);
    if (edge_gap < 0.25 * h) {
      em.g[static_cast<std::size_t>(i)] = 0.1 + 50.0;
    } else {
      em.g[static_cast<std::size_t>(i)] = 0.1 + (std::abs(x) < 0.1 ? 100.0 : 0.0);
    }
  }
  return em;
}

std::vector<double> phi_on_grid(const ExactModel& em,
                                const std::function<double(double)>& f) {
  std::vector<double> out(em.grid.size());
  for (std::size_t i = 0; i < em.grid.size(); ++i) out[i] = f(em.grid[i]);
  return out;
}

double measure_apply(const std::vector<double>& nu, const std::vector<double>& phi) {
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) s += nu[i] * phi[i];
  return s;
}

OracleRun oracle_forward(const ExactModel& em, int T, double connectivity) {
  if (connectivity < 1.0) throw std::invalid_argument("oracle_forward: C < 1");
  const int m = em.m();
  OracleRun run;
  run.connectivity = connectivity;
  run.pi.resize(static_cast<std::size_t>(T) + 1);
  run.mu.resize(static_cast<std::size_t>(T) + 1);
  run.z.assign(static_cast<std::size_t>(T) + 1, 1.0);
  run.step_norm.assign(static_cast<std::size_t>(T) + 1, 0.0);
  run.pi[0] = em.pi0;
  run.mu[0] = em.pi0;

  const bool bootstrap = std::isinf(connectivity);
  for (int t = 1; t <= T; ++t) {
    const auto& prev = run.pi[static_cast<std::size_t>(t) - 1];
    std::vector<double> w(static_cast<std::size_t>(m));
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      w[static_cast<std::size_t>(i)] = em.g[static_cast<std::size_t>(i)] * prev[static_cast<std::size_t>(i)];
      s += w[static_cast<std::size_t>(i)];
    }
    if (!(s > 0.0)) throw std::logic_error("oracle_forward: non-positive normalization");
    run.step_norm[static_cast<std::size_t>(t)] = s;
    run.z[static_cast<std::size_t>(t)] = run.z[static_cast<std::size_t>(t) - 1] * s;
    auto pit = kernel_pushforward(em, w);
    for (double& v : pit) v /= s;
    run.pi[static_cast<std::size_t>(t)] = std::move(pit);

    const double z2 = run.z[static_cast<std::size_t>(t)] * run.z[static_cast<std::size_t>(t)];
    std::vector<double> mut(static_cast<std::size_t>(m), 0.0);
    if (!bootstrap) {
      std::vector<double> inner(static_cast<std::size_t>(m));
      const auto& muprev = run.mu[static_cast<std::size_t>(t) - 1];
      for (int i = 0; i < m; ++i) {
        const double g = em.g[static_cast<std::size_t>(i)];
        inner[static_cast<std::size_t>(i)] = g * g * muprev[static_cast<std::size_t>(i)];
      }
      mut = kernel_pushforward(em, inner);
      for (double& v : mut) v /= connectivity;
    }
    const double coeff = bootstrap ? 1.0 : (connectivity - 1.0) / connectivity;
    for (int i = 0; i < m; ++i) {
      mut[static_cast<std::size_t>(i)] += coeff * z2 * run.pi[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
    }
    run.mu[static_cast<std::size_t>(t)] = std::move(mut);
  }
  return run;
}

double brute_force_gamma(const ExactModel& em, int T, const std::vector<double>& phi) {
  const int m = em.m();
  double paths = 1.0;
  for (int t = 0; t <= T; ++t) paths *= m;
  if (paths > 1e7) throw std::invalid_argument("brute_force_gamma: path space too large");

  // depth-first sum over paths x_0..x_T with weight pi0 * prod K * prod g
  std::vector<int> path(static_cast<std::size_t>(T) + 1, 0);
  double total = 0.0;
  std::function<void(int, double)> recurse = [&](int t, double weight) {
    if (t == T) {
      total += weight * phi[static_cast<std::size_t>(path[static_cast<std::size_t>(T)])];
      return;
    }
    const int x = path[static_cast<std::size_t>(t)];
    const double w = weight * em.g[static_cast<std::size_t>(x)];
    for (int y = 0; y < m; ++y) {
      const double k = em.identity_kernel()
                           ? (x == y ? 1.0 : 0.0)
                           : em.kernel[static_cast<std::size_t>(x) * m + y];
      if (k == 0.0) continue;
      path[static_cast<std::size_t>(t) + 1] = y;
      recurse(t + 1, w * k);
    }
  };
  for (int x = 0; x < m; ++x) {
    path[0] = x;
    recurse(0, em.pi0[static_cast<std::size_t>(x)]);
  }
  return total;
}

double v_gamma(const ExactModel& em, const OracleRun& run, int T,
               const std::vector<double>& phi) {
  std::vector<double> psi = phi;
  double acc = 0.0;
  for (int t = T; t >= 1; --t) {
    std::vector<double> psi2(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) psi2[i] = psi[i] * psi[i];
    const double zt = run.z[static_cast<std::size_t>(t)];
    const double pit = measure_apply(run.pi[static_cast<std::size_t>(t)], psi);
    acc += measure_apply(run.mu[static_cast<std::size_t>(t)], psi2) - zt * zt * pit * pit;
    psi = kernel_apply(em, psi);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= em.g[i];  // Q_t
  }
  return acc + variance_under(run.pi[0], psi);
}

double v_pi(const ExactModel& em, const OracleRun& run, int T,
            const std::vector<double>& phi) {
  return v_pi_rec(em, run, T, phi);
}

}  // namespace alphasmc
