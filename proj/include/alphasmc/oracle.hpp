#ifndef ALPHASMC_ORACLE_HPP
#define ALPHASMC_ORACLE_HPP

#include <functional>
#include <vector>

#include "alphasmc/model.hpp"

namespace alphasmc {

/// Finite representation of a model for exact reference computations.
/// Measures are vectors nu with nu(phi) = sum_i nu_i * phi_i over the grid;
/// for quadrature models the grid weights are folded into the measure
/// entries. The same kernel and potential apply at every step.
struct ExactModel {
  std::vector<double> grid;  // state values
  std::vector<double> pi0;   // initial measure, sums to 1 (up to quadrature)
  std::vector<double> g;     // potential on the grid
  std::vector<double> kernel;  // row-major m x m; empty means identity
  int horizon = 0;

  int m() const { return static_cast<int>(grid.size()); }
  bool identity_kernel() const { return kernel.empty(); }
};

/// Exact model from a discrete HmmModel (requires exact arrays).
ExactModel exact_from_discrete(const HmmModel& model);

/// Trapezoid quadrature model for the one-step tail example on [lo, hi].
ExactModel exact_tail_example(int nodes = 20001, double lo = -8.0,
                              double hi = 8.0);

/// Evaluate a pointwise function on the model grid.
std::vector<double> phi_on_grid(const ExactModel& em,
                                const std::function<double(double)>& f);

/// Forward pass of the exact filtering recursion and the second-moment
/// measure flow at connectivity C (C may be +infinity for the bootstrap
/// limit). Indices run t = 0..T.
struct OracleRun {
  std::vector<std::vector<double>> pi;
  std::vector<double> z;
  std::vector<std::vector<double>> mu;
  std::vector<double> step_norm;  // pi_{t-1}(g_{t-1}), index t; [0] unused
  double connectivity = 0.0;
};

OracleRun oracle_forward(const ExactModel& em, int T, double connectivity);

double measure_apply(const std::vector<double>& nu, const std::vector<double>& phi);

/// Exact gamma_T(phi) by explicit summation over all length-(T+1) state
/// paths. Independent of the filtering recursion. Fails if the path space
/// exceeds 1e7 states.
double brute_force_gamma(const ExactModel& em, int T, const std::vector<double>& phi);

/// Asymptotic variance of sqrt(N) (gamma_hat_T(phi) - gamma_T(phi)).
double v_gamma(const ExactModel& em, const OracleRun& run, int T,
               const std::vector<double>& phi);

/// Asymptotic variance of sqrt(N) (pi_hat_T(phi) - pi_T(phi)).
double v_pi(const ExactModel& em, const OracleRun& run, int T,
            const std::vector<double>& phi);

}  // namespace alphasmc

#endif
