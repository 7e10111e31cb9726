#ifndef ALPHASMC_GRAPH_HPP
#define ALPHASMC_GRAPH_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "alphasmc/rng.hpp"

namespace alphasmc {

/// Sparse row-stochastic connectivity matrix in CSR layout. When `complete`
/// is set the matrix is alpha_ij = 1/n and consumers may short-circuit; the
/// CSR arrays are only materialized for small n in that case.
struct ConnectivityMatrix {
  int n = 0;
  std::vector<int> row_ptr;   // size n + 1
  std::vector<int> col;
  std::vector<double> weight;
  bool bi_stochastic = false;
  bool symmetric = false;
  bool complete = false;

  int row_size(int i) const { return row_ptr[i + 1] - row_ptr[i]; }
};

enum class ConnectivityKind { Complete, FixedRegular, LocalExchange, PerStepRandomRows };

/// Declarative matrix description used by the filter and the experiment
/// harness. C is ignored for the complete kind.
struct ConnectivitySpec {
  ConnectivityKind kind = ConnectivityKind::Complete;
  int c = 0;
  std::uint64_t graph_seed = 0;
};

std::string to_string(ConnectivityKind kind);
ConnectivityKind connectivity_kind_from_string(const std::string& name);

/// alpha_ij = 1/n. CSR entries are materialized only for n <= 4096.
ConnectivityMatrix complete_matrix(int n);

/// Random-walk transition matrix of a simple undirected C-regular graph on n
/// vertices, drawn (approximately uniformly) via the pairing model with
/// restarts and an edge-switching repair pass. Requires 3 <= C < n and n*C
/// even.
ConnectivityMatrix random_regular_matrix(int n, int c, RngStream& rng);

/// Circulant ring matrix: row i has entries 1/C at columns i-k..i+k mod n
/// with k = (C-1)/2. Requires C odd, 1 <= C <= n.
ConnectivityMatrix local_exchange_matrix(int n, int c);

/// Each row independently holds C entries 1/C at columns drawn without
/// replacement from [0, n). Row-stochastic only.
ConnectivityMatrix random_rows_matrix(int n, int c, RngStream& rng);

struct MixingNonConvergence : std::runtime_error {
  MixingNonConvergence(double estimate, double residual, int iterations)
      : std::runtime_error("mixing_constant: no convergence after " +
                           std::to_string(iterations) +
                           " iterations (estimate " + std::to_string(estimate) +
                           ", residual " + std::to_string(residual) + ")"),
        last_estimate(estimate),
        last_residual(residual) {}
  double last_estimate;
  double last_residual;
};

/// Largest singular value of alpha restricted to the orthogonal complement
/// of the all-ones vector: power iteration on P alpha^T alpha P with
/// Aitken-accelerated Rayleigh quotients. Deterministic start vector.
double mixing_constant(const ConnectivityMatrix& alpha, double tol = 1e-10,
                       int max_iter = 100000);

/// Exact mixing constant of the local-exchange circulant, from its discrete
/// Fourier spectrum. Reference for tests.
double local_exchange_mixing_exact(int n, int c);

}  // namespace alphasmc

#endif
