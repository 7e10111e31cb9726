#include "alphasmc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <unordered_map>

namespace alphasmc {

namespace {

std::uint64_t bounded(RngStream& rng, std::uint64_t n) {
  // rejection sampling, no modulo bias
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng.next_u64();
  } while (x >= limit);
  return x % n;
}

std::int64_t encode_edge(int u, int v, int n) {
  if (u > v) std::swap(u, v);
  return static_cast<std::int64_t>(u) * n + v;
}

ConnectivityMatrix csr_from_adjacency(int n, int c,
                                      const std::vector<std::vector<int>>& adj) {
  ConnectivityMatrix m;
  m.n = n;
  m.symmetric = true;
  m.bi_stochastic = true;
  m.row_ptr.resize(static_cast<std::size_t>(n) + 1);
  m.col.reserve(static_cast<std::size_t>(n) * c);
  m.weight.reserve(static_cast<std::size_t>(n) * c);
  const double w = 1.0 / c;
  for (int i = 0; i < n; ++i) {
    m.row_ptr[static_cast<std::size_t>(i)] = static_cast<int>(m.col.size());
    auto row = adj[static_cast<std::size_t>(i)];
    std::sort(row.begin(), row.end());
    for (int j : row) {
      m.col.push_back(j);
      m.weight.push_back(w);
    }
  }
  m.row_ptr[static_cast<std::size_t>(n)] = static_cast<int>(m.col.size());
  return m;
}

// One pairing-model draw: returns true and fills `edges` with a simple
// C-regular graph, or false on a self-loop / multi-edge collision.
bool try_pairing(int n, int c, RngStream& rng, std::vector<std::pair<int, int>>& edges) {
  const std::size_t total = static_cast<std::size_t>(n) * c;
  std::vector<int> points(total);
  std::iota(points.begin(), points.end(), 0);
  for (std::size_t k = total - 1; k > 0; --k) {
    std::size_t j = bounded(rng, k + 1);
    std::swap(points[k], points[j]);
  }
  edges.clear();
  std::unordered_map<std::int64_t, int> seen;
  seen.reserve(total);
  for (std::size_t k = 0; k < total; k += 2) {
    int u = points[k] / c;
    int v = points[k + 1] / c;
    if (u == v) return false;
    if (++seen[encode_edge(u, v, n)] > 1) return false;
    edges.emplace_back(u, v);
  }
  return true;
}

// Edge-switching repair: removes self-loops and multi-edges from a pairing
// while preserving degrees.
void repair_edges(int n, int c, RngStream& rng, std::vector<std::pair<int, int>>& edges) {
  std::unordered_map<std::int64_t, int> count;
  count.reserve(edges.size() * 2);
  for (auto& [u, v] : edges) ++count[encode_edge(u, v, n)];

  auto is_bad = [&](const std::pair<int, int>& e) {
    return e.first == e.second || count[encode_edge(e.first, e.second, n)] > 1;
  };

  std::vector<std::size_t> queue;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (is_bad(edges[k])) queue.push_back(k);
  }

  const long long cap = 500LL * n * c;
  long long attempts = 0;
  while (!queue.empty()) {
    if (++attempts > cap) {
      throw std::runtime_error("random_regular_matrix: edge-switching repair did not terminate");
    }
    std::size_t idx = queue.back();
    if (!is_bad(edges[idx])) {
      queue.pop_back();
      continue;
    }
    std::size_t j = bounded(rng, edges.size());
    if (j == idx) continue;
    auto [u, v] = edges[idx];
    auto [x, y] = edges[j];
    if (bounded(rng, 2) == 1) std::swap(x, y);
    if (u == x || u == y || v == x || v == y) continue;
    const auto e1 = encode_edge(u, x, n);
    const auto e2 = encode_edge(v, y, n);
    if (e1 == e2 || count[e1] > 0 || count[e2] > 0) continue;
    --count[encode_edge(u, v, n)];
    --count[encode_edge(x, y, n)];
    ++count[e1];
    ++count[e2];
    edges[idx] = {u, x};
    edges[j] = {v, y};
  }
}

}  // namespace

std::string to_string(ConnectivityKind kind) {
  switch (kind) {
    case ConnectivityKind::Complete: return "complete";
    case ConnectivityKind::FixedRegular: return "fixed-regular";
    case ConnectivityKind::LocalExchange: return "local-exchange";
    case ConnectivityKind::PerStepRandomRows: return "per-step-random-rows";
  }
  return "?";
}

ConnectivityKind connectivity_kind_from_string(const std::string& name) {
  if (name == "complete" || name == "bootstrap") return ConnectivityKind::Complete;
  if (name == "fixed-regular") return ConnectivityKind::FixedRegular;
  if (name == "local-exchange") return ConnectivityKind::LocalExchange;
  if (name == "per-step-random-rows") return ConnectivityKind::PerStepRandomRows;
  throw std::invalid_argument("unknown connectivity kind: " + name);
}

ConnectivityMatrix complete_matrix(int n) {
  if (n < 1) throw std::invalid_argument("complete_matrix: n < 1");
  ConnectivityMatrix m;
  m.n = n;
  m.complete = true;
  m.bi_stochastic = true;
  m.symmetric = true;
  if (n <= 4096) {
    m.row_ptr.resize(static_cast<std::size_t>(n) + 1);
    m.col.resize(static_cast<std::size_t>(n) * n);
    m.weight.assign(static_cast<std::size_t>(n) * n, 1.0 / n);
    for (int i = 0; i <= n; ++i) m.row_ptr[static_cast<std::size_t>(i)] = i * n;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m.col[static_cast<std::size_t>(i) * n + j] = j;
    }
  }
  return m;
}

ConnectivityMatrix random_regular_matrix(int n, int c, RngStream& rng) {
  if (c < 3 || c >= n) throw std::invalid_argument("random_regular_matrix: need 3 <= C < n");
  if ((static_cast<long long>(n) * c) % 2 != 0) {
    throw std::invalid_argument("random_regular_matrix: n*C must be even");
  }
  std::vector<std::pair<int, int>> edges;
  bool simple = false;
  for (int attempt = 0; attempt < 500; ++attempt) {
    if (try_pairing(n, c, rng, edges)) {
      simple = true;
      break;
    }
  }
  if (!simple) {
    // take the last pairing in full and repair it
    const std::size_t total = static_cast<std::size_t>(n) * c;
    std::vector<int> points(total);
    std::iota(points.begin(), points.end(), 0);
    for (std::size_t k = total - 1; k > 0; --k) {
      std::size_t j = bounded(rng, k + 1);
      std::swap(points[k], points[j]);
    }
    edges.clear();
    for (std::size_t k = 0; k < total; k += 2) {
      edges.emplace_back(points[k] / c, points[k + 1] / c);
    }
    repair_edges(n, c, rng, edges);
  }

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto& row : adj) row.reserve(static_cast<std::size_t>(c));
  for (auto& [u, v] : edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(adj[static_cast<std::size_t>(i)].size()) != c) {
      throw std::runtime_error("random_regular_matrix: degree mismatch after generation");
    }
  }
  return csr_from_adjacency(n, c, adj);
}

ConnectivityMatrix local_exchange_matrix(int n, int c) {
  if (c % 2 == 0) throw std::invalid_argument("local_exchange_matrix: C must be odd");
  if (c < 1 || c > n) throw std::invalid_argument("local_exchange_matrix: need 1 <= C <= n");
  const int half = (c - 1) / 2;
  ConnectivityMatrix m;
  m.n = n;
  m.symmetric = true;
  m.bi_stochastic = true;
  m.row_ptr.resize(static_cast<std::size_t>(n) + 1);
  m.col.reserve(static_cast<std::size_t>(n) * c);
  m.weight.assign(static_cast<std::size_t>(n) * c, 1.0 / c);
  std::vector<int> cols(static_cast<std::size_t>(c));
  for (int i = 0; i < n; ++i) {
    m.row_ptr[static_cast<std::size_t>(i)] = i * c;
    for (int d = -half; d <= half; ++d) {
      int j = ((i + d) % n + n) % n;
      cols[static_cast<std::size_t>(d + half)] = j;
    }
    std::sort(cols.begin(), cols.end());
    m.col.insert(m.col.end(), cols.begin(), cols.end());
  }
  m.row_ptr[static_cast<std::size_t>(n)] = n * c;
  return m;
}

ConnectivityMatrix random_rows_matrix(int n, int c, RngStream& rng) {
  if (c < 1 || c > n) throw std::invalid_argument("random_rows_matrix: need 1 <= C <= n");
  ConnectivityMatrix m;
  m.n = n;
  m.row_ptr.resize(static_cast<std::size_t>(n) + 1);
  m.col.resize(static_cast<std::size_t>(n) * c);
  m.weight.assign(static_cast<std::size_t>(n) * c, 1.0 / c);
  std::vector<int> row(static_cast<std::size_t>(c));
  for (int i = 0; i < n; ++i) {
    m.row_ptr[static_cast<std::size_t>(i)] = i * c;
    // Floyd's sampling without replacement
    int filled = 0;
    for (int k = n - c; k < n; ++k) {
      int t = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(k) + 1));
      bool present = false;
      for (int q = 0; q < filled; ++q) {
        if (row[static_cast<std::size_t>(q)] == t) {
          present = true;
          break;
        }
      }
      row[static_cast<std::size_t>(filled++)] = present ? k : t;
    }
    std::sort(row.begin(), row.begin() + filled);
    std::copy(row.begin(), row.end(), m.col.begin() + static_cast<std::size_t>(i) * c);
  }
  m.row_ptr[static_cast<std::size_t>(n)] = n * c;
  return m;
}

namespace {

void apply_alpha(const ConnectivityMatrix& a, const std::vector<double>& x,
                 std::vector<double>& y) {
  const int n = a.n;
  if (a.complete) {
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    std::fill(y.begin(), y.end(), mean);
    return;
  }
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = a.row_ptr[static_cast<std::size_t>(i)];
         k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      s += a.weight[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(a.col[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(i)] = s;
  }
}

void apply_alpha_transpose(const ConnectivityMatrix& a, const std::vector<double>& x,
                           std::vector<double>& y) {
  const int n = a.n;
  if (a.complete) {
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    std::fill(y.begin(), y.end(), mean);
    return;
  }
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    for (int k = a.row_ptr[static_cast<std::size_t>(i)];
         k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      y[static_cast<std::size_t>(a.col[static_cast<std::size_t>(k)])] +=
          a.weight[static_cast<std::size_t>(k)] * xi;
    }
  }
}

void project_off_ones(std::vector<double>& v) {
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double mixing_constant(const ConnectivityMatrix& alpha, double tol, int max_iter) {
  const int n = alpha.n;
  if (n <= 1) return 0.0;

  std::vector<double> v(static_cast<std::size_t>(n));
  RngStream rng(0x6d697869, static_cast<std::uint64_t>(n),
                alpha.col.size(), 0, Draw::Graph);
  for (double& x : v) x = rng.uniform() - 0.5;
  project_off_ones(v);
  double nv = norm2(v);
  if (nv == 0.0) v[0] = 1.0, v[1] = -1.0, nv = std::sqrt(2.0);
  for (double& x : v) x /= nv;

  std::vector<double> u(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n));
  double theta_prev2 = 0.0, theta_prev = 0.0;
  double acc_prev = -1.0;
  int stable = 0;
  double last_residual = 1.0;

  for (int it = 0; it < max_iter; ++it) {
    apply_alpha(alpha, v, u);
    apply_alpha_transpose(alpha, u, z);
    project_off_ones(z);
    double theta = 0.0;
    for (int i = 0; i < n; ++i) theta += v[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];

    // Aitken acceleration of the Rayleigh-quotient sequence
    double acc = theta;
    if (it >= 2) {
      const double d0 = theta_prev - theta_prev2;
      const double d1 = theta - theta_prev;
      if (d0 != 0.0 && ((d0 > 0) == (d1 > 0)) && std::abs(d1) < std::abs(d0)) {
        const double r = d1 / d0;
        acc = theta + d1 * r / (1.0 - r);
      }
    }

    if (acc_prev >= 0.0) {
      last_residual = std::abs(acc - acc_prev);
      if (last_residual <= tol * std::abs(acc) + 1e-18) {
        if (++stable >= 3) return std::sqrt(std::max(acc, 0.0));
      } else {
        stable = 0;
      }
    }
    acc_prev = acc;
    theta_prev2 = theta_prev;
    theta_prev = theta;

    double nz = norm2(z);
    if (nz < 1e-150) return 0.0;  // operator annihilates the complement of 1
    for (double& x : z) x /= nz;
    v.swap(z);
  }
  throw MixingNonConvergence(std::sqrt(std::max(acc_prev, 0.0)), last_residual, max_iter);
}

double local_exchange_mixing_exact(int n, int c) {
  const int half = (c - 1) / 2;
  const double twopi = 6.283185307179586476925286766559;
  double best = 0.0;
  for (int k = 1; k < n; ++k) {
    double s = 1.0;
    for (int m = 1; m <= half; ++m) {
      s += 2.0 * std::cos(twopi * k * m / n);
    }
    best = std::max(best, std::abs(s / c));
  }
  return best;
}

}  // namespace alphasmc
