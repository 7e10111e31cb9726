#include "alphasmc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "alphasmc/metrics.hpp"
#include "alphasmc/oracle.hpp"

namespace alphasmc {

namespace {

// Replicate key reserved for large reference ("truth") runs, outside the
// 0..replicates-1 range used by method runs.
constexpr std::uint64_t kReferenceReplicate = 0xffffffffULL;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

// Runs fn(job) for job = 0..count-1 on up to `threads` workers. Output
// slots are preallocated by the caller, so scheduling never affects
// results.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (int j = 0; j < count; ++j) fn(j);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int j = next.fetch_add(1);
      if (j >= count) return;
      fn(j);
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min(threads, count);
  pool.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

ConnectivitySpec spec_for_method(const std::string& method, int c,
                                 std::uint64_t base_seed, int n) {
  ConnectivitySpec spec;
  if (method == "bootstrap" || method == "complete") {
    spec.kind = ConnectivityKind::Complete;
    return spec;
  }
  spec.c = c;
  spec.kind = connectivity_kind_from_string(method);
  if (spec.kind == ConnectivityKind::LocalExchange) {
    spec.c = local_exchange_width(c);
  }
  spec.graph_seed = detail::mix(base_seed, static_cast<std::uint64_t>(c) * 1000003u +
                                               static_cast<std::uint64_t>(n));
  return spec;
}

void check_feasible(const std::string& method, int n, int c) {
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("infeasible grid entry (N=" + std::to_string(n) +
                                ", C=" + std::to_string(c) + ", method=" + method +
                                "): " + why);
  };
  if (n < 1) fail("N < 1");
  if (method == "bootstrap" || method == "complete") return;
  if (method == "fixed-regular") {
    if (c < 3 || c >= n) fail("need 3 <= C < N");
    if ((static_cast<long long>(n) * c) % 2 != 0) fail("N*C must be even");
  } else if (method == "local-exchange") {
    if (local_exchange_width(c) > n) fail("window exceeds N");
  } else if (method == "per-step-random-rows") {
    if (c < 1 || c > n) fail("need 1 <= C <= N");
  } else {
    fail("unknown method");
  }
}

/// Conditional mean of the next state given the current one; used for the
/// one-step predictive-mean target.
std::function<double(double)> predictive_mean_fn(const std::string& tag) {
  if (tag == "tracking") return [](double x) { return -(x - 1.0) / 2.0; };
  if (tag == "ar1-indicator") return [](double x) { return 0.9 * x; };
  throw std::invalid_argument("no predictive mean defined for model " + tag);
}

HmmModel build_model(const ExperimentConfig& cfg) {
  return make_builtin(cfg.model_tag, cfg.model_params, cfg.observation_seed);
}

std::vector<TestFunction> build_phis(const ExperimentConfig& cfg) {
  std::vector<TestFunction> fns;
  for (const auto& name : cfg.phis) fns.push_back(test_function(name));
  return fns;
}

std::string trace_header(const std::vector<TestFunction>& fns,
                         const std::string& extra_front) {
  std::string h = extra_front + "replicate,t,log_Z_hat,ess_ratio";
  for (const auto& f : fns) h += ",pi_hat_" + f.name;
  for (const auto& f : fns) h += ",mu_hat_" + f.name;
  return h + "\n";
}

void append_trace(std::string& csv, const std::string& extra_front, int replicate,
                  const std::vector<EstimateRow>& trace) {
  for (const auto& row : trace) {
    csv += extra_front + std::to_string(replicate) + "," + std::to_string(row.t) +
           "," + fmt(row.log_z_hat) + "," + fmt(row.ess_ratio);
    for (double v : row.pi_hat) csv += "," + fmt(v);
    for (std::size_t k = 0; k < row.mu_reduced.size(); ++k) {
      csv += "," + fmt(row.mu_hat(k));
    }
    csv += "\n";
  }
}

struct OutputSet {
  std::string raw;
  std::string summary;
};

OutputSet run_mixing_sweep(const ExperimentConfig& cfg, int /*threads*/) {
  OutputSet out;
  out.raw = "C,N,graph,lambda\n";
  out.summary = "C,N,median,q05,q95,mean,count,limit\n";
  for (int c : cfg.c_grid) {
    for (int n : cfg.n_grid) {
      std::vector<double> lambdas;
      for (int g = 0; g < cfg.graphs; ++g) {
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(c),
                      static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(g),
                      Draw::Graph);
        const auto alpha = random_regular_matrix(n, c, rng);
        const double lambda = mixing_constant(alpha);
        lambdas.push_back(lambda);
        out.raw += std::to_string(c) + "," + std::to_string(n) + "," +
                   std::to_string(g) + "," + fmt(lambda) + "\n";
      }
      const auto s = summarize("", lambdas);
      const double limit = 2.0 * std::sqrt(static_cast<double>(c) - 1.0) / c;
      out.summary += std::to_string(c) + "," + std::to_string(n) + "," +
                     fmt(s.median) + "," + fmt(s.q05) + "," + fmt(s.q95) + "," +
                     fmt(s.mean) + "," + std::to_string(s.count) + "," + fmt(limit) + "\n";
    }
  }
  return out;
}

OutputSet run_estimate_vs_c(const ExperimentConfig& cfg, int threads) {
  const HmmModel model = build_model(cfg);
  const auto fns = build_phis(cfg);
  const int n = cfg.n_grid.at(0);
  OutputSet out;
  out.raw = trace_header(fns, "method,C,N,");
  out.summary = "method,C,N,phi,median,q05,q95,mean,count\n";

  for (const auto& method : cfg.methods) {
    const bool is_bootstrap = method == "bootstrap" || method == "complete";
    const std::vector<int> grid = is_bootstrap ? std::vector<int>{0} : cfg.c_grid;
    for (int c : grid) {
      const auto spec = spec_for_method(method, c, cfg.seed, n);
      std::vector<std::vector<EstimateRow>> traces(static_cast<std::size_t>(cfg.replicates));
      parallel_for(cfg.replicates, threads, [&](int r) {
        traces[static_cast<std::size_t>(r)] =
            run(model, n, spec, cfg.seed, static_cast<std::uint64_t>(r), fns);
      });
      const std::string front =
          method + "," + std::to_string(is_bootstrap ? 0 : c) + "," + std::to_string(n) + ",";
      std::vector<double> finals;
      for (int r = 0; r < cfg.replicates; ++r) {
        append_trace(out.raw, front, r, traces[static_cast<std::size_t>(r)]);
        finals.push_back(traces[static_cast<std::size_t>(r)].back().pi_hat.at(0));
      }
      const auto s = summarize("", finals);
      out.summary += front + fns.at(0).name + "," + fmt(s.median) + "," + fmt(s.q05) +
                     "," + fmt(s.q95) + "," + fmt(s.mean) + "," +
                     std::to_string(s.count) + "\n";
    }
  }
  return out;
}

OutputSet run_wasserstein_vs_c(const ExperimentConfig& cfg, int threads) {
  const HmmModel model = build_model(cfg);
  const auto fns = build_phis(cfg);
  const int n = cfg.n_grid.at(0);

  ParticleSystem ref_system;
  run_bootstrap(model, cfg.n_ref, cfg.seed, kReferenceReplicate, fns, -1, &ref_system);
  std::vector<double> ref_w(ref_system.log_weights.size());
  for (std::size_t i = 0; i < ref_w.size(); ++i) {
    ref_w[i] = std::exp(ref_system.log_weights[i]);
  }
  const WeightedSample reference =
      WeightedSample::normalized(ref_system.states, std::move(ref_w));

  OutputSet out;
  out.raw = "method,C,N,replicate,w1\n";
  out.summary = "method,C,N,median,q05,q95,mean,count\n";
  for (const auto& method : cfg.methods) {
    for (int c : cfg.c_grid) {
      const auto spec = spec_for_method(method, c, cfg.seed, n);
      std::vector<double> w1(static_cast<std::size_t>(cfg.replicates));
      parallel_for(cfg.replicates, threads, [&](int r) {
        ParticleSystem sys;
        run(model, n, spec, cfg.seed, static_cast<std::uint64_t>(r), fns, -1, &sys);
        std::vector<double> w(sys.log_weights.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(sys.log_weights[i]);
        w1[static_cast<std::size_t>(r)] = wasserstein1(
            WeightedSample::normalized(sys.states, std::move(w)), reference);
      });
      const std::string front =
          method + "," + std::to_string(c) + "," + std::to_string(n) + ",";
      for (int r = 0; r < cfg.replicates; ++r) {
        out.raw += front + std::to_string(r) + "," +
                   fmt(w1[static_cast<std::size_t>(r)]) + "\n";
      }
      const auto s = summarize("", w1);
      out.summary += front + fmt(s.median) + "," + fmt(s.q05) + "," + fmt(s.q95) +
                     "," + fmt(s.mean) + "," + std::to_string(s.count) + "\n";
    }
  }
  return out;
}

OutputSet run_mse(const ExperimentConfig& cfg, int threads, bool over_n) {
  const HmmModel model = build_model(cfg);
  const auto pred = predictive_mean_fn(cfg.model_tag);
  const std::vector<TestFunction> fns = {{"pred_mean", pred}};
  const int T = model.horizon;

  // Ground truth from one large-N bootstrap run.
  const auto truth_trace = run_bootstrap(model, cfg.n_ref, cfg.seed, kReferenceReplicate, fns);
  const double truth_logz = truth_trace.back().log_z_hat;
  const double truth_pred = truth_trace[static_cast<std::size_t>(T - 1)].pi_hat.at(0);

  OutputSet out;
  out.raw = "method,C,N,replicate,log_z_T,pred_mean\n";
  out.summary =
      "method,C,N,target,mse,relative_mse,median_relative,truth\n";

  struct Cell {
    std::vector<double> logz;
    std::vector<double> pred;
  };

  auto run_cell = [&](const std::string& method, int c, int n) {
    const auto spec = spec_for_method(method, c, cfg.seed, n);
    Cell cell;
    cell.logz.resize(static_cast<std::size_t>(cfg.replicates));
    cell.pred.resize(static_cast<std::size_t>(cfg.replicates));
    parallel_for(cfg.replicates, threads, [&](int r) {
      const auto trace = run(model, n, spec, cfg.seed, static_cast<std::uint64_t>(r), fns);
      cell.logz[static_cast<std::size_t>(r)] = trace.back().log_z_hat;
      cell.pred[static_cast<std::size_t>(r)] =
          trace[static_cast<std::size_t>(T - 1)].pi_hat.at(0);
    });
    return cell;
  };

  const std::vector<int>& outer = over_n ? cfg.n_grid : cfg.c_grid;
  for (int v : outer) {
    const int n = over_n ? v : cfg.n_grid.at(0);
    const int c = over_n ? cfg.c_grid.at(0) : v;
    const Cell base = run_cell("bootstrap", c, n);
    for (const auto& method : cfg.methods) {
      if (method == "bootstrap" || method == "complete") continue;
      const Cell cell = run_cell(method, c, n);
      const std::string front =
          method + "," + std::to_string(c) + "," + std::to_string(n) + ",";
      for (int r = 0; r < cfg.replicates; ++r) {
        out.raw += front + std::to_string(r) + "," +
                   fmt(cell.logz[static_cast<std::size_t>(r)]) + "," +
                   fmt(cell.pred[static_cast<std::size_t>(r)]) + "\n";
      }
      auto emit = [&](const std::string& target, const std::vector<double>& xs,
                      const std::vector<double>& bs, double truth) {
        const double base_mse = mse(bs, truth);
        std::vector<double> ratios;
        for (double x : xs) ratios.push_back((x - truth) * (x - truth) / base_mse);
        out.summary += front + target + "," + fmt(mse(xs, truth)) + "," +
                       fmt(relative_mse(xs, bs, truth)) + "," +
                       fmt(quantile(ratios, 0.5)) + "," + fmt(truth) + "\n";
      };
      emit("log_likelihood", cell.logz, base.logz, truth_logz);
      emit("pred_mean", cell.pred, base.pred, truth_pred);
    }
  }
  return out;
}

OutputSet run_clt_check(const ExperimentConfig& cfg, int threads) {
  const HmmModel model = build_model(cfg);
  const auto fns = build_phis(cfg);
  const int n = cfg.n_grid.at(0);
  const int c = cfg.c_grid.at(0);
  const int T = model.horizon;

  const ExactModel em = exact_from_discrete(model);
  const auto oracle = oracle_forward(em, T, static_cast<double>(c));
  const auto phi_grid = phi_on_grid(em, fns.at(0).fn);
  const double v_ref = v_gamma(em, oracle, T, phi_grid);

  ConnectivitySpec spec;
  spec.kind = ConnectivityKind::PerStepRandomRows;
  spec.c = c;

  std::vector<double> gamma(static_cast<std::size_t>(cfg.replicates));
  parallel_for(cfg.replicates, threads, [&](int r) {
    const auto trace = run(model, n, spec, cfg.seed, static_cast<std::uint64_t>(r), fns);
    gamma[static_cast<std::size_t>(r)] = trace.back().gamma_hat(0);
  });

  OutputSet out;
  out.raw = "C,N,replicate,gamma_hat\n";
  double mean = 0.0;
  for (int r = 0; r < cfg.replicates; ++r) {
    out.raw += std::to_string(c) + "," + std::to_string(n) + "," + std::to_string(r) +
               "," + fmt(gamma[static_cast<std::size_t>(r)]) + "\n";
    mean += gamma[static_cast<std::size_t>(r)];
  }
  mean /= cfg.replicates;
  double var = 0.0;
  for (double gh : gamma) var += (gh - mean) * (gh - mean);
  var /= (cfg.replicates - 1);
  out.summary = "C,N,phi,empirical_n_var,oracle_v_gamma,ratio,empirical_mean,exact_gamma\n";
  const double exact_gamma = oracle.z[static_cast<std::size_t>(T)] *
                             measure_apply(oracle.pi[static_cast<std::size_t>(T)], phi_grid);
  out.summary += std::to_string(c) + "," + std::to_string(n) + "," + fns.at(0).name +
                 "," + fmt(n * var) + "," + fmt(v_ref) + "," + fmt(n * var / v_ref) +
                 "," + fmt(mean) + "," + fmt(exact_gamma) + "\n";
  return out;
}

OutputSet run_density_compare(const ExperimentConfig& cfg, int threads) {
  const HmmModel model = build_model(cfg);
  const auto fns = build_phis(cfg);
  const int n = cfg.n_grid.at(0);
  OutputSet out;
  out.raw = "method,C,N,replicate,particle,state\n";
  out.summary = "method,C,N,median,q05,q95,mean,count\n";
  for (const auto& method : cfg.methods) {
    const bool is_bootstrap = method == "bootstrap" || method == "complete";
    const std::vector<int> grid = is_bootstrap ? std::vector<int>{0} : cfg.c_grid;
    for (int c : grid) {
      const auto spec = spec_for_method(method, c, cfg.seed, n);
      std::vector<ParticleSystem> systems(static_cast<std::size_t>(cfg.replicates));
      parallel_for(cfg.replicates, threads, [&](int r) {
        run(model, n, spec, cfg.seed, static_cast<std::uint64_t>(r), fns, -1,
            &systems[static_cast<std::size_t>(r)]);
      });
      const std::string front =
          method + "," + std::to_string(is_bootstrap ? 0 : c) + "," + std::to_string(n) + ",";
      std::vector<double> all;
      for (int r = 0; r < cfg.replicates; ++r) {
        const auto& sys = systems[static_cast<std::size_t>(r)];
        for (int i = 0; i < sys.size(); ++i) {
          out.raw += front + std::to_string(r) + "," + std::to_string(i) + "," +
                     fmt(sys.states[static_cast<std::size_t>(i)]) + "\n";
          all.push_back(sys.states[static_cast<std::size_t>(i)]);
        }
      }
      const auto s = summarize("", all);
      out.summary += front + fmt(s.median) + "," + fmt(s.q05) + "," + fmt(s.q95) +
                     "," + fmt(s.mean) + "," + std::to_string(s.count) + "\n";
    }
  }
  return out;
}

}  // namespace

int local_exchange_width(int c) { return c % 2 == 1 ? c : c + 1; }

TestFunction test_function(const std::string& name) {
  if (name == "one") return {"one", [](double) { return 1.0; }};
  if (name == "x") return {"x", [](double x) { return x; }};
  if (name == "x2") return {"x2", [](double x) { return x * x; }};
  if (name == "state1") return {"state1", [](double x) { return x == 1.0 ? 1.0 : 0.0; }};
  if (name == "tail") return {"tail", [](double x) { return std::abs(x) > 1.0 ? 1.0 : 0.0; }};
  throw std::invalid_argument("unknown test function: " + name);
}

std::string config_hash(const nlohmann::json& j) {
  const std::string dump = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.experiment = j.at("experiment").get<std::string>();

  if (j.contains("model")) {
    const auto& m = j.at("model");
    cfg.model_tag = m.value("tag", cfg.model_tag);
    cfg.model_params.horizon = m.value("T", m.value("horizon", cfg.model_params.horizon));
    cfg.model_params.sigma = m.value("sigma", cfg.model_params.sigma);
    cfg.observation_seed = m.value("observation_seed", cfg.observation_seed);
    if (m.contains("pi0")) cfg.model_params.pi0 = m.at("pi0").get<std::vector<double>>();
    if (m.contains("K")) {
      cfg.model_params.transition.clear();
      for (const auto& row : m.at("K")) {
        for (const auto& v : row) cfg.model_params.transition.push_back(v.get<double>());
      }
    }
    if (m.contains("g")) cfg.model_params.potential = m.at("g").get<std::vector<double>>();
  }
  if (cfg.model_tag == "two-state" && cfg.model_params.pi0.empty()) {
    cfg.model_params.pi0 = {0.5, 0.5};
    cfg.model_params.transition = {0.9, 0.1, 0.2, 0.8};
    cfg.model_params.potential = {1.0, 2.0};
  }

  cfg.n_grid = j.value("N", std::vector<int>{});
  cfg.c_grid = j.value("C", std::vector<int>{});
  cfg.methods = j.value("methods", std::vector<std::string>{});
  cfg.phis = j.value("phis", std::vector<std::string>{});
  if (cfg.phis.empty()) cfg.phis = {"one"};
  cfg.replicates = j.value("replicates", cfg.replicates);
  cfg.graphs = j.value("graphs", cfg.graphs);
  cfg.n_ref = j.value("N_ref", cfg.n_ref);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.out = j.value("out", cfg.out);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  return parse_config(j);
}

void validate_config(const ExperimentConfig& cfg) {
  static const std::vector<std::string> kinds = {
      "mixing-sweep", "estimate-vs-C", "wasserstein-vs-C", "mse-vs-C",
      "mse-vs-N",     "clt-check",     "density-compare"};
  if (std::find(kinds.begin(), kinds.end(), cfg.experiment) == kinds.end()) {
    throw std::invalid_argument("unknown experiment kind: " + cfg.experiment);
  }
  if (cfg.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (cfg.experiment == "mixing-sweep") {
    if (cfg.n_grid.empty() || cfg.c_grid.empty()) {
      throw std::invalid_argument("mixing-sweep needs N and C grids");
    }
    for (int c : cfg.c_grid) {
      for (int n : cfg.n_grid) check_feasible("fixed-regular", n, c);
    }
    return;
  }
  if (cfg.n_grid.empty()) throw std::invalid_argument("empty N grid");
  std::vector<std::string> methods = cfg.methods;
  if (methods.empty()) methods = {"fixed-regular"};
  for (const auto& method : methods) {
    for (int n : cfg.n_grid) {
      if (method == "bootstrap" || method == "complete") {
        check_feasible(method, n, 0);
        continue;
      }
      if (cfg.c_grid.empty()) throw std::invalid_argument("empty C grid");
      for (int c : cfg.c_grid) check_feasible(method, n, c);
    }
  }
  // validate phis and model tag eagerly
  for (const auto& name : cfg.phis) test_function(name);
  build_model(cfg);
}

void run_experiment(const ExperimentConfig& cfg, int threads) {
  validate_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  OutputSet out;
  if (cfg.experiment == "mixing-sweep") {
    out = run_mixing_sweep(cfg, threads);
  } else if (cfg.experiment == "estimate-vs-C") {
    out = run_estimate_vs_c(cfg, threads);
  } else if (cfg.experiment == "wasserstein-vs-C") {
    out = run_wasserstein_vs_c(cfg, threads);
  } else if (cfg.experiment == "mse-vs-C") {
    out = run_mse(cfg, threads, false);
  } else if (cfg.experiment == "mse-vs-N") {
    out = run_mse(cfg, threads, true);
  } else if (cfg.experiment == "clt-check") {
    out = run_clt_check(cfg, threads);
  } else if (cfg.experiment == "density-compare") {
    out = run_density_compare(cfg, threads);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  atomic_write(dir / (cfg.experiment + "_raw.csv"), out.raw);
  atomic_write(dir / (cfg.experiment + "_summary.csv"), out.summary);

  nlohmann::json manifest;
  manifest["config"] = cfg.raw;
  manifest["config_hash"] = config_hash(cfg.raw);
  manifest["root_seed"] = cfg.seed;
  manifest["code_version"] = "0.1.0";
  manifest["wall_time_seconds"] = wall;
  atomic_write(dir / (cfg.experiment + "_manifest.json"), manifest.dump(2) + "\n");
}

}  // namespace alphasmc
