#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alphasmc/bench.hpp"
#include "alphasmc/graph.hpp"
#include "alphasmc/metrics.hpp"
#include "alphasmc/oracle.hpp"

namespace alphasmc {

namespace {

void print_val(const char* name, double v) {
  std::printf("%s = %.17g\n", name, v);
}

int cmd_mixing(int n, int c, int graphs, std::uint64_t seed) {
  std::vector<double> lambdas;
  for (int g = 0; g < graphs; ++g) {
    RngStream rng(seed, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(n),
                  static_cast<std::uint64_t>(g), Draw::Graph);
    const auto alpha = random_regular_matrix(n, c, rng);
    lambdas.push_back(mixing_constant(alpha));
    std::printf("graph %d: lambda = %.17g\n", g, lambdas.back());
  }
  print_val("median", quantile(lambdas, 0.5));
  print_val("limit", 2.0 * std::sqrt(static_cast<double>(c) - 1.0) / c);
  return 0;
}

int cmd_oracle(const std::string& model_tag, int T, const std::string& c_str,
               const std::string& phi_name) {
  ExactModel em;
  if (model_tag == "two-state") {
    BuiltinParams params;
    params.horizon = T;
    params.pi0 = {0.5, 0.5};
    params.transition = {0.9, 0.1, 0.2, 0.8};
    params.potential = {1.0, 2.0};
    em = exact_from_discrete(make_builtin("two-state", params));
  } else if (model_tag == "tail-example") {
    em = exact_tail_example();
    if (T != 1) throw std::invalid_argument("tail-example has horizon 1");
  } else {
    throw std::invalid_argument("oracle supports models two-state and tail-example");
  }
  const double c = (c_str == "inf" || c_str == "bootstrap")
                       ? std::numeric_limits<double>::infinity()
                       : std::stod(c_str);
  const auto run = oracle_forward(em, T, c);
  const auto phi = phi_on_grid(em, test_function(phi_name).fn);

  const auto& pi_t = run.pi[static_cast<std::size_t>(T)];
  const auto& mu_t = run.mu[static_cast<std::size_t>(T)];
  print_val("Z", run.z[static_cast<std::size_t>(T)]);
  print_val("pi(phi)", measure_apply(pi_t, phi));
  print_val("mu(phi)", measure_apply(mu_t, phi));
  print_val("V_gamma(phi)", v_gamma(em, run, T, phi));
  print_val("V_pi(phi)", v_pi(em, run, T, phi));
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"alpha-SMC experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  auto* run_cmd = app.add_subcommand("run", "run an experiment from a JSON config");
  run_cmd->add_option("--config", config_path, "config file")->required();
  run_cmd->add_option("--threads", threads, "worker threads");
  run_cmd->add_option("--out-dir", out_dir, "output directory override");

  int mix_n = 0, mix_c = 0, mix_graphs = 20;
  std::uint64_t mix_seed = 1;
  auto* mix_cmd = app.add_subcommand("mixing", "mixing constants of random regular graphs");
  mix_cmd->add_option("--n", mix_n, "matrix size")->required();
  mix_cmd->add_option("--c", mix_c, "degree")->required();
  mix_cmd->add_option("--graphs", mix_graphs, "number of graphs");
  mix_cmd->add_option("--seed", mix_seed, "seed");

  std::string oracle_model = "two-state", oracle_c = "inf", oracle_phi = "state1";
  int oracle_t = 1;
  auto* oracle_cmd = app.add_subcommand("oracle", "exact reference quantities");
  oracle_cmd->add_option("--model", oracle_model, "two-state or tail-example");
  oracle_cmd->add_option("--T", oracle_t, "horizon");
  oracle_cmd->add_option("--C", oracle_c, "connectivity (number or inf)");
  oracle_cmd->add_option("--phi", oracle_phi, "test function");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "check a config without running");
  validate_cmd->add_option("--config", validate_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (*run_cmd) {
      auto cfg = load_config(config_path);
      if (!out_dir.empty()) cfg.out = out_dir;
      validate_config(cfg);
      run_experiment(cfg, threads);
      return 0;
    }
    if (*mix_cmd) return cmd_mixing(mix_n, mix_c, mix_graphs, mix_seed);
    if (*oracle_cmd) return cmd_oracle(oracle_model, oracle_t, oracle_c, oracle_phi);
    if (*validate_cmd) {
      validate_config(load_config(validate_path));
      std::printf("ok\n");
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace alphasmc
