#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "alphasmc/bench.hpp"

using namespace alphasmc;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json tiny_config(const std::string& out) {
  return nlohmann::json{
      {"experiment", "estimate-vs-C"},
      {"model", {{"tag", "two-state"}, {"T", 4}}},
      {"N", {30}},
      {"C", {3}},
      {"methods", {"fixed-regular", "bootstrap"}},
      {"phis", {"state1"}},
      {"replicates", 5},
      {"seed", 9},
      {"out", out},
  };
}

}  // namespace

TEST_CASE("bench: spec example config parses") {
  const nlohmann::json j = {
      {"experiment", "mse-vs-C"},
      {"model", {{"tag", "tracking"}, {"sigma", 0.2}, {"T", 200}, {"observation_seed", 7}}},
      {"N", {2000}},
      {"C", {5, 10, 15, 20}},
      {"methods", {"local-exchange", "fixed-regular", "per-step-random-rows"}},
      {"replicates", 100},
      {"seed", 1},
      {"out", "results/"},
  };
  const auto cfg = parse_config(j);
  CHECK(cfg.experiment == "mse-vs-C");
  CHECK(cfg.model_tag == "tracking");
  CHECK(cfg.model_params.horizon == 200);
  CHECK(cfg.model_params.sigma == 0.2);
  CHECK(cfg.observation_seed == 7);
  CHECK(cfg.n_grid == std::vector<int>{2000});
  CHECK(cfg.c_grid == std::vector<int>{5, 10, 15, 20});
  CHECK(cfg.methods.size() == 3);
  CHECK(cfg.replicates == 100);
  CHECK(cfg.seed == 1);
  CHECK(cfg.out == "results/");
  CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("bench: validation rejects infeasible grids") {
  auto j = tiny_config("x");
  j["C"] = {101};
  j["N"] = {100};
  try {
    validate_config(parse_config(j));
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("N=100") != std::string::npos);
    CHECK(msg.find("C=101") != std::string::npos);
    CHECK(msg.find("fixed-regular") != std::string::npos);
  }

  auto bad_kind = tiny_config("x");
  bad_kind["experiment"] = "frobnicate";
  CHECK_THROWS_AS(validate_config(parse_config(bad_kind)), std::invalid_argument);

  auto no_n = tiny_config("x");
  no_n["N"] = nlohmann::json::array();
  CHECK_THROWS_AS(validate_config(parse_config(no_n)), std::invalid_argument);

  auto odd = tiny_config("x");
  odd["N"] = {25};  // 25 * 3 odd
  CHECK_THROWS_AS(validate_config(parse_config(odd)), std::invalid_argument);
}

TEST_CASE("bench: local exchange width") {
  CHECK(local_exchange_width(5) == 5);
  CHECK(local_exchange_width(20) == 21);
  CHECK(local_exchange_width(1) == 1);
}

TEST_CASE("bench: test function registry") {
  CHECK(test_function("one").fn(3.0) == 1.0);
  CHECK(test_function("x").fn(3.0) == 3.0);
  CHECK(test_function("x2").fn(3.0) == 9.0);
  CHECK(test_function("state1").fn(1.0) == 1.0);
  CHECK(test_function("state1").fn(0.0) == 0.0);
  CHECK(test_function("tail").fn(1.5) == 1.0);
  CHECK(test_function("tail").fn(0.5) == 0.0);
  CHECK_THROWS_AS(test_function("cos"), std::invalid_argument);
}

TEST_CASE("bench: config hash is stable and content-sensitive") {
  const auto j = tiny_config("a");
  CHECK(config_hash(j) == config_hash(j));
  auto k = j;
  k["seed"] = 10;
  CHECK(config_hash(j) != config_hash(k));
  CHECK(config_hash(j).size() == 16);
}

TEST_CASE("bench: run_experiment outputs and thread invariance") {
  const std::filesystem::path dir1 = "bench_test_out1";
  const std::filesystem::path dir2 = "bench_test_out2";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);

  run_experiment(parse_config(tiny_config(dir1.string())), 1);
  run_experiment(parse_config(tiny_config(dir2.string())), 4);

  const auto raw1 = slurp(dir1 / "estimate-vs-C_raw.csv");
  const auto raw2 = slurp(dir2 / "estimate-vs-C_raw.csv");
  CHECK(raw1 == raw2);
  CHECK(raw1.find("method,C,N,replicate,t,log_Z_hat,ess_ratio,pi_hat_state1,mu_hat_state1") == 0);
  // 2 methods x 5 replicates x (T + 1) rows
  CHECK(std::count(raw1.begin(), raw1.end(), '\n') == 1 + 2 * 5 * 5);
  CHECK(std::filesystem::exists(dir1 / "estimate-vs-C_summary.csv"));
  CHECK(!std::filesystem::exists(dir1 / "estimate-vs-C_raw.csv.tmp"));

  // manifest round-trip: rehashing the embedded config reproduces the hash
  const auto manifest = nlohmann::json::parse(slurp(dir1 / "estimate-vs-C_manifest.json"));
  CHECK(manifest.at("config_hash").get<std::string>() ==
        config_hash(manifest.at("config")));
  CHECK(manifest.at("root_seed").get<std::uint64_t>() == 9);
  CHECK(manifest.contains("wall_time_seconds"));
  CHECK(manifest.contains("code_version"));

  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("bench: cli exit codes") {
  auto call = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    args.insert(args.begin(), "alphasmc_cli");
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
  };

  const std::filesystem::path good = "bench_cli_good.json";
  const std::filesystem::path bad = "bench_cli_bad.json";
  {
    std::ofstream(good) << tiny_config("unused").dump();
    auto j = tiny_config("unused");
    j["C"] = {101};
    j["N"] = {100};
    std::ofstream(bad) << j.dump();
  }
  CHECK(call({"validate", "--config", good.string()}) == 0);
  CHECK(call({"validate", "--config", bad.string()}) == 1);
  CHECK(call({"validate", "--config", "does_not_exist.json"}) == 1);
  CHECK(call({"oracle", "--model", "two-state", "--T", "1", "--C", "2",
              "--phi", "one"}) == 0);
  CHECK(call({"oracle", "--model", "unknown-model"}) == 1);
  CHECK(call({"frobnicate"}) == 1);
  CHECK(call({"mixing", "--n", "4", "--c", "3", "--graphs", "1", "--seed", "0"}) == 0);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}
