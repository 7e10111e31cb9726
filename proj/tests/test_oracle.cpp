#include <doctest.h>

#include <cmath>
#include <limits>

#include "alphasmc/oracle.hpp"

using namespace alphasmc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExactModel two_state() {
  BuiltinParams p;
  p.horizon = 10;
  p.pi0 = {0.5, 0.5};
  p.transition = {0.9, 0.1, 0.2, 0.8};
  p.potential = {1.0, 2.0};
  return exact_from_discrete(make_builtin("two-state", p));
}

ExactModel three_state() {
  ExactModel em;
  em.horizon = 10;
  em.grid = {0.0, 1.0, 2.0};
  em.pi0 = {0.2, 0.5, 0.3};
  em.kernel = {0.1, 0.6, 0.3, 0.4, 0.4, 0.2, 0.25, 0.25, 0.5};
  em.g = {0.5, 1.3, 2.0};
  return em;
}

}  // namespace

TEST_CASE("oracle: one-step filtering values of the two-state model") {
  const auto em = two_state();
  const auto run = oracle_forward(em, 1, 2.0);
  CHECK(run.z[1] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(run.pi[1][0] == doctest::Approx(13.0 / 30.0).epsilon(1e-14));
  CHECK(run.pi[1][1] == doctest::Approx(17.0 / 30.0).epsilon(1e-14));
  CHECK(run.step_norm[1] == doctest::Approx(1.5));
  // mu_1 = (1/2) K^T(g^2 pi_0) + (1/2) Z_1^2 pi_1
  CHECK(run.mu[1][0] == doctest::Approx(0.9125).epsilon(1e-14));
  CHECK(run.mu[1][1] == doctest::Approx(1.4625).epsilon(1e-14));
  CHECK(run.mu[1][0] + run.mu[1][1] == doctest::Approx(2.375).epsilon(1e-14));
}

TEST_CASE("oracle: bootstrap limit collapses mu to Z^2 pi") {
  const auto em = two_state();
  const int T = 5;
  const auto inf_run = oracle_forward(em, T, kInf);
  const auto big_run = oracle_forward(em, T, 1e9);
  for (int t = 0; t <= T; ++t) {
    const double z2 = inf_run.z[static_cast<std::size_t>(t)] * inf_run.z[static_cast<std::size_t>(t)];
    for (int i = 0; i < 2; ++i) {
      const double mu_inf = inf_run.mu[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
      if (t > 0) {
        CHECK(mu_inf ==
              doctest::Approx(z2 * inf_run.pi[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)])
                  .epsilon(1e-14));
      }
      CHECK(big_run.mu[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] ==
            doctest::Approx(mu_inf).epsilon(1e-6));
    }
  }
}

TEST_CASE("oracle: recursion agrees with path enumeration") {
  for (const auto& em : {two_state(), three_state()}) {
    const std::vector<double> phi = em.grid;  // identity test function
    std::vector<double> one(em.grid.size(), 1.0);
    for (int T : {1, 4, 7}) {
      const auto run = oracle_forward(em, T, kInf);
      const double z_pi =
          run.z[static_cast<std::size_t>(T)] *
          measure_apply(run.pi[static_cast<std::size_t>(T)], phi);
      CHECK(brute_force_gamma(em, T, phi) == doctest::Approx(z_pi).epsilon(1e-12));
      CHECK(brute_force_gamma(em, T, one) ==
            doctest::Approx(run.z[static_cast<std::size_t>(T)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("oracle: mu depends linearly on 1/C") {
  const auto em = three_state();
  const std::vector<double> phi = {1.0, -0.5, 2.0};
  const double a = measure_apply(oracle_forward(em, 1, 2.0).mu[1], phi);
  const double b = measure_apply(oracle_forward(em, 1, 4.0).mu[1], phi);
  const double c = measure_apply(oracle_forward(em, 1, 8.0).mu[1], phi);
  const double inf = measure_apply(oracle_forward(em, 1, kInf).mu[1], phi);
  // mu(C) = inf + slope / C
  const double slope = (a - inf) * 2.0;
  CHECK(b == doctest::Approx(inf + slope / 4.0).epsilon(1e-12));
  CHECK(c == doctest::Approx(inf + slope / 8.0).epsilon(1e-12));
}

TEST_CASE("oracle: CLT variances of the two-state model, frozen values") {
  const auto em = two_state();
  const auto run = oracle_forward(em, 1, 2.0);
  const std::vector<double> one = {1.0, 1.0};
  const std::vector<double> state1 = {0.0, 1.0};
  // Hand-computed from the variance recursions (exact fractions).
  CHECK(v_gamma(em, run, 1, one) == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(v_gamma(em, run, 1, state1) == doctest::Approx(1.3025).epsilon(1e-14));
  CHECK(v_pi(em, run, 1, state1) ==
        doctest::Approx(8611.0 / 12960.0).epsilon(1e-13));
  CHECK(v_pi(em, run, 1, one) == doctest::Approx(0.0).epsilon(1e-14));
  // t = 0: plain i.i.d. variances
  CHECK(v_pi(em, run, 0, state1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(v_gamma(em, run, 0, state1) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("oracle: tail example quadrature") {
  const auto em = exact_tail_example();
  const auto run = oracle_forward(em, 1, kInf);
  // Z_1 = 0.1 + 100 P(|X| < 0.1) under N(0, 1)
  const double z_closed = 0.1 + 100.0 * std::erf(0.1 / std::sqrt(2.0));
  CHECK(run.z[1] == doctest::Approx(z_closed).epsilon(1e-3));
  CHECK(measure_apply(em.pi0, std::vector<double>(em.pi0.size(), 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-9));

  // grid refinement moves the answer by less than 0.1%
  const auto fine = exact_tail_example(40001);
  const auto fine_run = oracle_forward(fine, 1, kInf);
  CHECK(run.z[1] == doctest::Approx(fine_run.z[1]).epsilon(1e-3));

  const auto phi = phi_on_grid(em, [](double x) { return std::abs(x) > 1.0 ? 1.0 : 0.0; });
  const auto phi_fine =
      phi_on_grid(fine, [](double x) { return std::abs(x) > 1.0 ? 1.0 : 0.0; });
  const double v2 = v_gamma(em, oracle_forward(em, 1, 2.0), 1, phi);
  const double vb = v_gamma(em, run, 1, phi);
  const double v2f = v_gamma(fine, oracle_forward(fine, 1, 2.0), 1, phi_fine);
  const double vbf = v_gamma(fine, fine_run, 1, phi_fine);
  CHECK(v2 == doctest::Approx(v2f).epsilon(1e-3));  // < 0.1% under 2x refinement
  CHECK(vb == doctest::Approx(vbf).epsilon(1e-3));
  CHECK(v2 / vb == doctest::Approx(v2f / vbf).epsilon(1e-3));
  // "roughly half" variance at C = 2
  CHECK(v2 / vb > 0.4);
  CHECK(v2 / vb < 0.7);
}

TEST_CASE("oracle: input validation") {
  const auto em = two_state();
  CHECK_THROWS_AS(oracle_forward(em, 3, 0.5), std::invalid_argument);
  const auto m = make_builtin("tail-example", {});
  CHECK_THROWS_AS(exact_from_discrete(m), std::invalid_argument);

  ExactModel big;
  big.horizon = 8;
  big.grid.assign(10, 0.0);
  big.pi0.assign(10, 0.1);
  big.g.assign(10, 1.0);
  big.kernel.assign(100, 0.1);
  CHECK_THROWS_AS(brute_force_gamma(big, 8, big.g), std::invalid_argument);
}
