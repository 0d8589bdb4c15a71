#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qpf/classical.hpp"
#include "qpf/errors.hpp"
#include "qpf/markov.hpp"
#include "qpf/model.hpp"
#include "qpf/random.hpp"

using namespace qpf;

namespace {

// Exact E[Y] by enumeration: sum_sigma pi_i(sigma) e^{-dbeta E'(sigma)}.
double exact_mean_y(const System& s, double beta_i, double beta_next) {
  const auto pi = boltzmann(s, beta_i);
  double m = 0.0;
  for (std::size_t x = 0; x < s.size(); ++x) {
    m += pi[x] * std::exp(-(beta_next - beta_i) * s.shifted_energy(x));
  }
  return m;
}

double exact_second_moment_y(const System& s, double beta_i, double beta_next) {
  const auto pi = boltzmann(s, beta_i);
  double m = 0.0;
  for (std::size_t x = 0; x < s.size(); ++x) {
    m += pi[x] * std::exp(-2.0 * (beta_next - beta_i) * s.shifted_energy(x));
  }
  return m;
}

}  // namespace

TEST_CASE("estimator basics: zero exponent and ground state give 1") {
  const System s = make_ising_system(2, {{0, 1, 1.0}});
  for (std::size_t x = 0; x < s.size(); ++x) {
    CHECK(estimator_y(s, 0.7, 0.7, x) == doctest::Approx(1.0).epsilon(1e-15));
  }
  // Ground state has E' = 0 regardless of the step.
  CHECK(estimator_y(s, 0.2, 1.9, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(estimator_y(s, 1.0, 0.5, 0), ConfigError);
}

TEST_CASE("estimator expectation telescopes to the partition ratio") {
  RandomStream rng(3);
  const System s = make_ising_system(3, {{0, 1, 0.8}, {1, 2, -0.4}, {0, 2, 0.3}}, {{1, 0.2}});
  for (double beta_i : {0.0, 0.5}) {
    const double beta_next = beta_i + 0.4;
    const double lhs = exact_mean_y(s, beta_i, beta_next);
    const double rhs = exact_partition(s, beta_next) / exact_partition(s, beta_i);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("constant estimator averages to exactly 1") {
  const System s = make_ising_system(2, {{0, 1, 1.0}});
  const TransitionMatrix chain = metropolis_chain(s, 0.6);
  RandomStream rng(8);
  CHECK(estimate_ratio_classical(chain, 0.6, 50, 3, rng) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("ratio mean concentrates at the exact alpha") {
  const System s = make_ising_system(2, {{0, 1, 1.0}});
  const Schedule sched = build_schedule(s, 1.0);
  REQUIRE(sched.levels() >= 1);
  const double beta_i = sched.beta(0), beta_next = sched.beta(1);
  const TransitionMatrix chain = metropolis_chain(s, beta_i);
  const ChainSpectrum spec = chain_spectrum(chain);
  const auto& pi = chain.stationary();
  const double pi_min = *std::min_element(pi.begin(), pi.end());
  const std::uint64_t burn = mixing_steps(spec, 1e-4, pi_min);

  const std::uint64_t m = 100000;
  RandomStream rng(2024);
  const double mean = estimate_ratio_classical(chain, beta_next, m, burn, rng);
  const double alpha = exact_mean_y(s, beta_i, beta_next);
  const double var = exact_second_moment_y(s, beta_i, beta_next) - alpha * alpha;
  const double three_sigma = 3.0 * std::sqrt(var / static_cast<double>(m));
  CHECK(std::abs(mean - alpha) < three_sigma);
}

TEST_CASE("relative variance per ratio is bounded by 1/alpha - 1") {
  const System s = make_ising_system(3, {{0, 1, 1.0}, {1, 2, 1.0}}, {{0, 0.3}});
  const Schedule sched = build_schedule(s, 1.5);
  for (std::size_t i = 0; i < sched.levels(); ++i) {
    const double alpha = sched.alpha(i);
    const double ey = exact_mean_y(s, sched.beta(i), sched.beta(i + 1));
    const double ey2 = exact_second_moment_y(s, sched.beta(i), sched.beta(i + 1));
    const double rel_var = ey2 / (ey * ey) - 1.0;
    CHECK(rel_var <= 1.0 / alpha - 1.0 + 1e-12);
    CHECK(rel_var <= 1.0 + 1e-12);  // alpha >= 1/2
  }
}

TEST_CASE("relative-variance chain stays under eps^2/8 with the paper budgets") {
  const System s = make_ising_system(3, {{0, 1, 1.0}, {1, 2, 1.0}}, {{0, 0.3}});
  const Schedule sched = build_schedule(s, 1.5);
  const double eps = 0.3;
  const ClassicalConfig cfg = ClassicalConfig::make(eps, sched.levels());
  double chain_product = 1.0;
  for (std::size_t i = 0; i < sched.levels(); ++i) {
    const double ey = exact_mean_y(s, sched.beta(i), sched.beta(i + 1));
    const double ey2 = exact_second_moment_y(s, sched.beta(i), sched.beta(i + 1));
    const double rel_var_mean =
        (ey2 / (ey * ey) - 1.0) / static_cast<double>(cfg.samples_per_ratio);
    chain_product *= 1.0 + rel_var_mean;
  }
  CHECK(chain_product - 1.0 <= eps * eps / 8.0);
}

TEST_CASE("config budgets: m, d, and the pre-rounding identity") {
  const ClassicalConfig cfg = ClassicalConfig::make(0.1, 4);
  CHECK(cfg.samples_per_ratio == 25600);  // 64 * 4 / 0.01
  const double ell = 4.0, eps = 0.1;
  const double m_real = 64.0 * ell / (eps * eps);
  const double d = eps * eps / (512.0 * ell * ell);
  CHECK(d == doctest::Approx(cfg.variation_budget).epsilon(1e-15));
  CHECK(d * m_real * ell == doctest::Approx(0.125).epsilon(1e-12));
  CHECK_THROWS_AS(ClassicalConfig::make(1.5, 4), ConfigError);
}

TEST_CASE("full scheme lands near Z and reports the exact ledger") {
  const System s = make_ising_system(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}, {{0, 0.3}});
  const Schedule sched = build_schedule(s, 1.0);
  const double eps = 0.3;
  RandomStream rng(777);
  const ClassicalEstimate est = classical_fpras(s, sched, eps, rng);
  const double z = unshifted_partition(s, 1.0);
  CHECK(std::abs(est.value / z - 1.0) < eps);

  // Ledger: sum over levels of m * burn_i, reported exactly.
  std::uint64_t expect = 0;
  for (std::size_t i = 0; i < sched.levels(); ++i) {
    expect += est.config.samples_per_ratio * est.burn_in[i];
  }
  CHECK(est.total_chain_steps == expect);
  CHECK(classical_chain_step_cost(s, sched, eps) == expect);
}

TEST_CASE("trivial schedule returns the state count") {
  const System s = make_ising_system(2, {{0, 1, 1.0}});
  const Schedule sched = build_schedule(s, 0.0);
  RandomStream rng(5);
  const ClassicalEstimate est = classical_fpras(s, sched, 0.2, rng);
  CHECK(est.value == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(est.total_chain_steps == 0);
}

TEST_CASE("success rate across repeated runs clears the guarantee") {
  const System s = make_ising_system(2, {{0, 1, 1.0}}, {{0, 0.4}, {1, 0.4}});
  const Schedule sched = build_schedule(s, 0.8);
  const double eps = 0.3;
  const double z = unshifted_partition(s, 0.8);
  RandomStream rng(31337);
  int hits = 0;
  const int trials = 60;
  for (int trial = 0; trial < trials; ++trial) {
    RandomStream sub = rng.fork(static_cast<std::uint64_t>(trial));
    const ClassicalEstimate est = classical_fpras(s, sched, eps, sub);
    if (std::abs(est.value / z - 1.0) <= eps) ++hits;
  }
  CHECK(hits >= static_cast<int>(0.72 * trials));
}
