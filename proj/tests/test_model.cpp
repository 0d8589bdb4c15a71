#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "qpf/errors.hpp"
#include "qpf/model.hpp"
#include "qpf/random.hpp"

using namespace qpf;

namespace {

System random_ising(RandomStream& rng, std::size_t spins) {
  std::vector<IsingEdge> edges;
  for (std::size_t u = 0; u < spins; ++u) {
    for (std::size_t v = u + 1; v < spins; ++v) {
      edges.push_back({u, v, 2.0 * rng.u01() - 1.0});
    }
  }
  std::vector<IsingField> fields;
  for (std::size_t u = 0; u < spins; ++u) fields.push_back({u, rng.u01() - 0.5});
  return make_ising_system(spins, edges, fields);
}

// Brute-force partition sum over raw (unshifted) energies.
double brute_force_unshifted(const System& s, double beta) {
  double z = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) z += std::exp(-beta * s.raw_energy(i));
  return z;
}

}  // namespace

TEST_CASE("partition at beta 0 equals the state count") {
  RandomStream rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const System s = random_ising(rng, 1 + trial % 4);
    CHECK(exact_partition(s, 0.0) == doctest::Approx(static_cast<double>(s.size())).epsilon(1e-14));
  }
}

TEST_CASE("single free spin has Z = 2 at every beta") {
  const System s = make_ising_system(1, {}, {});
  for (double beta : {0.0, 0.5, 3.0, 50.0}) {
    CHECK(exact_partition(s, beta) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(unshifted_partition(s, beta) == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("two-spin ferromagnet at beta 1") {
  const System s = make_ising_system(2, {{0, 1, 1.0}});
  // 2 e^1 + 2 e^-1, summed over the four spin configurations.
  const double expected = 2.0 * std::exp(1.0) + 2.0 * std::exp(-1.0);
  CHECK(unshifted_partition(s, 1.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(6.1723225392609751).epsilon(1e-12));
}

TEST_CASE("shift bookkeeping matches the raw-energy sum") {
  RandomStream rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const System s = random_ising(rng, 3);
    for (double beta : {0.3, 1.1}) {
      const double via_shift = unshifted_partition(s, beta);
      CHECK(via_shift == doctest::Approx(brute_force_unshifted(s, beta)).epsilon(1e-10));
    }
  }
}

TEST_CASE("partition is nonincreasing in beta on shifted energies") {
  RandomStream rng(23);
  const System s = random_ising(rng, 4);
  double prev = exact_partition(s, 0.0);
  for (double beta = 0.25; beta <= 3.0; beta += 0.25) {
    const double z = exact_partition(s, beta);
    CHECK(z <= prev + 1e-12);
    prev = z;
  }
}

TEST_CASE("overflow guard rejects huge exponents") {
  const System s(std::vector<double>{0.0, 1000.0});
  CHECK_THROWS_AS(exact_partition(s, 1.0), ConfigError);
  CHECK_THROWS_AS(exact_partition(s, -1.0), ConfigError);
  CHECK_NOTHROW(exact_partition(s, 0.5));
}

TEST_CASE("boltzmann is uniform at beta 0 and normalized everywhere") {
  RandomStream rng(31);
  const System s = random_ising(rng, 3);
  const auto uniform = boltzmann(s, 0.0);
  for (double p : uniform) CHECK(p == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
  for (double beta : {0.4, 1.7}) {
    const auto pi = boltzmann(s, beta);
    double sum = 0.0;
    for (double p : pi) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("boltzmann values for the two-spin ferromagnet") {
  const System s = make_ising_system(2, {{0, 1, 1.0}});
  const auto pi = boltzmann(s, 1.0);
  const double z = 2.0 * std::exp(1.0) + 2.0 * std::exp(-1.0);
  // States 00 (both -1) and 11 (both +1) are aligned: energy -1.
  CHECK(pi[0] == doctest::Approx(std::exp(1.0) / z).epsilon(1e-12));
  CHECK(pi[3] == doctest::Approx(std::exp(1.0) / z).epsilon(1e-12));
  CHECK(pi[1] == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-12));
  CHECK(pi[2] == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-12));
}

TEST_CASE("boltzmann is invariant under a constant energy shift") {
  RandomStream rng(37);
  const System base = random_ising(rng, 3);
  std::vector<double> shifted_energies;
  for (std::size_t i = 0; i < base.size(); ++i) {
    shifted_energies.push_back(base.raw_energy(i) + 7.25);
  }
  const System shifted(shifted_energies);
  const auto a = boltzmann(base, 0.9);
  const auto b = boltzmann(shifted, 0.9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("schedule at beta_final 0 is trivial") {
  const System s = make_ising_system(2, {{0, 1, 1.0}});
  const Schedule sched = build_schedule(s, 0.0);
  CHECK(sched.levels() == 0);
  CHECK(sched.beta_final() == 0.0);
}

TEST_CASE("constant-energy systems need no cooling") {
  // All energies equal shift to E' = 0, so every ratio is 1 and a single
  // step reaches beta_final.
  const System s(std::vector<double>{4.0, 4.0, 4.0, 4.0});
  const Schedule sched = build_schedule(s, 3.0);
  CHECK(sched.levels() == 1);
  CHECK(sched.alpha(0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("built schedules keep ratios inside the band") {
  const System s = make_ising_system(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}});
  const Schedule sched = build_schedule(s, 2.0);
  REQUIRE(sched.levels() >= 1);
  CHECK(sched.beta_final() == doctest::Approx(2.0));
  for (std::size_t i = 0; i < sched.levels(); ++i) {
    // Recheck against the oracle, not the stored value.
    const double alpha =
        exact_partition(s, sched.beta(i + 1)) / exact_partition(s, sched.beta(i));
    CHECK(alpha == doctest::Approx(sched.alpha(i)).epsilon(1e-12));
    CHECK(alpha >= 0.5);
    CHECK(alpha <= 1.0);
    if (i + 1 < sched.levels()) CHECK(alpha <= 0.75);
  }
  // Telescoping identity against the oracle.
  double product = 1.0;
  for (std::size_t i = 0; i < sched.levels(); ++i) product *= sched.alpha(i);
  const double direct = exact_partition(s, 2.0) / exact_partition(s, 0.0);
  CHECK(product == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("schedule rejects bad inputs") {
  const System s = make_ising_system(2, {{0, 1, 1.0}});
  CHECK_THROWS_AS(build_schedule(s, -1.0), ConfigError);
  CHECK_THROWS_AS(build_schedule(s, 1.0, 0.0, 0.75), ConfigError);
  CHECK_THROWS_AS(build_schedule(s, 1.0, 0.8, 0.6), ConfigError);
}

TEST_CASE("schedule prefix truncates cleanly") {
  const System s = make_ising_system(2, {{0, 1, 1.0}}, {{0, 0.4}, {1, 0.4}});
  const Schedule sched = build_schedule(s, 0.8);
  REQUIRE(sched.levels() >= 2);
  const Schedule p = sched.prefix(1);
  CHECK(p.levels() == 1);
  CHECK(p.beta(1) == sched.beta(1));
  CHECK(p.alpha(0) == sched.alpha(0));
  const Schedule empty = sched.prefix(0);
  CHECK(empty.levels() == 0);
}

TEST_CASE("model files round-trip through the loader") {
  const char* path = "test_model_tmp.model";
  {
    std::ofstream out(path);
    out << "# two coupled spins with fields\n";
    out << "spins 2\n";
    out << "edge 0 1 1.0\n";
    out << "field 0 0.4\n";
    out << "field 1 0.4\n";
  }
  const System s = load_system(path);
  const System ref = make_ising_system(2, {{0, 1, 1.0}}, {{0, 0.4}, {1, 0.4}});
  REQUIRE(s.size() == ref.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.raw_energy(i) == doctest::Approx(ref.raw_energy(i)).epsilon(1e-14));
  }
  std::remove(path);
  CHECK_THROWS_AS(load_system("does_not_exist.model"), ConfigError);
}

TEST_CASE("system caps and invariants") {
  CHECK_THROWS_AS(System(std::vector<double>{}), ConfigError);
  CHECK_THROWS_AS(make_ising_system(13, {}), ConfigError);
  CHECK_THROWS_AS(make_ising_system(2, {{0, 0, 1.0}}), ConfigError);
  const System s(std::vector<double>{3.0, 5.0, 4.0});
  CHECK(s.energy_offset() == 3.0);
  CHECK(s.shifted_energy(0) == 0.0);
  CHECK(s.shifted_energy(1) == 2.0);
}
