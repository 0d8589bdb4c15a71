#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <numbers>

#include "qpf/errors.hpp"
#include "qpf/markov.hpp"
#include "qpf/model.hpp"
#include "qpf/qprep.hpp"
#include "qpf/random.hpp"
#include "qpf/szegedy.hpp"
#include "qpf/walk_phase_ops.hpp"
#include "walk_literal.hpp"

using namespace qpf;

namespace {

Schedule manual_schedule(const System& s, std::vector<double> betas) {
  std::vector<double> alphas;
  for (std::size_t i = 0; i + 1 < betas.size(); ++i) {
    alphas.push_back(exact_partition(s, betas[i + 1]) / exact_partition(s, betas[i]));
  }
  return Schedule(std::move(betas), std::move(alphas));
}

}  // namespace

TEST_CASE("exact samples encode the boltzmann law") {
  const System s = make_ising_system(3, {{0, 1, 1.0}, {1, 2, 0.5}}, {{0, 0.3}});
  const QuantumSample uniform = exact_sample(s, 0.0);
  for (std::size_t x = 0; x < 8; ++x) {
    CHECK(std::abs(uniform.state.amplitudes()[static_cast<Eigen::Index>(x)] -
                   cplx{1.0 / std::sqrt(8.0), 0.0}) < 1e-14);
  }
  const QuantumSample warm = exact_sample(s, 0.9);
  CHECK(warm.state.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const auto pi = boltzmann(s, 0.9);
  for (std::size_t x = 0; x < 8; ++x) {
    CHECK(std::norm(warm.state.amplitudes()[static_cast<Eigen::Index>(x)]) ==
          doctest::Approx(pi[x]).epsilon(1e-12));
  }
}

TEST_CASE("overlap of identical samples is 1; schedule neighbors clear 1/2") {
  const System s = make_ising_system(2, {{0, 1, 1.0}}, {{0, 0.4}, {1, 0.4}});
  const QuantumSample a = exact_sample(s, 0.6);
  CHECK(overlap_sq(a, a) == doctest::Approx(1.0).epsilon(1e-13));
  const Schedule sched = build_schedule(s, 0.8);
  for (std::size_t i = 0; i < sched.levels(); ++i) {
    const QuantumSample x = exact_sample(s, sched.beta(i));
    const QuantumSample y = exact_sample(s, sched.beta(i + 1));
    CHECK(overlap_sq(x, y) >= 0.5 - 1e-12);
  }
}

TEST_CASE("worked overlap: one spin, E' = {0,1}, step to ln 2") {
  // Field h = 1/2 shifts to E' = {0, 1}; pi at beta=0 is (1/2, 1/2) and at
  // beta = ln 2 is (2/3, 1/3). Overlap^2 = (sqrt(1/3) + sqrt(1/6))^2.
  const System s = make_ising_system(1, {}, {{0, 0.5}});
  const QuantumSample a = exact_sample(s, 0.0);
  const QuantumSample b = exact_sample(s, std::log(2.0));
  const double expected =
      std::pow(std::sqrt(1.0 / 3.0) + std::sqrt(1.0 / 6.0), 2.0);
  CHECK(overlap_sq(a, b) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.9714045207910317).epsilon(1e-12));
}

TEST_CASE("kernel coordinates reproduce explicit inner products") {
  const int b = 5;
  PhaseKernelSpace space(b);
  const std::vector<double> phis{0.7, 1.9, -2.4, 0.7 + 2.0 * std::numbers::pi};
  std::vector<int> ids;
  for (double p : phis) ids.push_back(space.add_phase(p));
  CHECK(ids[3] == ids[0]);  // 2pi-periodic dedup
  space.finalize();

  std::vector<Eigen::VectorXcd> exp_vecs;
  for (double p : phis) exp_vecs.push_back(qpf_test::explicit_kernel(p, b));
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(32);
  zero[0] = 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    // coords norms and pairwise products match the literal vectors.
    const auto& ci = space.generator_coords(ids[i]);
    CHECK(std::abs(ci.norm() - exp_vecs[i].norm()) < 1e-10);
    CHECK(std::abs(space.zero_coords().dot(ci) - zero.dot(exp_vecs[i])) < 1e-10);
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& cj = space.generator_coords(ids[j]);
      CHECK(std::abs(ci.dot(cj) - exp_vecs[i].dot(exp_vecs[j])) < 1e-10);
    }
  }
}

TEST_CASE("compact reflection equals the literal circuit") {
  const System s = make_ising_system(1, {}, {{0, 0.7}});
  auto walk = std::make_shared<const WalkOperator>(metropolis_chain(s, 0.9));
  const int b = 5;
  const std::size_t n = std::size_t{1} << b;
  const Eigen::MatrixXcd lit = qpf_test::literal_reflection(*walk, b);

  // Block form with explicit kernels: sum_j P_j (x) (2 u_j u_j^dag - I).
  const std::size_t d2 = walk->dim();
  const auto di = [](std::size_t v) { return static_cast<Eigen::Index>(v); };
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(di(d2 * n), di(d2 * n));
  for (std::size_t j = 0; j < d2; ++j) {
    const Eigen::VectorXcd w = walk->eigenbasis().col(di(j));
    const Eigen::VectorXcd u = qpf_test::explicit_kernel(walk->phases()[j], b);
    const Eigen::MatrixXcd anc_op =
        2.0 * u * u.adjoint() - Eigen::MatrixXcd::Identity(di(n), di(n));
    const Eigen::MatrixXcd proj = w * w.adjoint();
    for (std::size_t r = 0; r < d2; ++r) {
      for (std::size_t c = 0; c < d2; ++c) {
        block.block(di(r * n), di(c * n), di(n), di(n)) += proj(di(r), di(c)) * anc_op;
      }
    }
  }
  CHECK((lit - block).cwiseAbs().maxCoeff() < 1e-9);

  // Compact application agrees with the literal matrix on embedded vectors,
  // checked through every matrix element expressible in the kernel space.
  ApproxReflection refl(walk, b);
  RandomStream rng(3);
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::VectorXcd phi(di(d2));
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
      phi[i] = cplx{2.0 * rng.u01() - 1.0, 2.0 * rng.u01() - 1.0};
    }
    phi.normalize();
    StateVector compact = refl.embed(phi);
    refl.apply(compact);
    // Literal counterpart.
    Eigen::VectorXcd lit_in = Eigen::VectorXcd::Zero(di(d2 * n));
    for (std::size_t x = 0; x < d2; ++x) lit_in[di(x * n)] = phi[di(x)];
    const Eigen::VectorXcd lit_out = lit * lit_in;
    // Compare against every <basis_xy (x) u(phase)| and |...0^b> element.
    const std::size_t sdim = refl.space().dim();
    for (std::size_t x = 0; x < d2; ++x) {
      const auto seg = compact.amplitudes().segment(di(x * sdim), di(sdim));
      const auto lit_seg = lit_out.segment(di(x * n), di(n));
      Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(di(n));
      zero[0] = 1.0;
      CHECK(std::abs(refl.space().zero_coords().dot(seg) - zero.dot(lit_seg)) < 1e-9);
      CHECK(std::abs(seg.norm() - lit_seg.norm()) < 1e-9);
    }
  }
}

TEST_CASE("walk selective phase operator: omega=-1 recovers minus the reflection") {
  const System s = make_ising_system(1, {}, {{0, 0.7}});
  auto walk = std::make_shared<const WalkOperator>(metropolis_chain(s, 0.9));
  auto refl = std::make_shared<const ApproxReflection>(walk, 5);
  const OperatorPtr flip = selective_phase_walk(refl, cplx{-1.0, 0.0});
  RandomStream rng(77);
  Eigen::VectorXcd phi(static_cast<Eigen::Index>(walk->dim()));
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    phi[i] = cplx{2.0 * rng.u01() - 1.0, 2.0 * rng.u01() - 1.0};
  }
  phi.normalize();
  StateVector a = refl->embed(phi);
  StateVector b = a;
  flip->apply(b);
  refl->apply(a);
  CHECK((a.amplitudes() + b.amplitudes()).norm() < 1e-12);
  // Unitarity of a generic phase via dense materialization.
  const OperatorPtr generic = selective_phase_walk(refl, std::polar(1.0, 1.2));
  CHECK(generic->is_unitary(a.layout(), 1e-10));
}

TEST_CASE("collapsed conjugate pair at mu = 0 keeps the correspondence") {
  // The infinite-temperature single-spin chain has mu_1 = 0, so both walk
  // phases land on pi (e^{i pi} = e^{-i pi}) with multiplicity two.
  const System s = make_ising_system(1, {}, {});
  const WalkOperator walk = build_walk(metropolis_chain(s, 0.0));
  const WalkSpectrum spec = walk_spectrum(walk);
  REQUIRE(spec.phases_ab.size() == 2);
  CHECK(std::abs(std::abs(spec.phases_ab[0]) - std::numbers::pi) < 1e-10);
  CHECK(std::abs(std::abs(spec.phases_ab[1]) - std::numbers::pi) < 1e-10);
  CHECK(spec.phase_gap == doctest::Approx(std::numbers::pi).epsilon(1e-12));
  CHECK(spec.zero_phase_multiplicity == 1);
}

TEST_CASE("walk selective phase with omega = 1 is the identity") {
  const System s = make_ising_system(1, {}, {{0, 0.7}});
  auto walk = std::make_shared<const WalkOperator>(metropolis_chain(s, 0.5));
  auto space = std::make_shared<PhaseKernelSpace>(6);
  WalkPhaseOps ops(*walk, space);
  space->finalize();
  ops.bind();
  RandomStream rng(9);
  const std::size_t dim = walk->dim() * space->dim();
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = cplx{2.0 * rng.u01() - 1.0, 2.0 * rng.u01() - 1.0};
  }
  v.normalize();
  StateVector state({{"xy", walk->dim()}, {"anc", space->dim()}}, v);
  ops.apply_selective_phase(state, 0, 1, cplx{1.0, 0.0}, false);
  CHECK((state.amplitudes() - v).norm() < 1e-12);
}

TEST_CASE("reflection contract: lift fixed, eigenvectors flipped within the budget") {
  const System s = make_ising_system(2, {{0, 1, 1.0}});
  for (double beta : {0.0, 0.6}) {
    auto walk = std::make_shared<const WalkOperator>(metropolis_chain(s, beta));
    const WalkSpectrum spec = walk_spectrum(*walk);
    const int b =
        static_cast<int>(std::ceil(std::log2(2.0 * std::numbers::pi / spec.phase_gap))) + 3;
    ApproxReflection refl(walk, b);

    // Stationary lift (x) |0^b> is exactly fixed: its block reads phase 0.
    StateVector lift_state = refl.embed(walk->stationary_lift());
    StateVector out = lift_state;
    refl.apply(out);
    CHECK((out.amplitudes() - lift_state.amplitudes()).norm() < 1e-10);

    // Worst-case residual over the A+B eigenbasis within 0.1, and within the
    // closed-form bound.
    const double measured = refl.measured_worst_error();
    CHECK(measured <= 0.1);
    CHECK(measured <= refl.error_bound() + 1e-12);
  }
}

TEST_CASE("reflection residual is nonincreasing across the b sweep") {
  const System s = make_ising_system(2, {{0, 1, 1.0}}, {{0, 0.4}, {1, 0.4}});
  auto walk = std::make_shared<const WalkOperator>(metropolis_chain(s, 0.8));
  double prev = 2.0;
  for (int b = 4; b <= 10; ++b) {
    ApproxReflection refl(walk, b);
    const double err = refl.measured_worst_error();
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
}

TEST_CASE("pi/3 recursion contracts the deviation as eps^(3^depth)") {
  const System s = make_ising_system(1, {}, {{0, 0.5}});
  const Schedule sched = manual_schedule(s, {0.0, 1.0});
  const QuantumSample src = exact_sample(s, 0.0);
  const QuantumSample tgt = exact_sample(s, 1.0);
  const double eps0 = 1.0 - overlap_sq(src, tgt);
  REQUIRE(eps0 > 1e-4);
  for (int depth : {1, 2}) {
    PrepOptions opt;
    opt.depth = depth;
    const PrepResult res = fixed_point_prepare(s, sched, SampleMode::exact, opt);
    const double infid = 1.0 - overlap_sq(res.sample, tgt);
    CHECK(infid == doctest::Approx(std::pow(eps0, std::pow(3.0, depth))).epsilon(1e-8).scale(1.0));
    CHECK(res.selective_phase_count ==
          static_cast<std::uint64_t>(std::pow(3.0, depth)) - 1);
  }
}

TEST_CASE("identical-endpoint stages are skipped") {
  const System s = make_ising_system(1, {}, {{0, 1.0}});
  const Schedule sched = manual_schedule(s, {0.0, 0.0});
  const PrepResult res = fixed_point_prepare(s, sched, SampleMode::exact, {});
  CHECK(res.selective_phase_count == 0);
  CHECK(res.deviation < 1e-13);
  const QuantumSample start = exact_sample(s, 0.0);
  CHECK(overlap_sq(res.sample, start) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("three-stage exact drive keeps fidelity above 1 - 2^-9") {
  const System s = make_ising_system(1, {}, {{0, 1.0}});
  const Schedule sched = manual_schedule(s, {0.0, 0.4, 0.9, 1.5});
  for (std::size_t i = 0; i < sched.levels(); ++i) REQUIRE(sched.alpha(i) >= 0.5);
  PrepOptions opt;
  opt.depth = 2;
  const PrepResult res = fixed_point_prepare(s, sched, SampleMode::exact, opt);
  const QuantumSample target = exact_sample(s, 1.5);
  CHECK(overlap_sq(res.sample, target) >= 1.0 - std::pow(0.5, 9.0));
  // The aligned norm deviation is equally tight here.
  CHECK(res.deviation < 0.05);
}

TEST_CASE("walk-mode preparation meets the deviation budget and the ledger formula") {
  const System s = make_ising_system(2, {{0, 1, 1.0}}, {{0, 0.4}, {1, 0.4}});
  const Schedule sched = build_schedule(s, 0.8);
  REQUIRE(sched.levels() >= 2);
  PrepOptions opt;
  opt.eps_s = 1.0 / 32.0;
  opt.depth = 2;
  const PrepResult res = fixed_point_prepare(s, sched, SampleMode::walk, opt);
  CHECK(res.deviation <= opt.eps_s);
  // Query accounting: stages x (3^depth - 1) selective phases, each costing
  // 2 (2^b - 1) controlled walk applications.
  const std::uint64_t per_phase = 2 * ((std::uint64_t{1} << res.ancilla_qubits) - 1);
  CHECK(res.selective_phase_count == sched.levels() * 8);
  CHECK(res.walk_calls == res.selective_phase_count * per_phase);
  // The sample is a unit vector on [xy][anc].
  CHECK(res.sample.state.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("prepared lift matches the exact sample marginal") {
  const System s = make_ising_system(2, {{0, 1, 1.0}}, {{0, 0.4}, {1, 0.4}});
  const Schedule sched = build_schedule(s, 0.8);
  const PrepResult res = fixed_point_prepare(s, sched, SampleMode::walk, {});
  // Tracing out ancillas and the second factor recovers pi(beta_F).
  const auto pi = boltzmann(s, 0.8);
  const std::size_t d = s.size();
  const std::size_t sdim = res.sample.state.register_dim(1);
  for (std::size_t x = 0; x < d; ++x) {
    double mass = 0.0;
    for (std::size_t y = 0; y < d; ++y) {
      for (std::size_t a = 0; a < sdim; ++a) {
        mass += std::norm(res.sample.state.amplitudes()[static_cast<Eigen::Index>(
            (x * d + y) * sdim + a)]);
      }
    }
    CHECK(mass == doctest::Approx(pi[x]).epsilon(0.01));
  }
}

TEST_CASE("preparation rejects schedules with bad overlaps") {
  // Unique ground state: a hard quench sends the overlap to 1/D < 1/2.
  const System s = make_ising_system(2, {{0, 1, 1.0}}, {{0, 0.3}, {1, 0.3}});
  std::vector<double> betas{0.0, 20.0};
  std::vector<double> alphas{exact_partition(s, 20.0) / exact_partition(s, 0.0)};
  const Schedule sched(std::move(betas), std::move(alphas));
  const double ov = overlap_sq(exact_sample(s, 0.0), exact_sample(s, 20.0));
  REQUIRE(ov < 0.5);
  CHECK_THROWS_AS(fixed_point_prepare(s, sched, SampleMode::exact, {}), ConfigError);
}
