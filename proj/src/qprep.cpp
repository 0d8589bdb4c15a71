#include "qpf/qprep.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "qpf/errors.hpp"
#include "qpf/markov.hpp"
#include "qpf/operators.hpp"

namespace qpf {

namespace {

constexpr double kZeroPhaseTol = 1e-10;

Eigen::VectorXcd sqrt_boltzmann(const System& system, double beta) {
  const std::vector<double> pi = boltzmann(system, beta);
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(pi.size()));
  for (std::size_t s = 0; s < pi.size(); ++s) {
    amps[static_cast<Eigen::Index>(s)] = std::sqrt(pi[s]);
  }
  return amps;
}

}  // namespace

QuantumSample exact_sample(const System& system, double beta, std::size_t cap) {
  StateVector state({{"sys", system.size()}}, sqrt_boltzmann(system, beta), cap);
  return QuantumSample{SampleMode::exact, beta, std::move(state), 0.0};
}

double overlap_sq(const QuantumSample& a, const QuantumSample& b) {
  if (a.state.dim() != b.state.dim()) throw ConfigError("sample register shapes differ");
  return std::norm(a.state.inner(b.state));
}

OperatorPtr selective_phase_exact(const QuantumSample& sample, cplx omega) {
  return selective_phase(sample.state, omega);
}

OperatorPtr selective_phase_walk(std::shared_ptr<const ApproxReflection> reflection,
                                 cplx omega) {
  if (!reflection) throw ConfigError("walk selective phase needs a reflection");
  const std::size_t dim = reflection->walk().dim() * reflection->compact_ancilla_dim();
  return std::make_shared<CallbackOperator>(
      dim, [reflection, omega](StateVector& state, bool adjoint) {
        reflection->ops().apply_selective_phase(state, 0, 1, omega, adjoint);
      });
}

ApproxReflection::ApproxReflection(std::shared_ptr<const WalkOperator> walk, int b)
    : walk_(std::move(walk)), space_(std::make_shared<PhaseKernelSpace>(b)) {
  if (!walk_) throw ConfigError("approximate reflection needs a walk");
  ops_ = std::make_unique<WalkPhaseOps>(*walk_, space_);
  space_->finalize();
  ops_->bind();
}

namespace {

// Reflection circuit on a [xy][anc] state (no estimator register): the
// "-1 on every nonzero outcome" rule is the negative of a selective phase
// with omega = -1, whose blocks are I - 2 P_u.
void reflection_no_est(const WalkPhaseOps& ops, StateVector& state) {
  ops.apply_selective_phase(state, 0, 1, cplx{-1.0, 0.0}, false);
  state.amplitudes() = -state.amplitudes();
}

}  // namespace

void ApproxReflection::apply(StateVector& state) const { reflection_no_est(*ops_, state); }

StateVector ApproxReflection::embed(const Eigen::VectorXcd& phi) const {
  const std::size_t s = space_->dim();
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(phi.size() * static_cast<Eigen::Index>(s)));
  for (Eigen::Index x = 0; x < phi.size(); ++x) {
    amps.segment(x * static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) =
        phi[x] * space_->zero_coords();
  }
  return StateVector({{"xy", static_cast<std::size_t>(phi.size())}, {"anc", s}},
                     std::move(amps));
}

double ApproxReflection::measured_worst_error() const {
  const Eigen::VectorXcd lift = walk_->stationary_lift();
  double worst = 0.0;
  for (std::size_t j = 0; j < walk_->phases().size(); ++j) {
    const double phi = walk_->phases()[j];
    if (std::abs(phi) < kZeroPhaseTol) continue;  // A+B phase-0 is the exact fixed point
    const Eigen::VectorXcd vec = walk_->eigenbasis().col(static_cast<Eigen::Index>(j));
    StateVector state = embed(vec);
    apply(state);
    // Exact reflection about the lift: R phi = 2 <lift|phi> lift - phi.
    StateVector expect = embed(-vec + 2.0 * lift.dot(vec) * lift);
    const double err = (state.amplitudes() - expect.amplitudes()).norm();
    worst = std::max(worst, err);
  }
  return worst;
}

namespace detail {

// One pi/3 stage: A_depth applied to the state, with S_src/S_tgt callbacks.
// count accumulates selective-phase applications (3^depth - 1 per stage).
void fixed_point_recursion(int depth, bool adjoint,
                           const std::function<void(cplx, bool)>& src,
                           const std::function<void(cplx, bool)>& tgt,
                           std::uint64_t& count) {
  if (depth == 0) return;
  const cplx w = std::polar(1.0, std::numbers::pi / 3.0);
  if (!adjoint) {
    fixed_point_recursion(depth - 1, false, src, tgt, count);
    tgt(w, false);
    ++count;
    fixed_point_recursion(depth - 1, true, src, tgt, count);
    src(w, false);
    ++count;
    fixed_point_recursion(depth - 1, false, src, tgt, count);
  } else {
    fixed_point_recursion(depth - 1, true, src, tgt, count);
    src(w, true);
    ++count;
    fixed_point_recursion(depth - 1, false, src, tgt, count);
    tgt(w, true);
    ++count;
    fixed_point_recursion(depth - 1, true, src, tgt, count);
  }
}

}  // namespace detail

PrepResult fixed_point_prepare(const System& system, const Schedule& schedule,
                               SampleMode mode, const PrepOptions& opt) {
  if (opt.depth < 1 || opt.depth > 6) throw ConfigError("recursion depth must be in [1, 6]");
  if (!(opt.eps_s > 0.0 && opt.eps_s < 1.0)) throw ConfigError("eps_s must be in (0,1)");
  const std::size_t ell = schedule.levels();

  // Stage overlaps must clear 1/2 for the recursion to contract.
  for (std::size_t i = 0; i < ell; ++i) {
    const QuantumSample a = exact_sample(system, schedule.beta(i), opt.cap);
    const QuantumSample b = exact_sample(system, schedule.beta(i + 1), opt.cap);
    if (overlap_sq(a, b) < 0.5 - 1e-12) {
      throw ConfigError("stage overlap below 1/2 at level " + std::to_string(i) +
                        " (schedule violation)");
    }
  }

  std::uint64_t selective_phases = 0;
  std::uint64_t walk_calls = 0;

  if (mode == SampleMode::exact) {
    StateVector state = exact_sample(system, schedule.beta(0), opt.cap).state;
    for (std::size_t i = 0; i < ell; ++i) {
      if (schedule.beta(i + 1) == schedule.beta(i)) continue;
      const StateVector src_ref = exact_sample(system, schedule.beta(i), opt.cap).state;
      const StateVector tgt_ref = exact_sample(system, schedule.beta(i + 1), opt.cap).state;
      auto src = [&](cplx w, bool adj) {
        RankOneOperator(cplx{1.0, 0.0}, w - 1.0, src_ref.amplitudes()).apply(state, adj);
      };
      auto tgt = [&](cplx w, bool adj) {
        RankOneOperator(cplx{1.0, 0.0}, w - 1.0, tgt_ref.amplitudes()).apply(state, adj);
      };
      detail::fixed_point_recursion(opt.depth, false, src, tgt, selective_phases);
      // Deterministic global-phase alignment; unobservable, keeps the norm
      // contract meaningful.
      const cplx ov = tgt_ref.inner(state);
      if (std::abs(ov) > 1e-15) state.amplitudes() *= std::conj(ov) / std::abs(ov);
    }
    const StateVector target = exact_sample(system, schedule.beta_final(), opt.cap).state;
    const double deviation = (state.amplitudes() - target.amplitudes()).norm();
    return PrepResult{
        QuantumSample{SampleMode::exact, schedule.beta_final(), std::move(state), opt.eps_s},
        deviation, selective_phases, 0, 0};
  }

  // Walk mode: one shared compact ancilla register across every stage.
  std::vector<std::shared_ptr<const WalkOperator>> walks;
  double min_gap = std::numbers::pi;
  for (std::size_t i = 0; i <= ell; ++i) {
    auto walk = std::make_shared<WalkOperator>(metropolis_chain(system, schedule.beta(i)));
    const WalkSpectrum spec = walk_spectrum(*walk);
    min_gap = std::min(min_gap, spec.phase_gap);
    walks.push_back(std::move(walk));
  }
  const double per_stage_eps_r =
      opt.eps_s / (8.0 * static_cast<double>(std::max<std::size_t>(ell, 1)) *
                   std::pow(3.0, opt.depth));
  const int b = reflection_ancillas(per_stage_eps_r, min_gap);

  auto space = std::make_shared<PhaseKernelSpace>(b);
  std::vector<std::unique_ptr<WalkPhaseOps>> ops;
  for (const auto& walk : walks) {
    ops.push_back(std::make_unique<WalkPhaseOps>(*walk, space));
  }
  space->finalize();
  for (auto& op : ops) op->bind();

  const std::size_t d2 = walks[0]->dim();
  const std::size_t s = space->dim();
  if (d2 * s > opt.cap) throw CapError("preparation state exceeds the amplitude cap");

  // |pi_0 lift> (x) |0...0>.
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(d2 * s));
  const Eigen::VectorXcd lift0 = walks[0]->stationary_lift();
  for (std::size_t x = 0; x < d2; ++x) {
    amps.segment(static_cast<Eigen::Index>(x * s), static_cast<Eigen::Index>(s)) =
        lift0[static_cast<Eigen::Index>(x)] * space->zero_coords();
  }
  StateVector state({{"xy", d2}, {"anc", s}}, std::move(amps), opt.cap);

  const std::uint64_t calls_per_phase = 2 * ((std::uint64_t{1} << b) - 1);
  for (std::size_t i = 0; i < ell; ++i) {
    if (schedule.beta(i + 1) == schedule.beta(i)) continue;
    auto src = [&](cplx w, bool adj) { ops[i]->apply_selective_phase(state, 0, 1, w, adj); };
    auto tgt = [&](cplx w, bool adj) {
      ops[i + 1]->apply_selective_phase(state, 0, 1, w, adj);
    };
    std::uint64_t phases = 0;
    detail::fixed_point_recursion(opt.depth, false, src, tgt, phases);
    selective_phases += phases;
    walk_calls += phases * calls_per_phase;

    // Global-phase alignment against the stage target's lift.
    const Eigen::VectorXcd tgt_lift = walks[i + 1]->stationary_lift();
    cplx ov{0.0, 0.0};
    for (std::size_t x = 0; x < d2; ++x) {
      const cplx lx = tgt_lift[static_cast<Eigen::Index>(x)];
      if (lx == cplx{0.0, 0.0}) continue;
      ov += std::conj(lx) * space->zero_coords().dot(state.amplitudes().segment(
                                static_cast<Eigen::Index>(x * s), static_cast<Eigen::Index>(s)));
    }
    if (std::abs(ov) > 1e-15) state.amplitudes() *= std::conj(ov) / std::abs(ov);
  }

  // Deviation against lift(beta_F) (x) |0...0>.
  double deviation = 0.0;
  {
    const Eigen::VectorXcd tgt_lift = walks[ell]->stationary_lift();
    Eigen::VectorXcd target(static_cast<Eigen::Index>(d2 * s));
    for (std::size_t x = 0; x < d2; ++x) {
      target.segment(static_cast<Eigen::Index>(x * s), static_cast<Eigen::Index>(s)) =
          tgt_lift[static_cast<Eigen::Index>(x)] * space->zero_coords();
    }
    deviation = (state.amplitudes() - target).norm();
  }

  // Compress the ancilla register onto its occupied span: downstream circuits
  // act as the identity on it, so any orthonormal basis of that span is
  // equivalent and the estimator stays small.
  {
    Eigen::MatrixXcd reshaped(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(d2));
    for (std::size_t x = 0; x < d2; ++x) {
      reshaped.col(static_cast<Eigen::Index>(x)) = state.amplitudes().segment(
          static_cast<Eigen::Index>(x * s), static_cast<Eigen::Index>(s));
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(reshaped, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::Index rank = 0;
    for (Eigen::Index r = 0; r < svd.singularValues().size(); ++r) {
      if (svd.singularValues()(r) > 1e-14) ++rank;
    }
    rank = std::max<Eigen::Index>(rank, 1);
    // column x of the compressed state = diag(sv) V^dag restricted.
    Eigen::MatrixXcd compressed =
        svd.singularValues().head(rank).asDiagonal() * svd.matrixV().leftCols(rank).adjoint();
    Eigen::VectorXcd packed(static_cast<Eigen::Index>(d2) * rank);
    for (std::size_t x = 0; x < d2; ++x) {
      packed.segment(static_cast<Eigen::Index>(x) * rank, rank) =
          compressed.col(static_cast<Eigen::Index>(x));
    }
    StateVector small({{"xy", d2}, {"anc", static_cast<std::size_t>(rank)}}, std::move(packed),
                      opt.cap);
    return PrepResult{
        QuantumSample{SampleMode::walk, schedule.beta_final(), std::move(small), opt.eps_s},
        deviation, selective_phases, walk_calls, b};
  }
}

}  // namespace qpf
