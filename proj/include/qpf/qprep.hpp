#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qpf/model.hpp"
#include "qpf/operators.hpp"
#include "qpf/state_vector.hpp"
#include "qpf/szegedy.hpp"
#include "qpf/walk_phase_ops.hpp"

namespace qpf {

enum class SampleMode { exact, walk };

// Coherent encoding of a Boltzmann distribution: exact mode carries
// sum sqrt(pi(sigma))|sigma> on a simple register, walk mode the stationary
// lift sum sqrt(pi_x)|x>|0> on the doubled register (plus any preparation
// ancillas in compact coordinates).
struct QuantumSample {
  SampleMode mode;
  double beta;
  StateVector state;
  double fidelity_bound;  // deviation budget; 0 when exact
};

QuantumSample exact_sample(const System& system, double beta,
                           std::size_t cap = kDefaultAmplitudeCap);

// |<a|b>|^2. Register shapes must match.
double overlap_sq(const QuantumSample& a, const QuantumSample& b);

// PE-based approximate reflection about the walk's stationary space:
// phase-estimate W into b ancillas, flip the sign of every nonzero outcome,
// uncompute. Carries its own kernel space; states it acts on use layout
// [xy][anc] with the compact ancilla register last.
class ApproxReflection {
 public:
  ApproxReflection(std::shared_ptr<const WalkOperator> walk, int b);

  int ancilla_qubits() const { return space_->b(); }
  std::size_t compact_ancilla_dim() const { return space_->dim(); }
  double error_bound() const { return ops_->error_bound(); }
  std::uint64_t walk_calls_per_application() const { return ops_->walk_calls_per_application(); }
  const WalkOperator& walk() const { return *walk_; }
  const PhaseKernelSpace& space() const { return *space_; }
  const WalkPhaseOps& ops() const { return *ops_; }

  // State on [xy][anc(compact)]; applies the reflection circuit.
  void apply(StateVector& state) const;
  // |phi> (x) |0^b> for a doubled-register vector phi, in compact layout.
  StateVector embed(const Eigen::VectorXcd& phi) const;

  // max over an orthonormal eigenbasis of A+B of
  // || Rtilde(phi (x) 0^b) - (R phi) (x) 0^b ||, with R the exact reflection
  // about the stationary lift. Computed by applying the circuit.
  double measured_worst_error() const;

 private:
  std::shared_ptr<const WalkOperator> walk_;
  std::shared_ptr<PhaseKernelSpace> space_;
  std::unique_ptr<WalkPhaseOps> ops_;
};

// omega |pi><pi| + (I - |pi><pi|) in exact mode (rank-one, from the oracle
// sample).
OperatorPtr selective_phase_exact(const QuantumSample& sample, cplx omega);

// Walk-mode counterpart: the reflection circuit with the conditional phase
// omega instead of -1 on the all-zero outcome. Acts on [xy][anc] states in
// the reflection's compact layout; keeps the reflection (and its walk) alive.
OperatorPtr selective_phase_walk(std::shared_ptr<const ApproxReflection> reflection,
                                 cplx omega);

struct PrepOptions {
  double eps_s = 1.0 / 32.0;
  int depth = 2;
  std::size_t cap = kDefaultAmplitudeCap;
};

struct PrepResult {
  QuantumSample sample;
  // || psi_out - target (x) |0...0> || after the deterministic global-phase
  // alignment; target is the exact sample (or lift) at the final beta.
  double deviation;
  std::uint64_t selective_phase_count;
  std::uint64_t walk_calls;  // ledger cost (0 in exact mode)
  int ancilla_qubits;        // b per selective phase (0 in exact mode)
};

// Grover pi/3 fixed-point drive across the schedule: starting from the
// uniform sample at beta_0 = 0, each stage i -> i+1 applies the recursion
//   A_0 = I,  A_{m+1} = A_m S_src(w) A_m^dag S_tgt(w) A_m,  w = e^{i pi/3},
// with selective phases about pi_i (source) and pi_{i+1} (target), taking the
// per-stage deviation eps to eps^{3^depth}. Stages whose endpoints coincide
// are skipped. Each stage ends with a deterministic global-phase alignment
// (global phases are unobservable and factor out of everything downstream).
// Requires every stage overlap |<pi_i|pi_{i+1}>|^2 >= 1/2.
PrepResult fixed_point_prepare(const System& system, const Schedule& schedule,
                               SampleMode mode, const PrepOptions& opt = {});

}  // namespace qpf
