#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qpf/markov.hpp"
#include "qpf/state_vector.hpp"

namespace qpf {

// Walk-mode guardrail: dense D^2 x D^2 operators.
inline constexpr std::size_t kMaxWalkStates = std::size_t{1} << 6;

// Quantization of a reversible lazy chain on the doubled register C^D (x) C^D:
//   W = R_B R_A,  R_A = 2 Pi_A - I over A = span{|x>|0>},
//   R_B = (U^dag S U) R_A (U^dag S U)  with S the register swap and U the
// quantum update. Holds the dense unitary, its orthonormal eigenbasis (from a
// complex Schur decomposition, safe under the degenerate phase-0 cluster),
// and the underlying chain.
class WalkOperator {
 public:
  explicit WalkOperator(TransitionMatrix chain);

  std::size_t chain_size() const { return chain_.size(); }
  std::size_t dim() const { return chain_size() * chain_size(); }
  const TransitionMatrix& chain() const { return chain_; }
  const ChainSpectrum& chain_spectrum() const { return chain_spec_; }

  const Eigen::MatrixXcd& matrix() const { return w_; }
  const Eigen::MatrixXd& update() const { return update_; }
  // Orthonormal eigenbasis column j has eigenphase phases()[j] in (-pi, pi].
  const Eigen::MatrixXcd& eigenbasis() const { return basis_; }
  const std::vector<double>& phases() const { return phases_; }

  // Sum_x sqrt(pi_x) |x>|0>, the phase-0 eigenvector inside A (+ B).
  Eigen::VectorXcd stationary_lift() const;

 private:
  TransitionMatrix chain_;
  ChainSpectrum chain_spec_;
  Eigen::MatrixXd update_;
  Eigen::MatrixXcd w_;
  Eigen::MatrixXcd basis_;
  std::vector<double> phases_;
};

// Block-diagonal quantum update U = sum_x |x><x| (x) V_x with
// V_x|0> = sum_y sqrt(p_xy)|y>, each V_x the Householder reflection taking
// |0> to the row state (identity when the row state is |0>).
Eigen::MatrixXd quantum_update(const TransitionMatrix& chain);

WalkOperator build_walk(const TransitionMatrix& chain);

struct WalkPairing {
  double mu;          // chain eigenvalue < 1
  double theta;       // arccos(mu)
  double phase_pos;   // matched eigenphase +2 theta (canonical)
  double phase_neg;   // matched eigenphase -2 theta (canonical)
};

struct WalkSpectrum {
  // Nonzero eigenphases of W restricted to A+B, canonical in (-pi, pi],
  // sorted ascending; counted with multiplicity.
  std::vector<double> phases_ab;
  // Phase-0 multiplicity inside A+B (1 for an ergodic chain: the lift).
  std::size_t zero_phase_multiplicity;
  double phase_gap;  // smallest positive |phase|
  double chain_gap;  // delta of the underlying chain
  std::vector<WalkPairing> pairing;
};

// Eigenphases of W restricted to A+B: eigenvectors are kept when their
// projection onto A+B exceeds 1e-8 in norm. The degenerate phase-0 cluster is
// resolved through the projector onto A+B rather than per-eigenvector tests.
WalkSpectrum walk_spectrum(const WalkOperator& walk);

void dump_walk_csv(const WalkSpectrum& spectrum, const std::string& path);

}  // namespace qpf
