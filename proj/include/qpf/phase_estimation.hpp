#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>

#include "qpf/operators.hpp"
#include "qpf/random.hpp"
#include "qpf/state_vector.hpp"

namespace qpf {

// Exact outcome distribution of the textbook phase-estimation circuit with t
// ancilla qubits: Hadamards, controlled-U^{2^j}, inverse Fourier transform,
// measurement. Outcome k estimates phase 2*pi*k/2^t.
struct PhaseEstimationResult {
  int t = 0;
  Eigen::VectorXd probabilities;  // length 2^t, sums to 1

  double phase_of(std::size_t outcome) const;
  std::size_t sample(RandomStream& rng) const;
};

// Computes the distribution from the autocorrelation sequence
// a_d = <psi|U^d|psi>, d < 2^t, which by unitarity determines the final
// register state exactly:
//   p_k = 4^{-t} sum_{|d|<2^t} e^{-2pi i k d/2^t} (2^t - |d|) a_d.
// No measurement sampling, no 2^t-dimensional ancilla register. The notional
// joint dimension 2^t * dim(psi) is still checked against the cap.
PhaseEstimationResult phase_estimation(const Operator& u, const StateVector& psi, int t,
                                       std::size_t cap = kDefaultAmplitudeCap);

// Distribution from a precomputed autocorrelation sequence (acf[d] =
// <psi|U^d|psi>, length 2^t); for callers that evolve the state themselves.
PhaseEstimationResult phase_estimation_from_autocorrelation(std::span<const cplx> acf, int t);

// t = ceil(log2(2*pi/eps_pe)) + ceil(log2(2 + 1/(2*p_f))): ancillas needed for
// phase accuracy eps_pe with failure probability at most p_f.
int ancilla_count(double eps_pe, double p_f);

}  // namespace qpf
