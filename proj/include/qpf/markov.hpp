#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qpf/model.hpp"
#include "qpf/random.hpp"

namespace qpf {

class RandomStream;

// Row-stochastic, reversible, lazy transition matrix targeting the Boltzmann
// distribution of its system at the given beta. Immutable after construction.
class TransitionMatrix {
 public:
  TransitionMatrix(System system, double beta, Eigen::MatrixXd p);

  std::size_t size() const { return static_cast<std::size_t>(p_.rows()); }
  const Eigen::MatrixXd& matrix() const { return p_; }
  double beta() const { return beta_; }
  const System& system() const { return system_; }
  // Exact stationary distribution (the Boltzmann vector at beta).
  const std::vector<double>& stationary() const { return pi_; }

 private:
  System system_;
  double beta_;
  Eigen::MatrixXd p_;
  std::vector<double> pi_;
};

// Real spectrum of a reversible chain, sorted descending; gap = 1 - mu_1.
struct ChainSpectrum {
  std::vector<double> eigenvalues;
  double gap;
};

// Single-bit-flip Metropolis chain, lazified as (I + P)/2: propose a uniform
// bit flip of the state index, accept with min(1, e^{-beta*dE}). Requires a
// power-of-two state space (every Ising system has one). Stationary
// distribution equals boltzmann(system, beta).
TransitionMatrix metropolis_chain(const System& system, double beta);

// Eigendecomposition via the symmetrization D_pi^{1/2} P D_pi^{-1/2}.
// Signals non-reversible input when the symmetrized matrix differs from its
// transpose by more than 1e-8.
ChainSpectrum chain_spectrum(const TransitionMatrix& p);

// State reached after `steps` transitions from `start`; deterministic given
// the stream's seed.
std::size_t sample_chain(const TransitionMatrix& p, std::size_t start,
                         std::uint64_t steps, RandomStream& rng);

// ceil((1/gap) * ln(1/(d * pi_min))): relaxation-time bound guaranteeing
// variation distance <= d from a worst-case start. Returns 0 when the log is
// nonpositive.
std::uint64_t mixing_steps(const ChainSpectrum& spectrum, double d, double pi_min);

// Row-major CSV dump of P (17 significant digits per entry).
void dump_chain_csv(const TransitionMatrix& p, const std::string& path);

}  // namespace qpf
