#pragma once

#include <cstdint>
#include <vector>

#include "qpf/markov.hpp"
#include "qpf/model.hpp"
#include "qpf/random.hpp"

namespace qpf {

// Sampling budgets for the classical scheme at relative accuracy eps:
//   m = ceil(64*ell/eps^2) samples per ratio,
//   d = eps^2 / (512*ell^2) variation-distance budget per sample.
// Pre-rounding, d * m * ell = 1/8.
struct ClassicalConfig {
  double epsilon;
  std::size_t levels;
  std::uint64_t samples_per_ratio;  // m
  double variation_budget;          // d

  static ClassicalConfig make(double epsilon, std::size_t levels);
};

struct ClassicalEstimate {
  double value;                         // Z estimate, unshifted
  std::vector<double> ratio_means;      // mean Y_i per level
  std::vector<std::uint64_t> burn_in;   // chain steps per sample, per level
  std::uint64_t total_chain_steps;      // sum_i m * burn_i
  ClassicalConfig config;
};

// Y = e^{-(beta_next - beta_i) * E'(state)}; an unbiased estimator of
// Z(beta_next)/Z(beta_i) when the state is Boltzmann(beta_i)-distributed.
double estimator_y(const System& system, double beta_i, double beta_next,
                   std::size_t state);

// Mean of m estimator evaluations on chain samples, each taken after `burn`
// steps from an independent uniform start.
double estimate_ratio_classical(const TransitionMatrix& chain, double beta_next,
                                std::uint64_t m, std::uint64_t burn, RandomStream& rng);

// The full sampling scheme: telescoping product of per-level ratio means with
// burn-in from the relaxation-time bound. Returns the unshifted Z estimate.
ClassicalEstimate classical_fpras(const System& system, const Schedule& schedule,
                                  double epsilon, RandomStream& rng);

// Chain-step cost of classical_fpras without running it (the burn-in lengths
// are deterministic). Used for ledger comparisons and the bench sweep.
std::uint64_t classical_chain_step_cost(const System& system, const Schedule& schedule,
                                        double epsilon);

}  // namespace qpf
