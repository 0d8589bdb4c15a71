#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qpf/model.hpp"
#include "qpf/phase_estimation.hpp"
#include "qpf/qprep.hpp"
#include "qpf/random.hpp"

namespace qpf {

// V_i: a rotation on one estimator qubit controlled by the system state,
// with 2x2 block [[sqrt(y), sqrt(1-y)], [-sqrt(1-y), sqrt(y)]] at
// y(sigma) = e^{-(beta_next - beta_i) E'(sigma)} in (0, 1]. The expected
// value of the est=0 projector on V_i(|pi_i> (x) |0>) equals
// Z(beta_next)/Z(beta_i).
struct ObservableRotation {
  double beta_i;
  double beta_next;
  std::vector<double> y;

  // Applies to a state whose `sys_reg` digit divided by `sys_divisor` indexes
  // the system state (divisor 1 for a simple register, D for the first factor
  // of a doubled register).
  void apply(StateVector& state, std::size_t sys_reg, std::size_t sys_divisor,
             std::size_t est_reg, bool adjoint) const;
};

ObservableRotation build_rotation(const System& system, double beta_i, double beta_next);

// Perfect-mode Grover rotation G = (2|psi><psi| - I)(2P - I) with
// P = I (x) |0><0| on the estimator register.
OperatorPtr grover_rotation(const StateVector& psi, std::size_t est_reg);

// Outcome theta' = 2 pi k / 2^t collapses to alpha' = (1 + cos theta')/2;
// theta and 2pi - theta give the same value.
double alpha_from_outcome(std::size_t outcome, int t);

struct RatioDistribution {
  int t = 0;
  double alpha_exact = 0.0;
  double eps_pe = 0.0;
  // Exact outcome-distribution mass inside [(1-eps_pe) alpha, (1+eps_pe) alpha].
  double within_band_mass = 0.0;
  PhaseEstimationResult distribution;
  // Walk mode diagnostics (0 in perfect mode).
  double prep_deviation = 0.0;
  double reflection_accumulated = 0.0;
  double reflection_error_bound = 0.0;
  int reflection_ancillas = 0;

  double draw(RandomStream& rng) const;
};

// Lemma-style single-copy ratio estimation in perfect mode: phase estimation
// of G on V_i(|pi_i> (x) |0>) with t = ancilla_count(eps_pe, p_f).
RatioDistribution ratio_distribution_perfect(const System& system, const Schedule& schedule,
                                             std::size_t level, double eps_pe, double p_f,
                                             std::size_t cap = kDefaultAmplitudeCap);

// Walk-mode counterpart: the prepared (approximate) sample enters on the
// doubled register, the reflection about psi_i is the PE-based circuit built
// from W_i with eps_r ancilla budget. Also measures the accumulated deviation
// of the approximate-reflection trajectory from the exact-reflection one.
RatioDistribution ratio_distribution_walk(const System& system, const Schedule& schedule,
                                          std::size_t level, double eps_pe, double p_f,
                                          double eps_r, const PrepResult& prepared,
                                          std::size_t cap = kDefaultAmplitudeCap);

// ceil(8 ln(1/delta_boost)) runs; median failure probability <= delta_boost
// when each run lands in band with probability >= 3/4 (Hoeffding).
std::uint64_t power_median_runs(double delta_boost);
double power_median(const std::function<double()>& run_once, double delta_boost);

// z0 * prod(estimates) * shift_factor.
double compose_product(std::span<const double> estimates, double z0, double shift_factor);

struct PipelineConfig {
  double epsilon = 0.0;
  std::size_t levels = 0;
  SampleMode mode = SampleMode::exact;
  double eps_pe = 0.0;       // epsilon / (2 ell)
  double delta_boost = 0.0;  // 1 / (4 ell)
  double p_f = 0.125;
  double eps_s = 1.0 / 32.0;  // walk-mode preparation budget
  double eps_r = 0.0;         // walk-mode reflection budget, eps_pe / 32
  int prep_depth = 2;

  static PipelineConfig make(double epsilon, std::size_t levels, SampleMode mode);
};

struct LevelLedger {
  std::uint64_t walk_ops = 0;
  std::uint64_t reflection_ops = 0;
  std::uint64_t samples_prepared = 0;
  std::uint64_t chain_steps = 0;
};

struct QueryLedger {
  std::vector<LevelLedger> per_level;
  LevelLedger total;

  void add(std::size_t level, const LevelLedger& delta);
};

struct LevelReport {
  double alpha_exact = 0.0;
  double estimate = 0.0;
  double within_band_mass = 0.0;
  int t = 0;
  std::uint64_t median_runs = 0;
  double prep_deviation = 0.0;
  double reflection_accumulated = 0.0;
};

struct PipelineResult {
  double estimate = 0.0;
  double exact_z = 0.0;
  PipelineConfig config;
  std::vector<LevelReport> levels;
  QueryLedger ledger;
};

struct PipelineOptions {
  std::size_t cap = kDefaultAmplitudeCap;
  int prep_depth = 2;
  double eps_s = 1.0 / 32.0;
};

// Raised when a pipeline level fails; carries the queries consumed so far so
// diagnostics survive the failure. `cap` distinguishes cap violations from
// configuration/numeric trouble.
struct PipelineError : std::runtime_error {
  PipelineError(const std::string& what, QueryLedger partial, bool cap_exceeded)
      : std::runtime_error(what), ledger(std::move(partial)), cap(cap_exceeded) {}
  QueryLedger ledger;
  bool cap;
};

// The full quantum scheme: per level, prepare the sample (exactly, or by the
// pi/3 fixed-point method with walk reflections), phase-estimate the Grover
// rotation with eps_pe = eps/(2 ell), boost by the powering median with
// delta_boost = 1/(4 ell), and compose the telescoping product.
PipelineResult quantum_fpras(const System& system, const Schedule& schedule, double eps,
                             SampleMode mode, RandomStream& rng,
                             const PipelineOptions& opt = {});

}  // namespace qpf
