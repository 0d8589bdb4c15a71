#include "qpf/classical.hpp"

#include <algorithm>
#include <cmath>

#include "qpf/errors.hpp"

namespace qpf {

ClassicalConfig ClassicalConfig::make(double epsilon, std::size_t levels) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0,1)");
  ClassicalConfig c;
  c.epsilon = epsilon;
  c.levels = levels;
  const double ell = static_cast<double>(levels);
  c.samples_per_ratio =
      levels == 0 ? 0 : static_cast<std::uint64_t>(std::ceil(64.0 * ell / (epsilon * epsilon)));
  c.variation_budget = levels == 0 ? 0.0 : epsilon * epsilon / (512.0 * ell * ell);
  return c;
}

double estimator_y(const System& system, double beta_i, double beta_next,
                   std::size_t state) {
  if (beta_next < beta_i) throw ConfigError("beta_next must be >= beta_i");
  if (state >= system.size()) throw ConfigError("state out of range");
  return std::exp(-(beta_next - beta_i) * system.shifted_energy(state));
}

double estimate_ratio_classical(const TransitionMatrix& chain, double beta_next,
                                std::uint64_t m, std::uint64_t burn, RandomStream& rng) {
  if (m == 0) throw ConfigError("need at least one sample per ratio");
  const System& sys = chain.system();
  double sum = 0.0;
  for (std::uint64_t s = 0; s < m; ++s) {
    const auto start = static_cast<std::size_t>(rng.below(chain.size()));
    const std::size_t x = sample_chain(chain, start, burn, rng);
    sum += estimator_y(sys, chain.beta(), beta_next, x);
  }
  return sum / static_cast<double>(m);
}

namespace {

std::uint64_t burn_in_for_level(const System& system, const Schedule& schedule,
                                std::size_t level, double d) {
  const TransitionMatrix chain = metropolis_chain(system, schedule.beta(level));
  const ChainSpectrum spec = chain_spectrum(chain);
  const double pi_min =
      *std::min_element(chain.stationary().begin(), chain.stationary().end());
  return mixing_steps(spec, d, pi_min);
}

}  // namespace

ClassicalEstimate classical_fpras(const System& system, const Schedule& schedule,
                                  double epsilon, RandomStream& rng) {
  for (std::size_t i = 0; i < schedule.levels(); ++i) {
    if (schedule.alpha(i) < 0.5) {
      throw ConfigError("schedule ratio below 1/2 at level " + std::to_string(i));
    }
  }
  ClassicalEstimate est;
  est.config = ClassicalConfig::make(epsilon, schedule.levels());
  est.total_chain_steps = 0;

  double product = 1.0;
  for (std::size_t i = 0; i < schedule.levels(); ++i) {
    const TransitionMatrix chain = metropolis_chain(system, schedule.beta(i));
    const ChainSpectrum spec = chain_spectrum(chain);
    const double pi_min =
        *std::min_element(chain.stationary().begin(), chain.stationary().end());
    const std::uint64_t burn = mixing_steps(spec, est.config.variation_budget, pi_min);
    const double mean = estimate_ratio_classical(chain, schedule.beta(i + 1),
                                                 est.config.samples_per_ratio, burn, rng);
    est.ratio_means.push_back(mean);
    est.burn_in.push_back(burn);
    est.total_chain_steps += est.config.samples_per_ratio * burn;
    product *= mean;
  }
  const double z0 = static_cast<double>(system.size());
  est.value = z0 * product * std::exp(-schedule.beta_final() * system.energy_offset());
  return est;
}

std::uint64_t classical_chain_step_cost(const System& system, const Schedule& schedule,
                                        double epsilon) {
  const ClassicalConfig cfg = ClassicalConfig::make(epsilon, schedule.levels());
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < schedule.levels(); ++i) {
    total += cfg.samples_per_ratio *
             burn_in_for_level(system, schedule, i, cfg.variation_budget);
  }
  return total;
}

}  // namespace qpf
