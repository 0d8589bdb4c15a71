#include "qpf/qestimate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpf/errors.hpp"
#include "qpf/markov.hpp"
#include "qpf/operators.hpp"

namespace qpf {

ObservableRotation build_rotation(const System& system, double beta_i, double beta_next) {
  if (beta_next < beta_i) {
    throw ConfigError("estimator rotation needs beta_next >= beta_i (else y > 1)");
  }
  ObservableRotation rot;
  rot.beta_i = beta_i;
  rot.beta_next = beta_next;
  rot.y.resize(system.size());
  for (std::size_t s = 0; s < system.size(); ++s) {
    rot.y[s] = std::exp(-(beta_next - beta_i) * system.shifted_energy(s));
  }
  return rot;
}

void ObservableRotation::apply(StateVector& state, std::size_t sys_reg,
                               std::size_t sys_divisor, std::size_t est_reg,
                               bool adjoint) const {
  if (state.register_dim(est_reg) != 2) throw ConfigError("estimator register must be a qubit");
  auto& amps = state.amplitudes();
  const std::size_t sys_stride = state.stride(sys_reg);
  const std::size_t sys_dim = state.register_dim(sys_reg);
  const std::size_t est_stride = state.stride(est_reg);
  for (std::size_t idx = 0; idx < state.dim(); ++idx) {
    if ((idx / est_stride) % 2 != 0) continue;
    const std::size_t sigma = ((idx / sys_stride) % sys_dim) / sys_divisor;
    const double c = std::sqrt(y[sigma]);
    const double sN = std::sqrt(1.0 - y[sigma]);
    const auto i0 = static_cast<Eigen::Index>(idx);
    const auto i1 = static_cast<Eigen::Index>(idx + est_stride);
    const cplx a0 = amps[i0], a1 = amps[i1];
    if (!adjoint) {
      amps[i0] = c * a0 + sN * a1;
      amps[i1] = -sN * a0 + c * a1;
    } else {
      amps[i0] = c * a0 - sN * a1;
      amps[i1] = sN * a0 + c * a1;
    }
  }
}

OperatorPtr grover_rotation(const StateVector& psi, std::size_t est_reg) {
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw ConfigError("psi must be normalized");
  Eigen::VectorXcd zdiag(2);
  zdiag << cplx{1.0, 0.0}, cplx{-1.0, 0.0};
  std::vector<OperatorPtr> factors;
  factors.push_back(reflect_about(psi));
  factors.push_back(std::make_shared<RegisterDiagonalOperator>(zdiag, est_reg, psi.dim()));
  return std::make_shared<ProductOperator>(std::move(factors));
}

double alpha_from_outcome(std::size_t outcome, int t) {
  const double theta =
      2.0 * std::numbers::pi * static_cast<double>(outcome) / static_cast<double>(1ull << t);
  return 0.5 * (1.0 + std::cos(theta));
}

double RatioDistribution::draw(RandomStream& rng) const {
  return alpha_from_outcome(distribution.sample(rng), t);
}

namespace {

double band_mass(const PhaseEstimationResult& dist, int t, double alpha, double eps_pe) {
  const double tol = eps_pe * alpha + 1e-15;
  double mass = 0.0;
  for (Eigen::Index k = 0; k < dist.probabilities.size(); ++k) {
    const double a = alpha_from_outcome(static_cast<std::size_t>(k), t);
    if (std::abs(a - alpha) <= tol) mass += dist.probabilities[k];
  }
  return mass;
}

}  // namespace

RatioDistribution ratio_distribution_perfect(const System& system, const Schedule& schedule,
                                             std::size_t level, double eps_pe, double p_f,
                                             std::size_t cap) {
  if (level >= schedule.levels()) throw ConfigError("level out of range");
  const double beta_i = schedule.beta(level);
  const double beta_next = schedule.beta(level + 1);

  StateVector psi = exact_sample(system, beta_i, cap).state;
  psi.append_register({"est", 2});
  const ObservableRotation rot = build_rotation(system, beta_i, beta_next);
  rot.apply(psi, 0, 1, 1, false);

  const int t = ancilla_count(eps_pe, p_f);
  const OperatorPtr g = grover_rotation(psi, 1);
  RatioDistribution rd;
  rd.t = t;
  rd.eps_pe = eps_pe;
  rd.alpha_exact = schedule.alpha(level);
  rd.distribution = phase_estimation(*g, psi, t, cap);
  rd.within_band_mass = band_mass(rd.distribution, t, rd.alpha_exact, eps_pe);
  return rd;
}

namespace {

// Sign flip on est=1 amplitudes: 2P - I.
void apply_est_z(StateVector& state, std::size_t est_reg) {
  auto& amps = state.amplitudes();
  const std::size_t stride = state.stride(est_reg);
  for (std::size_t idx = 0; idx < state.dim(); ++idx) {
    if ((idx / stride) % 2 == 1) amps[static_cast<Eigen::Index>(idx)] = -amps[static_cast<Eigen::Index>(idx)];
  }
}

// Rank-one reflection 2|chi><chi| - I on the combined (xy, est) factor,
// identity on the spectator ancilla registers.
void apply_subfactor_reflection(StateVector& state, const Eigen::VectorXcd& chi,
                                std::size_t xy_reg, std::size_t est_reg) {
  const std::size_t xy_dim = state.register_dim(xy_reg);
  const std::size_t xy_stride = state.stride(xy_reg);
  const std::size_t est_stride = state.stride(est_reg);
  if (static_cast<std::size_t>(chi.size()) != xy_dim * 2) {
    throw ConfigError("reflection vector does not match (xy, est)");
  }
  auto& amps = state.amplitudes();
  const std::size_t spectators = state.dim() / (xy_dim * 2);
  // Enumerate spectator assignments: indices with xy and est digits zero.
  for (std::size_t idx = 0; idx < state.dim(); ++idx) {
    if ((idx / xy_stride) % xy_dim != 0) continue;
    if ((idx / est_stride) % 2 != 0) continue;
    cplx overlap{0.0, 0.0};
    for (std::size_t x = 0; x < xy_dim; ++x) {
      for (std::size_t e = 0; e < 2; ++e) {
        overlap += std::conj(chi[static_cast<Eigen::Index>(x * 2 + e)]) *
                   amps[static_cast<Eigen::Index>(idx + x * xy_stride + e * est_stride)];
      }
    }
    for (std::size_t x = 0; x < xy_dim; ++x) {
      for (std::size_t e = 0; e < 2; ++e) {
        auto& a = amps[static_cast<Eigen::Index>(idx + x * xy_stride + e * est_stride)];
        a = 2.0 * overlap * chi[static_cast<Eigen::Index>(x * 2 + e)] - a;
      }
    }
  }
  (void)spectators;
}

}  // namespace

RatioDistribution ratio_distribution_walk(const System& system, const Schedule& schedule,
                                          std::size_t level, double eps_pe, double p_f,
                                          double eps_r, const PrepResult& prepared,
                                          std::size_t cap) {
  if (level >= schedule.levels()) throw ConfigError("level out of range");
  if (prepared.sample.mode != SampleMode::walk) {
    throw ConfigError("walk-mode estimation needs a walk-mode sample");
  }
  const double beta_i = schedule.beta(level);
  const double beta_next = schedule.beta(level + 1);
  if (std::abs(prepared.sample.beta - beta_i) > 1e-12) {
    throw ConfigError("prepared sample beta does not match the level");
  }

  auto walk = std::make_shared<const WalkOperator>(metropolis_chain(system, beta_i));
  const WalkSpectrum spec = walk_spectrum(*walk);
  const int b = reflection_ancillas(eps_r, spec.phase_gap);
  auto space = std::make_shared<PhaseKernelSpace>(b);
  WalkPhaseOps ops(*walk, space);
  space->finalize();
  ops.bind();

  const std::size_t d2 = walk->dim();
  const std::size_t d = walk->chain_size();
  const StateVector& prep_state = prepared.sample.state;
  if (prep_state.register_dim(0) != d2) throw ConfigError("prepared sample register mismatch");
  const std::size_t sp = prep_state.register_dim(1);
  const std::size_t sr = space->dim();
  if (d2 * 2 * sp * sr > cap) throw CapError("walk estimation state exceeds the amplitude cap");

  // Assemble [xy][est][ancP][ancR] with est = 0, ancR = |0...0> coords.
  StateVector state({{"xy", d2}, {"est", 2}, {"ancp", sp}, {"ancr", sr}},
                    Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d2 * 2 * sp * sr)), cap);
  {
    auto& amps = state.amplitudes();
    const Eigen::VectorXcd& zero = space->zero_coords();
    for (std::size_t x = 0; x < d2; ++x) {
      for (std::size_t p = 0; p < sp; ++p) {
        const cplx src = prep_state.amplitudes()[static_cast<Eigen::Index>(x * sp + p)];
        if (src == cplx{0.0, 0.0}) continue;
        const std::size_t base = ((x * 2 + 0) * sp + p) * sr;
        for (std::size_t r = 0; r < sr; ++r) {
          amps[static_cast<Eigen::Index>(base + r)] = src * zero[static_cast<Eigen::Index>(r)];
        }
      }
    }
  }

  const ObservableRotation rot = build_rotation(system, beta_i, beta_next);
  rot.apply(state, 0, d, 1, false);  // psi~ = V (pi~ (x) |0>)

  const int t = ancilla_count(eps_pe, p_f);
  const std::uint64_t outcomes = std::uint64_t{1} << t;
  if (state.dim() > cap / outcomes) {
    throw CapError("walk phase estimation exceeds the amplitude cap");
  }

  auto apply_g = [&](StateVector& s) {
    apply_est_z(s, 1);
    rot.apply(s, 0, d, 1, true);
    ops.apply_reflection_with_est(s, 0, 1, 3);
    rot.apply(s, 0, d, 1, false);
  };

  // Exact-reflection comparator on the same trajectory: isolates the
  // accumulated reflection error.
  Eigen::VectorXcd chi(static_cast<Eigen::Index>(d2 * 2));
  {
    const Eigen::VectorXcd lift = walk->stationary_lift();
    StateVector psi_small({{"xy", d2}, {"est", 2}},
                          Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d2 * 2)), cap);
    for (std::size_t x = 0; x < d2; ++x) {
      psi_small.amplitudes()[static_cast<Eigen::Index>(x * 2)] = lift[static_cast<Eigen::Index>(x)];
    }
    rot.apply(psi_small, 0, d, 1, false);
    chi = psi_small.amplitudes();
  }
  auto apply_g_exact = [&](StateVector& s) {
    apply_est_z(s, 1);
    apply_subfactor_reflection(s, chi, 0, 1);
  };

  std::vector<cplx> acf(outcomes);
  acf[0] = cplx{1.0, 0.0};
  StateVector cur = state;
  StateVector cur_exact = state;
  double accumulated = 0.0;
  for (std::uint64_t dstep = 1; dstep < outcomes; ++dstep) {
    apply_g(cur);
    apply_g_exact(cur_exact);
    acf[dstep] = state.inner(cur);
    accumulated =
        std::max(accumulated, (cur.amplitudes() - cur_exact.amplitudes()).norm());
  }

  RatioDistribution rd;
  rd.t = t;
  rd.eps_pe = eps_pe;
  rd.alpha_exact = schedule.alpha(level);
  rd.distribution = phase_estimation_from_autocorrelation(acf, t);
  rd.within_band_mass = band_mass(rd.distribution, t, rd.alpha_exact, eps_pe);
  rd.prep_deviation = prepared.deviation;
  rd.reflection_accumulated = accumulated;
  rd.reflection_error_bound = ops.error_bound();
  rd.reflection_ancillas = b;
  return rd;
}

std::uint64_t power_median_runs(double delta_boost) {
  if (!(delta_boost > 0.0 && delta_boost < 1.0)) {
    throw ConfigError("delta_boost must be in (0,1)");
  }
  return static_cast<std::uint64_t>(std::ceil(8.0 * std::log(1.0 / delta_boost)));
}

double power_median(const std::function<double()>& run_once, double delta_boost) {
  const std::uint64_t k = power_median_runs(delta_boost);
  std::vector<double> vals;
  vals.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) vals.push_back(run_once());
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k / 2), vals.end());
  return vals[k / 2];
}

double compose_product(std::span<const double> estimates, double z0, double shift_factor) {
  double q = z0;
  for (double e : estimates) q *= e;
  return q * shift_factor;
}

PipelineConfig PipelineConfig::make(double epsilon, std::size_t levels, SampleMode mode) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0,1)");
  PipelineConfig cfg;
  cfg.epsilon = epsilon;
  cfg.levels = levels;
  cfg.mode = mode;
  if (levels > 0) {
    const double ell = static_cast<double>(levels);
    cfg.eps_pe = epsilon / (2.0 * ell);
    cfg.delta_boost = 1.0 / (4.0 * ell);
    cfg.eps_r = cfg.eps_pe / 32.0;
  }
  return cfg;
}

void QueryLedger::add(std::size_t level, const LevelLedger& delta) {
  if (per_level.size() <= level) per_level.resize(level + 1);
  auto& l = per_level[level];
  l.walk_ops += delta.walk_ops;
  l.reflection_ops += delta.reflection_ops;
  l.samples_prepared += delta.samples_prepared;
  l.chain_steps += delta.chain_steps;
  total.walk_ops += delta.walk_ops;
  total.reflection_ops += delta.reflection_ops;
  total.samples_prepared += delta.samples_prepared;
  total.chain_steps += delta.chain_steps;
}

PipelineResult quantum_fpras(const System& system, const Schedule& schedule, double eps,
                             SampleMode mode, RandomStream& rng, const PipelineOptions& opt) {
  for (std::size_t i = 0; i < schedule.levels(); ++i) {
    if (schedule.alpha(i) < 0.5 - 1e-12) {
      throw ConfigError("schedule ratio below 1/2 at level " + std::to_string(i));
    }
  }
  PipelineResult res;
  res.config = PipelineConfig::make(eps, schedule.levels(), mode);
  res.config.prep_depth = opt.prep_depth;
  res.config.eps_s = opt.eps_s;
  res.exact_z = unshifted_partition(system, schedule.beta_final());
  res.ledger.per_level.resize(schedule.levels());

  std::vector<double> estimates;
  for (std::size_t i = 0; i < schedule.levels(); ++i) {
    const std::uint64_t k = power_median_runs(res.config.delta_boost);
    RatioDistribution rd;
    LevelLedger cost;
    try {
      if (mode == SampleMode::exact) {
        rd = ratio_distribution_perfect(system, schedule, i, res.config.eps_pe,
                                        res.config.p_f, opt.cap);
        cost.samples_prepared = k;
        cost.reflection_ops = k * ((std::uint64_t{1} << rd.t) - 1);
      } else {
        PrepOptions popt;
        popt.eps_s = opt.eps_s;
        popt.depth = opt.prep_depth;
        popt.cap = opt.cap;
        const PrepResult prep = fixed_point_prepare(system, schedule.prefix(i),
                                                    SampleMode::walk, popt);
        rd = ratio_distribution_walk(system, schedule, i, res.config.eps_pe, res.config.p_f,
                                     res.config.eps_r, prep, opt.cap);
        cost.samples_prepared = k;
        const std::uint64_t refl_calls =
            2 * ((std::uint64_t{1} << rd.reflection_ancillas) - 1);
        cost.walk_ops = k * (prep.walk_calls + ((std::uint64_t{1} << rd.t) - 1) * refl_calls);
      }
    } catch (const CapError& e) {
      throw PipelineError("level " + std::to_string(i) + ": " + e.what(), res.ledger, true);
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError("level " + std::to_string(i) + ": " + e.what(), res.ledger, false);
    }
    res.ledger.add(i, cost);

    const double q = power_median([&] { return rd.draw(rng); }, res.config.delta_boost);
    estimates.push_back(q);

    LevelReport rep;
    rep.alpha_exact = rd.alpha_exact;
    rep.estimate = q;
    rep.within_band_mass = rd.within_band_mass;
    rep.t = rd.t;
    rep.median_runs = k;
    rep.prep_deviation = rd.prep_deviation;
    rep.reflection_accumulated = rd.reflection_accumulated;
    res.levels.push_back(rep);
  }

  const double shift = std::exp(-schedule.beta_final() * system.energy_offset());
  res.estimate = compose_product(estimates, static_cast<double>(system.size()), shift);
  return res;
}

}  // namespace qpf
