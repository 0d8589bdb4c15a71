#include "qpf/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "qpf/errors.hpp"

namespace qpf {

namespace {

// exp(-x) for x up to ~709 is representable; stay shy of that.
constexpr double kMaxExponent = 700.0;

}  // namespace

System::System(std::vector<double> energies, std::string name)
    : shifted_(std::move(energies)), name_(std::move(name)) {
  if (shifted_.empty()) throw ConfigError("system needs at least one state");
  if (shifted_.size() > kMaxStates) {
    throw CapError("state space size " + std::to_string(shifted_.size()) +
                   " exceeds the exact-enumeration cap " + std::to_string(kMaxStates));
  }
  double lo = shifted_[0], hi = shifted_[0];
  for (double e : shifted_) {
    if (!std::isfinite(e)) throw ConfigError("energies must be finite");
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  offset_ = lo;
  for (double& e : shifted_) e -= lo;
  max_shifted_ = hi - lo;
}

System make_ising_system(std::size_t spins, const std::vector<IsingEdge>& edges,
                         const std::vector<IsingField>& fields) {
  if (spins == 0 || spins > 12) {
    throw ConfigError("ising spin count must be in [1, 12]");
  }
  for (const auto& e : edges) {
    if (e.u >= spins || e.v >= spins || e.u == e.v) {
      throw ConfigError("ising edge references invalid sites");
    }
  }
  for (const auto& f : fields) {
    if (f.site >= spins) throw ConfigError("ising field references invalid site");
  }
  const std::size_t dim = std::size_t{1} << spins;
  std::vector<double> energies(dim, 0.0);
  for (std::size_t s = 0; s < dim; ++s) {
    auto spin = [s](std::size_t u) { return (s >> u) & 1 ? 1.0 : -1.0; };
    double e = 0.0;
    for (const auto& edge : edges) e -= edge.coupling * spin(edge.u) * spin(edge.v);
    for (const auto& f : fields) e -= f.field * spin(f.site);
    energies[s] = e;
  }
  return System(std::move(energies), "ising" + std::to_string(spins));
}

System load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file: " + path);
  std::size_t spins = 0;
  bool have_spins = false;
  std::vector<IsingEdge> edges;
  std::vector<IsingField> fields;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    auto bad = [&](const char* why) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + why);
    };
    if (kind == "spins") {
      if (!(ls >> spins)) bad("expected: spins <n>");
      have_spins = true;
    } else if (kind == "edge") {
      IsingEdge e{};
      if (!(ls >> e.u >> e.v >> e.coupling)) bad("expected: edge <u> <v> <J>");
      edges.push_back(e);
    } else if (kind == "field") {
      IsingField f{};
      if (!(ls >> f.site >> f.field)) bad("expected: field <u> <h>");
      fields.push_back(f);
    } else {
      bad("unknown record kind");
    }
  }
  if (!have_spins) throw ConfigError(path + ": missing 'spins' record");
  return make_ising_system(spins, edges, fields);
}

double exact_partition(const System& system, double beta) {
  if (beta < 0.0) throw ConfigError("beta must be nonnegative");
  if (beta * system.max_shifted_energy() > kMaxExponent) {
    throw ConfigError("beta * energy range exceeds the representable exponent");
  }
  double z = 0.0;
  for (double e : system.shifted_energies()) z += std::exp(-beta * e);
  return z;
}

double unshifted_partition(const System& system, double beta) {
  const double shift_exp = -beta * system.energy_offset();
  if (std::abs(shift_exp) > kMaxExponent) {
    throw ConfigError("unshift factor exceeds the representable exponent");
  }
  return std::exp(shift_exp) * exact_partition(system, beta);
}

std::vector<double> boltzmann(const System& system, double beta) {
  const double z = exact_partition(system, beta);
  std::vector<double> pi(system.size());
  for (std::size_t s = 0; s < system.size(); ++s) {
    pi[s] = std::exp(-beta * system.shifted_energy(s)) / z;
  }
  return pi;
}

Schedule::Schedule(std::vector<double> betas, std::vector<double> alphas)
    : betas_(std::move(betas)), alphas_(std::move(alphas)) {
  if (betas_.empty()) throw ConfigError("schedule needs at least one beta");
  if (betas_.front() != 0.0) throw ConfigError("schedule must start at beta = 0");
  if (alphas_.size() + 1 != betas_.size()) {
    throw ConfigError("schedule alpha/beta length mismatch");
  }
  for (std::size_t i = 0; i + 1 < betas_.size(); ++i) {
    if (betas_[i + 1] < betas_[i]) throw ConfigError("schedule betas must be nondecreasing");
  }
}

Schedule Schedule::prefix(std::size_t levels) const {
  if (levels > this->levels()) throw ConfigError("prefix longer than the schedule");
  return Schedule(std::vector<double>(betas_.begin(), betas_.begin() + levels + 1),
                  std::vector<double>(alphas_.begin(), alphas_.begin() + levels));
}

Schedule build_schedule(const System& system, double beta_final, double target_low,
                        double target_high) {
  if (beta_final < 0.0) throw ConfigError("beta_final must be nonnegative");
  if (!(0.0 < target_low && target_low <= target_high && target_high < 1.0)) {
    throw ConfigError("schedule targets must satisfy 0 < low <= high < 1");
  }
  std::vector<double> betas{0.0};
  std::vector<double> alphas;
  if (beta_final == 0.0) return Schedule(std::move(betas), std::move(alphas));

  constexpr double kBetaTol = 1e-10;
  constexpr int kMaxBisect = 200;
  while (true) {
    const double cur = betas.back();
    const double z_cur = exact_partition(system, cur);
    const double alpha_rest = exact_partition(system, beta_final) / z_cur;
    if (alpha_rest >= target_low) {
      betas.push_back(beta_final);
      alphas.push_back(alpha_rest);
      break;
    }
    // Z is continuous and strictly decreasing past the ground-state plateau,
    // so there is a beta with alpha in the target band; bisect to its middle.
    const double mid_target = 0.5 * (target_low + target_high);
    double lo = cur, hi = beta_final;
    double next = 0.5 * (lo + hi);
    int iter = 0;
    for (;; ++iter) {
      if (iter >= kMaxBisect) throw NumericError("schedule bisection did not converge");
      next = 0.5 * (lo + hi);
      const double a = exact_partition(system, next) / z_cur;
      if (a > mid_target) {
        lo = next;
      } else {
        hi = next;
      }
      if (hi - lo < kBetaTol) break;
    }
    const double alpha = exact_partition(system, next) / z_cur;
    if (alpha < target_low || alpha > target_high) {
      throw NumericError("schedule bisection landed outside the target band");
    }
    betas.push_back(next);
    alphas.push_back(alpha);
    if (betas.size() > 10000) throw NumericError("schedule grew unreasonably long");
  }
  return Schedule(std::move(betas), std::move(alphas));
}

}  // namespace qpf
