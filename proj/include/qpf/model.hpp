#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qpf {

// A finite physical system: an enumerable state space with a real energy per
// state. Energies are stored shifted so that min_sigma E'(sigma) = 0; the
// subtracted offset E_min is kept so unshifted quantities can be recovered.
// The shift leaves Boltzmann distributions unchanged and keeps the estimator
// weights e^{-dbeta*E'} inside (0, 1].
class System {
 public:
  // Exact enumeration is the whole point of this suite; keep it desk-scale.
  static constexpr std::size_t kMaxStates = std::size_t{1} << 12;

  explicit System(std::vector<double> energies, std::string name = "system");

  std::size_t size() const { return shifted_.size(); }
  double shifted_energy(std::size_t state) const { return shifted_[state]; }
  const std::vector<double>& shifted_energies() const { return shifted_; }
  double energy_offset() const { return offset_; }
  double raw_energy(std::size_t state) const { return shifted_[state] + offset_; }
  double max_shifted_energy() const { return max_shifted_; }
  const std::string& name() const { return name_; }

 private:
  std::vector<double> shifted_;
  double offset_ = 0.0;
  double max_shifted_ = 0.0;
  std::string name_;
};

struct IsingEdge {
  std::size_t u, v;
  double coupling;
};

struct IsingField {
  std::size_t site;
  double field;
};

// Ising system on n spins: E(s) = -sum_edges J_uv s_u s_v - sum_u h_u s_u,
// s_u in {-1, +1}. State index bit u carries spin u (bit set = +1), so the
// state space has size 2^n.
System make_ising_system(std::size_t spins, const std::vector<IsingEdge>& edges,
                         const std::vector<IsingField>& fields = {});

// Loads an Ising system from a text file. One record per line:
//   spins <n>
//   edge <u> <v> <J>
//   field <u> <h>
// Blank lines and lines starting with '#' are ignored. Repeated edge/field
// records for the same sites accumulate.
System load_system(const std::string& path);

// Nondecreasing inverse temperatures beta_0 = 0 <= ... <= beta_ell = beta_F,
// with the partition-ratio per step alpha_i = Z(beta_{i+1})/Z(beta_i)
// (shifted energies) kept inside [target_low, 1].
class Schedule {
 public:
  Schedule(std::vector<double> betas, std::vector<double> alphas);

  std::size_t levels() const { return betas_.size() - 1; }  // number of ratios
  double beta(std::size_t i) const { return betas_[i]; }
  double beta_final() const { return betas_.back(); }
  const std::vector<double>& betas() const { return betas_; }
  // alpha(i) = Z(beta_{i+1}) / Z(beta_i), computed from the exact oracle.
  double alpha(std::size_t i) const { return alphas_[i]; }
  const std::vector<double>& alphas() const { return alphas_; }

  // The truncated schedule holding the first `levels` ratios.
  Schedule prefix(std::size_t levels) const;

 private:
  std::vector<double> betas_;
  std::vector<double> alphas_;
};

// Z(beta) = sum_sigma e^{-beta * E'(sigma)} over shifted energies, by full
// enumeration. Unshifted Z is e^{-beta*E_min} times this. Rejects beta*range
// beyond the representable exponent.
double exact_partition(const System& system, double beta);

// e^{-beta*E_min} * exact_partition: the partition function of the raw
// energies.
double unshifted_partition(const System& system, double beta);

// Boltzmann probability vector pi(sigma) = e^{-beta E(sigma)} / Z; invariant
// under any constant energy shift.
std::vector<double> boltzmann(const System& system, double beta);

// Builds a schedule by bisecting each beta_{i+1} so that alpha_i lands in
// [target_low, target_high]; the final step may land anywhere in
// [target_low, 1]. Bisection tolerance 1e-10 on beta.
Schedule build_schedule(const System& system, double beta_final,
                        double target_low = 0.5, double target_high = 0.75);

}  // namespace qpf
