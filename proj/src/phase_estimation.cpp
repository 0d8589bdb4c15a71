#include "qpf/phase_estimation.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "qpf/errors.hpp"

namespace qpf {

namespace {

// In-place radix-2 FFT with kernel e^{-2pi i jk/n} (forward sign).
void fft_forward(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const cplx wl = std::polar(1.0, ang);
    for (std::size_t i = 0; i < n; i += len) {
      cplx w{1.0, 0.0};
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace

double PhaseEstimationResult::phase_of(std::size_t outcome) const {
  const auto n = static_cast<std::size_t>(probabilities.size());
  if (outcome >= n) throw ConfigError("outcome out of range");
  return 2.0 * std::numbers::pi * static_cast<double>(outcome) / static_cast<double>(n);
}

std::size_t PhaseEstimationResult::sample(RandomStream& rng) const {
  double u = rng.u01();
  const auto n = static_cast<std::size_t>(probabilities.size());
  for (std::size_t k = 0; k + 1 < n; ++k) {
    u -= probabilities[static_cast<Eigen::Index>(k)];
    if (u < 0.0) return k;
  }
  return n - 1;
}

PhaseEstimationResult phase_estimation(const Operator& u, const StateVector& psi, int t,
                                       std::size_t cap) {
  if (t < 1 || t > 30) throw ConfigError("ancilla count must be in [1, 30]");
  if (u.dim() != psi.dim()) throw ConfigError("operator/state dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw ConfigError("input state must be normalized");
  const std::size_t outcomes = std::size_t{1} << t;
  if (psi.dim() > cap / outcomes) {
    throw CapError("phase estimation joint dimension exceeds the amplitude cap");
  }

  std::vector<cplx> acf(outcomes);
  StateVector cur = psi;
  acf[0] = cplx{1.0, 0.0};
  for (std::size_t d = 1; d < outcomes; ++d) {
    u.apply(cur, false);
    // The autocorrelation identity needs a unitary; norm drift exposes
    // non-unitary inputs without materializing the matrix.
    if (std::abs(cur.norm() - 1.0) > 1e-9) {
      throw NumericError("phase estimation needs a unitary operator (norm drift)");
    }
    acf[d] = psi.inner(cur);
  }
  return phase_estimation_from_autocorrelation(acf, t);
}

PhaseEstimationResult phase_estimation_from_autocorrelation(std::span<const cplx> acf, int t) {
  if (t < 1 || t > 30) throw ConfigError("ancilla count must be in [1, 30]");
  const std::size_t outcomes = std::size_t{1} << t;
  if (acf.size() != outcomes) throw ConfigError("autocorrelation length must be 2^t");
  // Fold the two-sided triangular window into one period.
  std::vector<cplx> g(outcomes);
  g[0] = static_cast<double>(outcomes) * acf[0];
  for (std::size_t r = 1; r < outcomes; ++r) {
    g[r] = static_cast<double>(outcomes - r) * acf[r] +
           static_cast<double>(r) * std::conj(acf[outcomes - r]);
  }
  fft_forward(g);

  PhaseEstimationResult res;
  res.t = t;
  res.probabilities = Eigen::VectorXd(static_cast<Eigen::Index>(outcomes));
  const double scale = 1.0 / (static_cast<double>(outcomes) * static_cast<double>(outcomes));
  double total = 0.0;
  for (std::size_t k = 0; k < outcomes; ++k) {
    double p = g[k].real() * scale;
    if (p < 0.0) {
      if (p < -1e-9) throw NumericError("negative probability in phase estimation");
      p = 0.0;
    }
    res.probabilities[static_cast<Eigen::Index>(k)] = p;
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw NumericError("phase estimation probabilities do not sum to 1");
  }
  return res;
}

int ancilla_count(double eps_pe, double p_f) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (!(eps_pe > 0.0 && eps_pe < two_pi)) throw ConfigError("eps_pe must be in (0, 2pi)");
  if (!(p_f > 0.0 && p_f < 0.5)) throw ConfigError("p_f must be in (0, 1/2)");
  const int accuracy_bits = static_cast<int>(std::ceil(std::log2(two_pi / eps_pe)));
  const int confidence_bits = static_cast<int>(std::ceil(std::log2(2.0 + 1.0 / (2.0 * p_f))));
  return accuracy_bits + confidence_bits;
}

}  // namespace qpf
