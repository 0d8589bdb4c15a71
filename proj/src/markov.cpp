#include "qpf/markov.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "qpf/errors.hpp"

namespace qpf {

TransitionMatrix::TransitionMatrix(System system, double beta, Eigen::MatrixXd p)
    : system_(std::move(system)), beta_(beta), p_(std::move(p)) {
  if (p_.rows() != p_.cols() || static_cast<std::size_t>(p_.rows()) != system_.size()) {
    throw ConfigError("transition matrix shape does not match the system");
  }
  for (Eigen::Index r = 0; r < p_.rows(); ++r) {
    if (std::abs(p_.row(r).sum() - 1.0) > 1e-12) {
      throw NumericError("transition matrix rows must sum to 1");
    }
  }
  pi_ = boltzmann(system_, beta_);
}

TransitionMatrix metropolis_chain(const System& system, double beta) {
  if (beta < 0.0) throw ConfigError("beta must be nonnegative");
  const std::size_t dim = system.size();
  if ((dim & (dim - 1)) != 0) {
    throw ConfigError("bit-flip Metropolis needs a power-of-two state space");
  }
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < dim) ++bits;

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  if (dim == 1) {
    p(0, 0) = 1.0;
  } else {
    for (std::size_t x = 0; x < dim; ++x) {
      double stay = 1.0;
      for (std::size_t b = 0; b < bits; ++b) {
        const std::size_t y = x ^ (std::size_t{1} << b);
        const double de = system.shifted_energy(y) - system.shifted_energy(x);
        const double accept = std::min(1.0, std::exp(-beta * de));
        const double q = accept / static_cast<double>(bits);
        p(x, y) = q;
        stay -= q;
      }
      p(x, x) = stay;
    }
  }
  // Lazify: keeps the spectrum nonnegative, which the walk quantization
  // relies on.
  p = 0.5 * (Eigen::MatrixXd::Identity(dim, dim) + p);
  return TransitionMatrix(system, beta, std::move(p));
}

ChainSpectrum chain_spectrum(const TransitionMatrix& p) {
  const auto& pi = p.stationary();
  const auto dim = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd sym(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    for (Eigen::Index y = 0; y < dim; ++y) {
      sym(x, y) = std::sqrt(pi[x] / pi[y]) * p.matrix()(x, y);
    }
  }
  const double asym = (sym - sym.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8) {
    throw NumericError("chain is not reversible (symmetrized asymmetry " +
                       std::to_string(asym) + ")");
  }
  sym = 0.5 * (sym + sym.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw NumericError("chain eigendecomposition failed");
  std::vector<double> vals(es.eigenvalues().data(), es.eigenvalues().data() + dim);
  std::sort(vals.begin(), vals.end(), std::greater<>());
  ChainSpectrum out;
  out.eigenvalues = std::move(vals);
  out.gap = dim > 1 ? 1.0 - out.eigenvalues[1] : 1.0;
  return out;
}

std::size_t sample_chain(const TransitionMatrix& p, std::size_t start,
                         std::uint64_t steps, RandomStream& rng) {
  if (start >= p.size()) throw ConfigError("start state out of range");
  std::size_t x = start;
  const auto& m = p.matrix();
  for (std::uint64_t s = 0; s < steps; ++s) {
    double u = rng.u01();
    std::size_t y = 0;
    const auto last = static_cast<Eigen::Index>(p.size()) - 1;
    for (Eigen::Index j = 0; j <= last; ++j) {
      u -= m(static_cast<Eigen::Index>(x), j);
      if (u < 0.0 || j == last) {
        y = static_cast<std::size_t>(j);
        break;
      }
    }
    x = y;
  }
  return x;
}

std::uint64_t mixing_steps(const ChainSpectrum& spectrum, double d, double pi_min) {
  // Pipeline use keeps d in (0,1); larger budgets are allowed and return 0
  // once the bound goes vacuous (d * pi_min >= 1).
  if (!(d > 0.0)) throw ConfigError("variation budget d must be positive");
  if (!(pi_min > 0.0 && pi_min < 1.0)) throw ConfigError("pi_min must be in (0,1)");
  if (spectrum.gap <= 0.0) throw ConfigError("mixing bound needs a positive spectral gap");
  const double lg = std::log(1.0 / (d * pi_min));
  if (lg <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ceil(lg / spectrum.gap));
}

void dump_chain_csv(const TransitionMatrix& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  char buf[64];
  const auto dim = static_cast<Eigen::Index>(p.size());
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", p.matrix()(r, c));
      out << buf << (c + 1 == dim ? "\n" : ",");
    }
  }
  const ChainSpectrum spec = chain_spectrum(p);
  out << "# spectrum\n";
  for (double mu : spec.eigenvalues) {
    std::snprintf(buf, sizeof buf, "%.17g", mu);
    out << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "%.17g", spec.gap);
  out << "# gap\n" << buf << "\n";
}

}  // namespace qpf
