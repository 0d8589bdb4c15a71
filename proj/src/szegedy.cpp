#include "qpf/szegedy.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "qpf/errors.hpp"

namespace qpf {

namespace {

constexpr double kZeroPhaseTol = 1e-10;
constexpr double kMembershipTol = 1e-8;

double canonical_phase(cplx eigenvalue) {
  double phase = std::arg(eigenvalue);  // (-pi, pi]
  if (phase <= -std::numbers::pi + 1e-15) phase = std::numbers::pi;
  return phase;
}

// Orthonormal basis of A+B as columns, via SVD of the stacked generators.
Eigen::MatrixXcd ab_space_basis(const WalkOperator& walk) {
  const auto d = static_cast<Eigen::Index>(walk.chain_size());
  const Eigen::Index dim = d * d;
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, 2 * d);
  // A generators: |x>|0>.
  for (Eigen::Index x = 0; x < d; ++x) gen(x * d, x) = 1.0;
  // B generators: U^dag S U |x>|0>.
  const Eigen::MatrixXd& u = walk.update();
  for (Eigen::Index x = 0; x < d; ++x) {
    Eigen::VectorXd v = u.col(x * d);  // U |x>|0>
    Eigen::VectorXd sv(dim);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) sv(b * d + a) = v(a * d + b);
    }
    gen.col(d + x) = u.transpose() * sv;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gen, Eigen::ComputeThinU);
  const double cutoff = 1e-10 * svd.singularValues()(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > cutoff) ++rank;
  }
  return svd.matrixU().leftCols(rank).cast<cplx>();
}

}  // namespace

Eigen::MatrixXd quantum_update(const TransitionMatrix& chain) {
  const auto d = static_cast<Eigen::Index>(chain.size());
  if (chain.size() > kMaxWalkStates) {
    throw CapError("chain too large for walk quantization (cap " +
                   std::to_string(kMaxWalkStates) + ")");
  }
  const Eigen::MatrixXd& p = chain.matrix();
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(d * d, d * d);
  for (Eigen::Index x = 0; x < d; ++x) {
    Eigen::VectorXd row(d);
    for (Eigen::Index y = 0; y < d; ++y) {
      const double pxy = p(x, y);
      if (pxy < -1e-14) throw ConfigError("negative transition probability");
      row(y) = std::sqrt(std::max(0.0, pxy));
    }
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd diff = Eigen::VectorXd::Unit(d, 0) - row;
    const double nd = diff.norm();
    if (nd > 1e-14) {
      diff /= nd;
      v -= 2.0 * diff * diff.transpose();
    }
    u.block(x * d, x * d, d, d) = v;
  }
  return u;
}

WalkOperator::WalkOperator(TransitionMatrix chain)
    : chain_(std::move(chain)), chain_spec_(qpf::chain_spectrum(chain_)) {
  const auto d = static_cast<Eigen::Index>(chain_.size());
  const Eigen::Index dim = d * d;
  if (chain_spec_.eigenvalues.size() > 1 && chain_spec_.eigenvalues.back() < -1e-12) {
    throw ConfigError("walk quantization expects a lazy (nonnegative-spectrum) chain");
  }
  update_ = quantum_update(chain_);

  Eigen::MatrixXd ra = -Eigen::MatrixXd::Identity(dim, dim);
  for (Eigen::Index x = 0; x < d; ++x) ra(x * d, x * d) = 1.0;

  // Swap of the two registers: (a,b) -> (b,a).
  Eigen::MatrixXd swap = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) swap(b * d + a, a * d + b) = 1.0;
  }
  const Eigen::MatrixXd usu = update_.transpose() * swap * update_;
  const Eigen::MatrixXd rb = usu * ra * usu;
  w_ = (rb * ra).cast<cplx>();

  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(w_);
  if (schur.info() != Eigen::Success) throw NumericError("walk Schur decomposition failed");
  basis_ = schur.matrixU();
  phases_.resize(static_cast<std::size_t>(dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    phases_[static_cast<std::size_t>(j)] = canonical_phase(schur.matrixT()(j, j));
  }
}

Eigen::VectorXcd WalkOperator::stationary_lift() const {
  const auto d = static_cast<Eigen::Index>(chain_.size());
  Eigen::VectorXcd lift = Eigen::VectorXcd::Zero(d * d);
  const auto& pi = chain_.stationary();
  for (Eigen::Index x = 0; x < d; ++x) {
    lift(x * d) = std::sqrt(pi[static_cast<std::size_t>(x)]);
  }
  return lift;
}

WalkOperator build_walk(const TransitionMatrix& chain) { return WalkOperator(chain); }

WalkSpectrum walk_spectrum(const WalkOperator& walk) {
  const Eigen::MatrixXcd ab = ab_space_basis(walk);
  WalkSpectrum out;
  out.chain_gap = walk.chain_spectrum().gap;
  out.zero_phase_multiplicity = 0;

  // Nonzero-phase eigenvectors: membership in A+B by projection norm.
  // The phase-0 cluster is degenerate (it spans the stationary lift plus the
  // orthogonal complement of A+B), so its A+B multiplicity is read off the
  // projector instead: rank of Pi_{AB} restricted to the cluster.
  std::vector<Eigen::Index> zero_cols;
  for (std::size_t j = 0; j < walk.phases().size(); ++j) {
    const double phase = walk.phases()[j];
    const Eigen::VectorXcd vec = walk.eigenbasis().col(static_cast<Eigen::Index>(j));
    if (std::abs(phase) < kZeroPhaseTol) {
      zero_cols.push_back(static_cast<Eigen::Index>(j));
      continue;
    }
    const double proj = (ab.adjoint() * vec).norm();
    if (proj > kMembershipTol) {
      if (proj < 1.0 - 1e-6) {
        throw NumericError("walk eigenvector straddles A+B (projection " +
                           std::to_string(proj) + ")");
      }
      out.phases_ab.push_back(phase);
    }
  }
  if (!zero_cols.empty()) {
    Eigen::MatrixXcd cluster(ab.cols(), static_cast<Eigen::Index>(zero_cols.size()));
    for (std::size_t c = 0; c < zero_cols.size(); ++c) {
      cluster.col(static_cast<Eigen::Index>(c)) = ab.adjoint() * walk.eigenbasis().col(zero_cols[c]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cluster);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      const double s = svd.singularValues()(i);
      if (s > 0.5) {
        ++out.zero_phase_multiplicity;
      } else if (s > kMembershipTol) {
        throw NumericError("ambiguous phase-0 membership in A+B");
      }
    }
  }
  std::sort(out.phases_ab.begin(), out.phases_ab.end());

  out.phase_gap = std::numbers::pi;
  for (double phase : out.phases_ab) {
    out.phase_gap = std::min(out.phase_gap, std::abs(phase));
  }

  // Pair chain eigenvalues mu_j < 1 with +-2*arccos(mu_j).
  for (std::size_t j = 1; j < walk.chain_spectrum().eigenvalues.size(); ++j) {
    const double mu = walk.chain_spectrum().eigenvalues[j];
    if (mu >= 1.0 - 1e-12) continue;
    const double theta = std::acos(std::clamp(mu, -1.0, 1.0));
    WalkPairing pair;
    pair.mu = mu;
    pair.theta = theta;
    pair.phase_pos = 2.0 * theta;
    pair.phase_neg = 2.0 * theta >= std::numbers::pi - 1e-15 ? 2.0 * theta : -2.0 * theta;
    out.pairing.push_back(pair);
  }
  return out;
}

void dump_walk_csv(const WalkSpectrum& spectrum, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "# summary\n";
  out << "delta," << fmt(spectrum.chain_gap) << "\n";
  out << "phase_gap," << fmt(spectrum.phase_gap) << "\n";
  out << "two_sqrt_delta," << fmt(2.0 * std::sqrt(spectrum.chain_gap)) << "\n";
  out << "zero_phase_multiplicity," << spectrum.zero_phase_multiplicity << "\n";
  out << "# pairing\n";
  out << "mu,theta,phase_pos,phase_neg\n";
  for (const auto& p : spectrum.pairing) {
    out << fmt(p.mu) << "," << fmt(p.theta) << "," << fmt(p.phase_pos) << ","
        << fmt(p.phase_neg) << "\n";
  }
  out << "# eigenphases on A+B\n";
  out << "phase\n";
  for (double phase : spectrum.phases_ab) out << fmt(phase) << "\n";
}

}  // namespace qpf
