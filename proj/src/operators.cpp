#include "qpf/operators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "qpf/errors.hpp"

namespace qpf {

Eigen::MatrixXcd Operator::to_dense(const std::vector<Register>& layout) const {
  const std::size_t n = dim();
  Eigen::MatrixXcd m(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    StateVector basis = StateVector::basis_state(layout, c);
    if (basis.dim() != n) throw ConfigError("layout does not match operator dimension");
    apply(basis);
    m.col(static_cast<Eigen::Index>(c)) = basis.amplitudes();
  }
  return m;
}

bool Operator::is_unitary(const std::vector<Register>& layout, double tol) const {
  const Eigen::MatrixXcd m = to_dense(layout);
  const Eigen::MatrixXcd gram = m.adjoint() * m;
  return (gram - Eigen::MatrixXcd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

MatrixOperator::MatrixOperator(Eigen::MatrixXcd m, std::vector<std::size_t> regs,
                               std::size_t total_dim)
    : m_(std::move(m)), regs_(std::move(regs)), total_dim_(total_dim) {
  if (m_.rows() != m_.cols()) throw ConfigError("operator matrix must be square");
}

void MatrixOperator::apply(StateVector& state, bool adjoint) const {
  if (state.dim() != total_dim_) throw ConfigError("operator/state dimension mismatch");
  if (adjoint) {
    apply_matrix(state, m_.adjoint(), regs_);
  } else {
    apply_matrix(state, m_, regs_);
  }
}

RankOneOperator::RankOneOperator(cplx alpha, cplx beta, Eigen::VectorXcd psi)
    : alpha_(alpha), beta_(beta), psi_(std::move(psi)) {}

void RankOneOperator::apply(StateVector& state, bool adjoint) const {
  if (state.dim() != dim()) throw ConfigError("operator/state dimension mismatch");
  const cplx a = adjoint ? std::conj(alpha_) : alpha_;
  const cplx b = adjoint ? std::conj(beta_) : beta_;
  const cplx overlap = psi_.dot(state.amplitudes());
  state.amplitudes() = a * state.amplitudes() + b * overlap * psi_;
}

RegisterDiagonalOperator::RegisterDiagonalOperator(Eigen::VectorXcd diag, std::size_t reg,
                                                   std::size_t total_dim)
    : diag_(std::move(diag)), reg_(reg), total_dim_(total_dim) {}

void RegisterDiagonalOperator::apply(StateVector& state, bool adjoint) const {
  if (state.dim() != total_dim_) throw ConfigError("operator/state dimension mismatch");
  if (static_cast<std::size_t>(diag_.size()) != state.register_dim(reg_)) {
    throw ConfigError("diagonal length does not match the register");
  }
  auto& amps = state.amplitudes();
  const std::size_t stride = state.stride(reg_);
  const std::size_t rdim = state.register_dim(reg_);
  for (std::size_t i = 0; i < state.dim(); ++i) {
    const std::size_t digit = (i / stride) % rdim;
    const cplx f = diag_[static_cast<Eigen::Index>(digit)];
    amps[static_cast<Eigen::Index>(i)] *= adjoint ? std::conj(f) : f;
  }
}

ProductOperator::ProductOperator(std::vector<OperatorPtr> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) throw ConfigError("product needs at least one factor");
}

std::size_t ProductOperator::dim() const { return factors_.front()->dim(); }

void ProductOperator::apply(StateVector& state, bool adjoint) const {
  if (!adjoint) {
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) (*it)->apply(state, false);
  } else {
    for (const auto& f : factors_) f->apply(state, true);
  }
}

OperatorPtr reflect_about(const StateVector& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw ConfigError("reflection axis must be normalized");
  return std::make_shared<RankOneOperator>(cplx{-1.0, 0.0}, cplx{2.0, 0.0}, psi.amplitudes());
}

OperatorPtr selective_phase(const StateVector& psi, cplx omega) {
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw ConfigError("phase axis must be normalized");
  return std::make_shared<RankOneOperator>(cplx{1.0, 0.0}, omega - 1.0, psi.amplitudes());
}

std::vector<Eigenphase> eigenphases(const Eigen::MatrixXcd& u, std::size_t cap) {
  if (static_cast<std::size_t>(u.rows()) > cap) {
    throw CapError("eigendecomposition dimension exceeds the cap");
  }
  const Eigen::MatrixXcd gram = u.adjoint() * u;
  if ((gram - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > 1e-8) {
    throw NumericError("eigenphases needs a unitary input");
  }
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  if (schur.info() != Eigen::Success) throw NumericError("Schur decomposition failed");
  std::vector<Eigenphase> out;
  out.reserve(static_cast<std::size_t>(u.rows()));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index j = 0; j < u.rows(); ++j) {
    double phase = std::arg(schur.matrixT()(j, j));
    if (phase < 0.0) phase += two_pi;
    if (phase >= two_pi) phase -= two_pi;
    out.push_back({phase, schur.matrixU().col(j)});
  }
  return out;
}

Eigen::MatrixXcd dft_matrix(std::size_t n) {
  Eigen::MatrixXcd f(n, n);
  const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      f(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          s * std::polar(1.0, w * static_cast<double>(j) * static_cast<double>(k));
    }
  }
  return f;
}

}  // namespace qpf
