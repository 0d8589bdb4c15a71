#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "qpf/state_vector.hpp"

namespace qpf {

// A linear map on state vectors of a fixed dimension. Dense matrices for
// small spaces, composed products and structured forms (rank-one updates,
// diagonal phases) where materializing the matrix would be wasteful.
class Operator {
 public:
  virtual ~Operator() = default;
  virtual std::size_t dim() const = 0;
  virtual void apply(StateVector& state, bool adjoint = false) const = 0;

  // Materializes the matrix by applying to basis states. Small dims only.
  Eigen::MatrixXcd to_dense(const std::vector<Register>& layout) const;
  // max-norm check of U U^dag = I on the given layout.
  bool is_unitary(const std::vector<Register>& layout, double tol = 1e-10) const;
};

using OperatorPtr = std::shared_ptr<const Operator>;

// Dense matrix over a register subset.
class MatrixOperator final : public Operator {
 public:
  MatrixOperator(Eigen::MatrixXcd m, std::vector<std::size_t> regs, std::size_t total_dim);
  std::size_t dim() const override { return total_dim_; }
  void apply(StateVector& state, bool adjoint) const override;
  const Eigen::MatrixXcd& matrix() const { return m_; }

 private:
  Eigen::MatrixXcd m_;
  std::vector<std::size_t> regs_;
  std::size_t total_dim_;
};

// alpha*I + beta*|psi><psi| over the full space; covers reflections
// (alpha=-1, beta=2) and selective phases (alpha=1, beta=omega-1).
class RankOneOperator final : public Operator {
 public:
  RankOneOperator(cplx alpha, cplx beta, Eigen::VectorXcd psi);
  std::size_t dim() const override { return static_cast<std::size_t>(psi_.size()); }
  void apply(StateVector& state, bool adjoint) const override;

 private:
  cplx alpha_, beta_;
  Eigen::VectorXcd psi_;
};

// Diagonal operator given by a per-digit phase on one register.
class RegisterDiagonalOperator final : public Operator {
 public:
  RegisterDiagonalOperator(Eigen::VectorXcd diag, std::size_t reg, std::size_t total_dim);
  std::size_t dim() const override { return total_dim_; }
  void apply(StateVector& state, bool adjoint) const override;

 private:
  Eigen::VectorXcd diag_;
  std::size_t reg_;
  std::size_t total_dim_;
};

// Ordered product; factors.front() is applied last (operator convention).
class ProductOperator final : public Operator {
 public:
  explicit ProductOperator(std::vector<OperatorPtr> factors);
  std::size_t dim() const override;
  void apply(StateVector& state, bool adjoint) const override;

 private:
  std::vector<OperatorPtr> factors_;
};

// Type-erased operator from apply callbacks; used where the application has
// bespoke structure (walk-space reflections on compact ancilla bases).
class CallbackOperator final : public Operator {
 public:
  using Fn = std::function<void(StateVector&, bool adjoint)>;
  CallbackOperator(std::size_t dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}
  std::size_t dim() const override { return dim_; }
  void apply(StateVector& state, bool adjoint) const override { fn_(state, adjoint); }

 private:
  std::size_t dim_;
  Fn fn_;
};

// 2|psi><psi| - I.
OperatorPtr reflect_about(const StateVector& psi);

// omega|psi><psi| + (I - |psi><psi|). For omega = -1 this equals minus the
// reflection (global sign only).
OperatorPtr selective_phase(const StateVector& psi, cplx omega);

// Full eigendecomposition of a unitary via complex Schur (orthonormal
// eigenbasis even with degenerate eigenvalues). Phases canonical in [0, 2pi).
struct Eigenphase {
  double phase;
  Eigen::VectorXcd vector;
};
std::vector<Eigenphase> eigenphases(const Eigen::MatrixXcd& u,
                                    std::size_t cap = kDefaultAmplitudeCap);

// DFT matrix, F[j][k] = exp(2*pi*i*j*k/n)/sqrt(n).
Eigen::MatrixXcd dft_matrix(std::size_t n);

}  // namespace qpf
