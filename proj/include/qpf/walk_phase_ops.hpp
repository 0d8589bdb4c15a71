#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "qpf/state_vector.hpp"
#include "qpf/szegedy.hpp"

namespace qpf {

// Compact algebra for the ancilla register of phase-estimation circuits on
// walk operators.
//
// A b-qubit estimation of W applied to eigenvector w_j acts on the ancillas
// as U_j = DFT^dag D(phi_j) H^{b}, and conjugating a diagonal phase by it
// yields rank-one updates along the kernel state
//   u(phi) = H^{b} D(phi)^dag DFT |0^b>,
// whose inner products are closed-form Dirichlet kernels:
//   <u(a)|u(b)> = 2^-b sum_x e^{ix(a-b)},   <0^b|u(phi)> = 2^-b sum_x e^{-ix phi}.
// Every reachable ancilla state therefore lives in span{|0^b>} U {u(phi_j)},
// which this class orthonormalizes so states carry only its coordinates; the
// 2^b-dimensional register is never materialized. Ledgers still count the
// literal circuit cost.
class PhaseKernelSpace {
 public:
  explicit PhaseKernelSpace(int b);

  int b() const { return b_; }
  // Registers a kernel phase; duplicates within 1e-13 collapse to one
  // generator. Phase 0 is the |0^b> generator itself. Must precede finalize().
  int add_phase(double phi);
  // <0^b|u(phi)> for this register width (Dirichlet kernel).
  cplx zero_overlap(double phi) const;

  void finalize();
  bool finalized() const { return finalized_; }
  std::size_t dim() const;
  // Coordinates in the orthonormal basis.
  const Eigen::VectorXcd& zero_coords() const;
  const Eigen::VectorXcd& generator_coords(int id) const;

 private:
  int b_;
  bool finalized_ = false;
  std::vector<double> phases_;          // generator i>0 has kernel phase phases_[i]
  std::vector<Eigen::VectorXcd> coords_;
};

// Per-walk application of PE-based selective phases and reflections on a
// state whose ancilla register carries PhaseKernelSpace coordinates. The
// ancilla register must be the last (contiguous) register.
class WalkPhaseOps {
 public:
  WalkPhaseOps(const WalkOperator& walk, std::shared_ptr<PhaseKernelSpace> space);

  // Call once after the shared space is finalized.
  void bind();

  // PE_b(W) -> phase omega on the all-zero outcome -> inverse PE. Equals the
  // selective phase about the walk's phase-0 subspace up to the kernel leak.
  void apply_selective_phase(StateVector& state, std::size_t xy_reg, std::size_t anc_reg,
                             cplx omega, bool adjoint) const;

  // PE_b(W) -> phase -1 unless (est = 0 and outcome = 0) -> inverse PE.
  // Approximates the reflection about (stationary lift) (x) |0>_est.
  // Self-adjoint.
  void apply_reflection_with_est(StateVector& state, std::size_t xy_reg, std::size_t est_reg,
                                 std::size_t anc_reg) const;

  // 2 * max over nonzero eigenphases of the kernel leak |<0|u(phi_j)>|: the
  // reflection error on a worst-case A+B eigenvector.
  double error_bound() const;

  std::uint64_t walk_calls_per_application() const { return 2 * ((std::uint64_t{1} << space_->b()) - 1); }

  const WalkOperator& walk() const { return *walk_; }
  const PhaseKernelSpace& space() const { return *space_; }

 private:
  std::shared_ptr<const WalkOperator> walk_holder_;  // keeps walk alive if owned
  const WalkOperator* walk_;
  std::shared_ptr<PhaseKernelSpace> space_;
  std::vector<int> gen_;                          // generator id per eigencolumn
  std::vector<Eigen::VectorXcd> kernel_coords_;   // per eigencolumn, after bind()
  bool bound_ = false;

  void require_bound() const;
  void block_update(StateVector& state, std::size_t xy_reg, std::size_t anc_reg,
                    const std::vector<cplx>& rank_one_scale, const std::vector<cplx>& id_scale,
                    std::size_t est_reg, bool est_aware) const;
};

// Ancilla width for a target reflection error: b such that the worst kernel
// leak bound 2/(2^b sin(gap/2)) drops below eps_r, floored at the resolution
// width ceil(log2(2pi/gap)) + 3.
int reflection_ancillas(double eps_r, double phase_gap);

}  // namespace qpf
