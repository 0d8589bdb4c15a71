#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace qpf {

using cplx = std::complex<double>;

// Default guardrail on simulated amplitude counts.
inline constexpr std::size_t kDefaultAmplitudeCap = std::size_t{1} << 28;

struct Register {
  std::string name;
  std::size_t dim;
};

// Complex amplitudes over a tensor-factored index space of named registers.
// Index convention: the first register varies slowest (row-major), the last
// register is contiguous. Immutable register layout; amplitudes owned.
class StateVector {
 public:
  StateVector(std::vector<Register> layout, Eigen::VectorXcd amplitudes,
              std::size_t cap = kDefaultAmplitudeCap);

  // |index> on the given layout.
  static StateVector basis_state(std::vector<Register> layout, std::size_t index,
                                 std::size_t cap = kDefaultAmplitudeCap);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const std::vector<Register>& layout() const { return layout_; }
  std::size_t register_count() const { return layout_.size(); }
  std::size_t register_dim(std::size_t r) const { return layout_[r].dim; }
  // Amplitude-index stride of register r.
  std::size_t stride(std::size_t r) const { return strides_[r]; }
  std::size_t register_index(const std::string& name) const;

  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Eigen::VectorXcd& amplitudes() { return amps_; }

  double norm() const { return amps_.norm(); }
  // <this|other>
  cplx inner(const StateVector& other) const;
  void normalize();

  // Appends a register initialized to |0> (amplitudes replicated at digit 0).
  void append_register(const Register& reg);

 private:
  std::vector<Register> layout_;
  std::vector<std::size_t> strides_;
  Eigen::VectorXcd amps_;
  std::size_t cap_;

  void rebuild_strides();
};

// Applies a dense matrix over the combined index of the listed registers
// (listed order = significance order, first slowest). Cost O(dim * matrix
// rows). Works for any register subset, contiguous or not.
void apply_matrix(StateVector& state, const Eigen::MatrixXcd& m,
                  const std::vector<std::size_t>& regs);

}  // namespace qpf
