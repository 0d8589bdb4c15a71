#include "qpf/state_vector.hpp"

#include "qpf/errors.hpp"

namespace qpf {

StateVector::StateVector(std::vector<Register> layout, Eigen::VectorXcd amplitudes,
                         std::size_t cap)
    : layout_(std::move(layout)), amps_(std::move(amplitudes)), cap_(cap) {
  if (layout_.empty()) throw ConfigError("state needs at least one register");
  std::size_t total = 1;
  for (const auto& r : layout_) {
    if (r.dim == 0) throw ConfigError("register dimension must be positive");
    if (total > cap_ / r.dim) throw CapError("state dimension exceeds the amplitude cap");
    total *= r.dim;
  }
  if (total != static_cast<std::size_t>(amps_.size())) {
    throw ConfigError("amplitude length does not match the register layout");
  }
  rebuild_strides();
}

StateVector StateVector::basis_state(std::vector<Register> layout, std::size_t index,
                                     std::size_t cap) {
  std::size_t total = 1;
  for (const auto& r : layout) total *= r.dim;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total));
  if (index >= total) throw ConfigError("basis index out of range");
  amps[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(std::move(layout), std::move(amps), cap);
}

void StateVector::rebuild_strides() {
  strides_.assign(layout_.size(), 1);
  for (std::size_t r = layout_.size(); r-- > 1;) {
    strides_[r - 1] = strides_[r] * layout_[r].dim;
  }
}

std::size_t StateVector::register_index(const std::string& name) const {
  for (std::size_t r = 0; r < layout_.size(); ++r) {
    if (layout_[r].name == name) return r;
  }
  throw ConfigError("no register named " + name);
}

cplx StateVector::inner(const StateVector& other) const {
  if (other.dim() != dim()) throw ConfigError("inner product dimension mismatch");
  return amps_.dot(other.amps_);
}

void StateVector::normalize() {
  const double n = norm();
  if (n == 0.0) throw NumericError("cannot normalize the zero vector");
  amps_ /= n;
}

void StateVector::append_register(const Register& reg) {
  if (reg.dim == 0) throw ConfigError("register dimension must be positive");
  if (dim() > cap_ / reg.dim) throw CapError("state dimension exceeds the amplitude cap");
  const auto old = amps_;
  amps_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim() * reg.dim));
  for (Eigen::Index i = 0; i < old.size(); ++i) {
    amps_[i * static_cast<Eigen::Index>(reg.dim)] = old[i];
  }
  layout_.push_back(reg);
  rebuild_strides();
}

void apply_matrix(StateVector& state, const Eigen::MatrixXcd& m,
                  const std::vector<std::size_t>& regs) {
  std::size_t sub = 1;
  for (auto r : regs) sub *= state.register_dim(r);
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != sub) {
    throw ConfigError("matrix shape does not match the register subset");
  }
  // Offsets of every combined sub-index, in listed significance order.
  std::vector<std::size_t> offsets(sub, 0);
  {
    std::size_t repeat = sub;
    for (auto r : regs) {
      const std::size_t dim = state.register_dim(r);
      repeat /= dim;
      std::size_t k = 0;
      for (std::size_t block = 0; block < sub / (dim * repeat); ++block) {
        for (std::size_t digit = 0; digit < dim; ++digit) {
          for (std::size_t rep = 0; rep < repeat; ++rep, ++k) {
            offsets[k] += digit * state.stride(r);
          }
        }
      }
    }
  }
  auto& amps = state.amplitudes();
  Eigen::VectorXcd in(static_cast<Eigen::Index>(sub)), out;
  // Enumerate base indices: those whose digits vanish on all listed registers.
  const std::size_t total = state.dim();
  std::vector<bool> is_target(state.register_count(), false);
  for (auto r : regs) is_target[r] = true;
  for (std::size_t idx = 0; idx < total; ++idx) {
    bool base = true;
    for (std::size_t r = 0; r < state.register_count() && base; ++r) {
      if (is_target[r] && (idx / state.stride(r)) % state.register_dim(r) != 0) base = false;
    }
    if (!base) continue;
    for (std::size_t k = 0; k < sub; ++k) in[static_cast<Eigen::Index>(k)] = amps[static_cast<Eigen::Index>(idx + offsets[k])];
    out = m * in;
    for (std::size_t k = 0; k < sub; ++k) amps[static_cast<Eigen::Index>(idx + offsets[k])] = out[static_cast<Eigen::Index>(k)];
  }
}

}  // namespace qpf
