#include "qpf/walk_phase_ops.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpf/errors.hpp"

namespace qpf {

namespace {

constexpr double kPhaseDedupTol = 1e-13;
constexpr double kZeroPhaseTol = 1e-10;

double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

// (1/N) sum_{x=0}^{N-1} e^{i x theta}, evaluated stably for N = 2^b.
cplx dirichlet_mean(double theta, std::uint64_t n) {
  const double w = wrap_phase(theta);
  if (std::abs(w) < 1e-15) return cplx{1.0, 0.0};
  const long double half = static_cast<long double>(w) / 2.0L;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double num_arg = std::remainder(static_cast<long double>(n) * half, two_pi);
  const long double pre_arg = std::remainder(static_cast<long double>(n - 1) * half, two_pi);
  const long double mag = std::sin(num_arg) / (static_cast<long double>(n) * std::sin(half));
  return std::polar(static_cast<double>(mag), static_cast<double>(pre_arg));
}

}  // namespace

PhaseKernelSpace::PhaseKernelSpace(int b) : b_(b) {
  if (b < 1 || b > 62) throw ConfigError("ancilla width must be in [1, 62]");
  phases_.push_back(0.0);  // generator 0: |0^b> (= u(0))
}

cplx PhaseKernelSpace::zero_overlap(double phi) const {
  return dirichlet_mean(-phi, std::uint64_t{1} << b_);
}

int PhaseKernelSpace::add_phase(double phi) {
  if (finalized_) throw ConfigError("kernel space already finalized");
  const double w = wrap_phase(phi);
  for (std::size_t i = 0; i < phases_.size(); ++i) {
    if (std::abs(wrap_phase(w - phases_[i])) < kPhaseDedupTol) return static_cast<int>(i);
  }
  phases_.push_back(w);
  return static_cast<int>(phases_.size() - 1);
}

void PhaseKernelSpace::finalize() {
  if (finalized_) return;
  const std::size_t g = phases_.size();
  const std::uint64_t n = std::uint64_t{1} << b_;
  Eigen::MatrixXcd gram(g, g);
  // Generator 0 is |0^b>; generators i>0 are u(phases_[i]). Since u(0)=|0^b>,
  // one Dirichlet formula covers all entries.
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          dirichlet_mean(phases_[i] - phases_[j], n);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  if (es.info() != Eigen::Success) throw NumericError("kernel Gram eigendecomposition failed");
  const double lmax = es.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > 1e-24 * lmax) kept.push_back(i);
  }
  const auto rank = static_cast<Eigen::Index>(kept.size());
  // coords(g_a) = diag(sqrt(lambda)) V^dag column a, restricted to kept rows.
  Eigen::MatrixXcd coords(rank, static_cast<Eigen::Index>(g));
  for (Eigen::Index r = 0; r < rank; ++r) {
    const Eigen::Index src = kept[static_cast<std::size_t>(r)];
    coords.row(r) = std::sqrt(es.eigenvalues()(src)) * es.eigenvectors().col(src).adjoint();
  }
  if ((coords.adjoint() * coords - gram).cwiseAbs().maxCoeff() > 1e-10) {
    throw NumericError("kernel basis is numerically degenerate");
  }
  coords_.resize(g);
  for (std::size_t a = 0; a < g; ++a) {
    coords_[a] = coords.col(static_cast<Eigen::Index>(a));
  }
  finalized_ = true;
}

std::size_t PhaseKernelSpace::dim() const {
  if (!finalized_) throw ConfigError("kernel space not finalized");
  return static_cast<std::size_t>(coords_[0].size());
}

const Eigen::VectorXcd& PhaseKernelSpace::zero_coords() const {
  if (!finalized_) throw ConfigError("kernel space not finalized");
  return coords_[0];
}

const Eigen::VectorXcd& PhaseKernelSpace::generator_coords(int id) const {
  if (!finalized_) throw ConfigError("kernel space not finalized");
  return coords_[static_cast<std::size_t>(id)];
}

WalkPhaseOps::WalkPhaseOps(const WalkOperator& walk, std::shared_ptr<PhaseKernelSpace> space)
    : walk_(&walk), space_(std::move(space)) {
  gen_.reserve(walk.phases().size());
  for (double phi : walk.phases()) {
    gen_.push_back(space_->add_phase(std::abs(phi) < kZeroPhaseTol ? 0.0 : phi));
  }
}

void WalkPhaseOps::bind() {
  if (!space_->finalized()) throw ConfigError("finalize the kernel space before bind()");
  kernel_coords_.clear();
  kernel_coords_.reserve(gen_.size());
  for (int id : gen_) kernel_coords_.push_back(space_->generator_coords(id));
  bound_ = true;
}

void WalkPhaseOps::require_bound() const {
  if (!bound_) throw ConfigError("walk phase ops not bound to a finalized space");
}

// Shared core: transform the doubled register into the walk eigenbasis, then
// on every (eigencolumn j, ancilla slice) apply
//   v <- id_scale[j] * v + rank_one_scale[j] * u_j <u_j|v>,
// then transform back. est_aware selects per-est scales (the reflection
// flips est=1 slices wholesale).
void WalkPhaseOps::block_update(StateVector& state, std::size_t xy_reg, std::size_t anc_reg,
                                const std::vector<cplx>& rank_one_scale,
                                const std::vector<cplx>& id_scale, std::size_t est_reg,
                                bool est_aware) const {
  const std::size_t xy_dim = state.register_dim(xy_reg);
  if (xy_dim != walk_->dim()) throw ConfigError("doubled register does not match the walk");
  const std::size_t anc_dim = state.register_dim(anc_reg);
  if (anc_dim != space_->dim()) throw ConfigError("ancilla register does not match the space");
  if (state.stride(anc_reg) != 1) throw ConfigError("ancilla register must be last");

  apply_matrix(state, walk_->eigenbasis().adjoint(), {xy_reg});

  auto& amps = state.amplitudes();
  const std::size_t xy_stride = state.stride(xy_reg);
  const std::size_t outer = state.dim() / (xy_stride * xy_dim);
  const std::size_t est_stride = est_aware ? state.stride(est_reg) : 0;
  const std::size_t est_dimv = est_aware ? state.register_dim(est_reg) : 1;

  for (std::size_t pre = 0; pre < outer; ++pre) {
    for (std::size_t j = 0; j < xy_dim; ++j) {
      const Eigen::VectorXcd& u = kernel_coords_[j];
      const std::size_t block_base = pre * xy_stride * xy_dim + j * xy_stride;
      for (std::size_t mid = 0; mid < xy_stride / anc_dim; ++mid) {
        const std::size_t base = block_base + mid * anc_dim;
        if (est_aware) {
          const std::size_t est_digit = (base / est_stride) % est_dimv;
          if (est_digit != 0) {
            for (std::size_t a = 0; a < anc_dim; ++a) {
              amps[static_cast<Eigen::Index>(base + a)] = -amps[static_cast<Eigen::Index>(base + a)];
            }
            continue;
          }
        }
        cplx overlap{0.0, 0.0};
        for (std::size_t a = 0; a < anc_dim; ++a) {
          overlap += std::conj(u[static_cast<Eigen::Index>(a)]) *
                     amps[static_cast<Eigen::Index>(base + a)];
        }
        const cplx ids = id_scale[j];
        const cplx ros = rank_one_scale[j] * overlap;
        for (std::size_t a = 0; a < anc_dim; ++a) {
          auto& amp = amps[static_cast<Eigen::Index>(base + a)];
          amp = ids * amp + ros * u[static_cast<Eigen::Index>(a)];
        }
      }
    }
  }

  apply_matrix(state, walk_->eigenbasis(), {xy_reg});
}

void WalkPhaseOps::apply_selective_phase(StateVector& state, std::size_t xy_reg,
                                         std::size_t anc_reg, cplx omega, bool adjoint) const {
  require_bound();
  const cplx w = adjoint ? std::conj(omega) : omega;
  const std::size_t n = gen_.size();
  std::vector<cplx> rank_one(n, w - 1.0);
  std::vector<cplx> ident(n, cplx{1.0, 0.0});
  block_update(state, xy_reg, anc_reg, rank_one, ident, 0, false);
}

void WalkPhaseOps::apply_reflection_with_est(StateVector& state, std::size_t xy_reg,
                                             std::size_t est_reg, std::size_t anc_reg) const {
  require_bound();
  const std::size_t n = gen_.size();
  // est=0 slices: 2 u_j u_j^dag - I ; est=1 slices: -I (handled in the core).
  std::vector<cplx> rank_one(n, cplx{2.0, 0.0});
  std::vector<cplx> ident(n, cplx{-1.0, 0.0});
  block_update(state, xy_reg, anc_reg, rank_one, ident, est_reg, true);
}

double WalkPhaseOps::error_bound() const {
  double worst = 0.0;
  for (std::size_t j = 0; j < walk_->phases().size(); ++j) {
    const double phi = walk_->phases()[j];
    if (std::abs(phi) < kZeroPhaseTol) continue;
    worst = std::max(worst, 2.0 * std::abs(space_->zero_overlap(phi)));
  }
  return worst;
}

int reflection_ancillas(double eps_r, double phase_gap) {
  if (!(eps_r > 0.0 && eps_r < 1.0)) throw ConfigError("eps_r must be in (0,1)");
  if (!(phase_gap > 0.0 && phase_gap <= std::numbers::pi)) {
    throw ConfigError("phase gap must be in (0, pi]");
  }
  const int resolution =
      static_cast<int>(std::ceil(std::log2(2.0 * std::numbers::pi / phase_gap))) + 3;
  const double need = 2.0 / (eps_r * std::sin(phase_gap / 2.0));
  const int accuracy = static_cast<int>(std::ceil(std::log2(need)));
  const int b = std::max(resolution, accuracy);
  // Beyond this the per-application walk-call count 2(2^b - 1) stops being a
  // meaningful desk-scale ledger entry (and would overflow once multiplied
  // by the median and phase-estimation counts).
  if (b > 40) {
    throw CapError("reflection budget needs " + std::to_string(b) +
                   " ancillas; the chain gap is too small for desk scale");
  }
  return b;
}

}  // namespace qpf
