#pragma once

// Dense 2^L state-vector engine. Ground truth for the other engines at small L.
//
// Basis convention: basis index bit (L - i) holds site i, so site 1 is the most
// significant bit; spin up maps to bit 0 and spin down to bit 1.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "kinkasym/linalg.hpp"
#include "kinkasym/model.hpp"

namespace kinkasym::exact {

inline constexpr int kDefaultDenseLimit = 14;

namespace detail {
inline std::uint64_t site_mask(int L, int site) { return std::uint64_t{1} << (L - site); }
inline int spin(std::uint64_t index, int L, int site) { return (index & site_mask(L, site)) ? -1 : 1; }
}  // namespace detail

struct DenseState {
  VectorXcd amplitudes;
  int L = 0;

  static DenseState basis(const SpinPattern& p) {
    DenseState s;
    s.L = p.size();
    s.amplitudes = VectorXcd::Zero(Index{1} << s.L);
    s.amplitudes(static_cast<Index>(p.to_index())) = 1.0;
    return s;
  }

  [[nodiscard]] double norm() const { return amplitudes.norm(); }
};

struct DensityMatrix {
  MatrixXcd entries;
  int subsystem_length = 0;

  /// Hermiticity, unit trace and positivity, each within `tol`.
  [[nodiscard]] bool is_valid(double tol = 1e-10) const {
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    if (std::abs(entries.trace() - cplx(1.0)) > tol) return false;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(entries, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
  }
};

inline void check_capacity(int L, int dense_limit) {
  if (L > dense_limit)
    throw CapacityError("exact engine: L=" + std::to_string(L) + " exceeds dense limit " +
                        std::to_string(dense_limit));
}

inline MatrixXd build_hamiltonian(const ModelParams& params, int dense_limit = kDefaultDenseLimit) {
  params.validate();
  const int L = params.L;
  check_capacity(L, dense_limit);
  const Index dim = Index{1} << L;
  MatrixXd H = MatrixXd::Zero(dim, dim);
  for (Index b = 0; b < dim; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    auto s = [&](int site) { return detail::spin(ub, L, site); };
    double diag = 0.0;
    for (int i = 1; i < L; ++i) diag -= params.J0 * s(i) * s(i + 1);
    for (int i = 1; i <= L; ++i) diag -= params.h * s(i);
    H(b, b) += diag;
    for (int i = 2; i <= L - 1; ++i) H(static_cast<Index>(ub ^ detail::site_mask(L, i)), b) -= params.g;
    for (int i = 1; i <= L - 2; ++i)
      H(static_cast<Index>(ub ^ detail::site_mask(L, i + 1)), b) -= params.J * s(i) * s(i + 2);
  }
  return H;
}

/// The Hamiltonian after the open-chain KW map, written directly as Pauli
/// strings on the dual lattice:
///   H' = -J0 sum_{i>=2} Z_i - g sum_{i=2}^{L-1} X_i X_{i+1}
///        - h sum_{i=1}^{L} prod_{j<=i} Z_j + J sum_{i=2}^{L-1} Y_i Y_{i+1}.
inline MatrixXd build_kw_hamiltonian(const ModelParams& params, int dense_limit = kDefaultDenseLimit) {
  params.validate();
  const int L = params.L;
  check_capacity(L, dense_limit);
  const Index dim = Index{1} << L;
  MatrixXd H = MatrixXd::Zero(dim, dim);
  for (Index b = 0; b < dim; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    auto s = [&](int site) { return detail::spin(ub, L, site); };
    double diag = 0.0;
    for (int i = 2; i <= L; ++i) diag -= params.J0 * s(i);
    int string = 1;
    for (int i = 1; i <= L; ++i) {
      string *= s(i);
      diag -= params.h * string;
    }
    H(b, b) += diag;
    for (int i = 2; i <= L - 1; ++i) {
      const auto flipped = static_cast<Index>(ub ^ detail::site_mask(L, i) ^ detail::site_mask(L, i + 1));
      H(flipped, b) -= params.g;
      // Y Y |s_i s_{i+1}> = -s_i s_{i+1} |flipped>
      H(flipped, b) += params.J * (-s(i) * s(i + 1));
    }
  }
  return H;
}

/// exp(-iHt) from a single eigendecomposition; immutable after construction
/// and safe to share across threads.
class Propagator {
 public:
  explicit Propagator(const MatrixXd& H) : eig_(linalg::symmetric_eigen(H)) {}

  [[nodiscard]] DenseState evolve(const DenseState& state, double t) const {
    const VectorXcd coeffs = eig_.vectors.transpose().cast<cplx>() * state.amplitudes;
    const VectorXcd phased =
        (coeffs.array() * (eig_.values.cast<cplx>().array() * cplx(0.0, -t)).exp()).matrix();
    return DenseState{eig_.vectors.cast<cplx>() * phased, state.L};
  }

  [[nodiscard]] const VectorXd& energies() const noexcept { return eig_.values; }

 private:
  linalg::SymmetricEigen eig_;
};

inline DenseState evolve(const DenseState& state, const MatrixXd& H, double t) {
  return Propagator(H).evolve(state, t);
}

inline double sigma_z_expectation(const DenseState& state, int site) {
  if (site < 1 || site > state.L) throw RangeError("sigma_z site out of range");
  double acc = 0.0;
  for (Index b = 0; b < state.amplitudes.size(); ++b)
    acc += std::norm(state.amplitudes(b)) * detail::spin(static_cast<std::uint64_t>(b), state.L, site);
  return acc;
}

/// (1 - <Z_i Z_{i+1}>)/2 on link (i, i+1).
inline double kink_density(const DenseState& state, int link) {
  if (link < 1 || link > state.L - 1) throw RangeError("kink density link out of range");
  double acc = 0.0;
  for (Index b = 0; b < state.amplitudes.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    if (detail::spin(ub, state.L, link) != detail::spin(ub, state.L, link + 1)) acc += std::norm(state.amplitudes(b));
  }
  return acc;
}

/// Diagonal of the total kink-number operator N_k.
inline VectorXd kink_number_diagonal(int L) {
  VectorXd d(Index{1} << L);
  for (Index b = 0; b < d.size(); ++b) d(b) = kink_count(SpinPattern::from_index(static_cast<std::uint64_t>(b), L));
  return d;
}

/// Diagonal of the kink parity prod_i Z_i Z_{i+1} = Z_1 Z_L.
inline VectorXd kink_parity_diagonal(int L) {
  VectorXd d(Index{1} << L);
  for (Index b = 0; b < d.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    d(b) = detail::spin(ub, L, 1) * detail::spin(ub, L, L);
  }
  return d;
}

inline double total_kink_number(const DenseState& state) {
  return state.amplitudes.cwiseAbs2().dot(kink_number_diagonal(state.L));
}

/// Partial trace over sites L_A+1..L.
inline DensityMatrix reduce(const DenseState& state, int subsystem_length) {
  if (subsystem_length < 1 || subsystem_length >= state.L) throw RangeError("reduce: need 1 <= L_A < L");
  const Index dim_a = Index{1} << subsystem_length;
  const Index dim_b = Index{1} << (state.L - subsystem_length);
  // column a of this view holds psi(a, .)
  Eigen::Map<const MatrixXcd> psi(state.amplitudes.data(), dim_b, dim_a);
  return DensityMatrix{psi.transpose() * psi.conjugate(), subsystem_length};
}

inline double purity(const DensityMatrix& rho) { return rho.entries.cwiseAbs2().sum(); }

/// S_2 = -log2 Tr rho^2.
inline double renyi2(const DensityMatrix& rho) { return -std::log2(purity(rho)); }

inline VectorXd charge_diagonal(const ChargeSpec& q) {
  VectorXd d(Index{1} << q.subsystem_length);
  for (Index a = 0; a < d.size(); ++a) d(a) = q.value(static_cast<std::uint64_t>(a));
  return d;
}

/// sum_q Pi_q rho Pi_q by masking entries between different charge sectors.
inline DensityMatrix project_charge(const DensityMatrix& rho, const ChargeSpec& q) {
  if (q.subsystem_length != rho.subsystem_length)
    throw RangeError("project_charge: charge and density matrix subsystems differ");
  const VectorXd charges = charge_diagonal(q);
  DensityMatrix out = rho;
  for (Index j = 0; j < out.entries.cols(); ++j)
    for (Index i = 0; i < out.entries.rows(); ++i)
      if (charges(i) != charges(j)) out.entries(i, j) = 0.0;
  return out;
}

inline double asymmetry(const DensityMatrix& rho, const ChargeSpec& q) {
  return renyi2(project_charge(rho, q)) - renyi2(rho);
}

/// Trapezoid nodes and weights for int_{-pi}^{pi} dlambda/2pi with k
/// intervals (k+1 points).
struct LambdaGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline LambdaGrid lambda_grid(int k) {
  if (k < 1) throw RangeError("lambda grid needs k >= 1");
  LambdaGrid grid;
  for (int m = 0; m <= k; ++m) {
    grid.nodes.push_back(-std::numbers::pi + 2.0 * std::numbers::pi * m / k);
    grid.weights.push_back((m == 0 || m == k) ? 0.5 / k : 1.0 / k);
  }
  return grid;
}

/// int dlambda/2pi e^{-i lambda Q} rho e^{i lambda Q} on the trapezoid grid.
inline DensityMatrix sector_integral(const DensityMatrix& rho, const ChargeSpec& q, int k) {
  const VectorXd charges = charge_diagonal(q);
  const LambdaGrid grid = lambda_grid(k);
  DensityMatrix out{MatrixXcd::Zero(rho.entries.rows(), rho.entries.cols()), rho.subsystem_length};
  for (std::size_t m = 0; m < grid.nodes.size(); ++m) {
    const VectorXcd phase = (charges.cast<cplx>() * cplx(0.0, -grid.nodes[m])).array().exp().matrix();
    out.entries += grid.weights[m] * (phase.asDiagonal() * rho.entries * phase.conjugate().asDiagonal());
  }
  return out;
}

/// Max-entry deviation between the lambda-integral form and direct sector
/// projection.
inline double sector_integral_check(const DensityMatrix& rho, const ChargeSpec& q, int k) {
  return (sector_integral(rho, q, k).entries - project_charge(rho, q).entries).cwiseAbs().maxCoeff();
}

/// Tr rho_Q^2 = int dlambda/2pi Tr[e^{i lambda Q} rho e^{-i lambda Q} rho] on the
/// trapezoid grid.
inline double projected_purity_integral(const DensityMatrix& rho, const ChargeSpec& q, int k) {
  const VectorXd charges = charge_diagonal(q);
  const LambdaGrid grid = lambda_grid(k);
  double acc = 0.0;
  for (std::size_t m = 0; m < grid.nodes.size(); ++m) {
    const VectorXcd phase = (charges.cast<cplx>() * cplx(0.0, grid.nodes[m])).array().exp().matrix();
    const MatrixXcd rotated = phase.asDiagonal() * rho.entries * phase.conjugate().asDiagonal();
    acc += grid.weights[m] * (rotated * rho.entries).trace().real();
  }
  return acc;
}

/// CNOT ladder realizing |s> -> |kw_forward(s)>. Gates run from (L-1 -> L)
/// down to (1 -> 2) so every control still holds its original spin.
inline DenseState kw_circuit(const DenseState& state) {
  const int L = state.L;
  VectorXcd amps = state.amplitudes;
  for (int control = L - 1; control >= 1; --control) {
    const std::uint64_t cmask = detail::site_mask(L, control);
    const std::uint64_t tmask = detail::site_mask(L, control + 1);
    for (Index b = 0; b < amps.size(); ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      if ((ub & cmask) && !(ub & tmask)) std::swap(amps(b), amps(static_cast<Index>(ub | tmask)));
    }
  }
  return DenseState{std::move(amps), L};
}

}  // namespace kinkasym::exact
