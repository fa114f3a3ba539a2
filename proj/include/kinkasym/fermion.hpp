#pragma once

// Free-fermion picture of the kink-conserving, unconfined chain (h = 0,
// J = -g). After the KW map and a Jordan-Wigner transformation each kink is a
// fermion on the dual lattice: mode j in {2..L} is a kink on link (j-1, j).
// Internally mode j is stored at matrix index j - 2.
//
// A fermion pair on modes i < j is the domain |down_i .. down_{j-1}>, i.e.
// two-kink label (jL, jR) = (i, j-1).

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "kinkasym/linalg.hpp"
#include "kinkasym/model.hpp"
#include "kinkasym/twokink.hpp"

namespace kinkasym::fermion {

/// Rows are initial modes, columns final modes: c_a^dag -> sum_j u(a, j) c_j^dag.
struct SingleParticleUnitary {
  MatrixXcd u;
  int L = 0;
};

/// A(i, j) = u(x,i) u(y,j) - u(x,j) u(y,i), antisymmetric.
struct TwoFermionAmplitudes {
  MatrixXcd A;
  int L = 0;
};

inline void require_free_regime(const ModelParams& params) {
  if (params.h != 0.0 || !params.kink_conserving())
    throw RegimeError("fermion engine requires h == 0 and J == -g (got h=" + std::to_string(params.h) +
                      ", g=" + std::to_string(params.g) + ", J=" + std::to_string(params.J) + ")");
}

inline int mode_index(int L, int mode) {
  if (mode < 2 || mode > L) throw RangeError("fermion mode " + std::to_string(mode) + " outside 2..L");
  return mode - 2;
}

/// Number-conserving part of the fermionic Hamiltonian on modes 2..L:
/// diagonal -2 J0, nearest-neighbour hopping -(g - J).
inline MatrixXd hopping_matrix(const ModelParams& params) {
  params.validate();
  require_free_regime(params);
  const int n = params.L - 1;
  MatrixXd h = MatrixXd::Zero(n, n);
  h.diagonal().setConstant(-2.0 * params.J0);
  for (int m = 0; m + 1 < n; ++m) h(m, m + 1) = h(m + 1, m) = -(params.g - params.J);
  return h;
}

class FermionPropagator {
 public:
  explicit FermionPropagator(const MatrixXd& hopping)
      : eig_(linalg::symmetric_eigen(hopping)), L_(static_cast<int>(hopping.rows()) + 1) {}

  /// u(t) = exp(-i hopping t); symmetric because the hopping matrix is real.
  [[nodiscard]] SingleParticleUnitary propagate(double t) const { return {linalg::unitary_from_eigen(eig_, t), L_}; }

  [[nodiscard]] const VectorXd& energies() const noexcept { return eig_.values; }

 private:
  linalg::SymmetricEigen eig_;
  int L_;
};

inline SingleParticleUnitary propagate(const MatrixXd& hopping, double t) { return FermionPropagator(hopping).propagate(t); }

/// Evolved pair state for fermions initially on modes x and y (x < y keeps
/// the sign convention A(x, y) = +1 at t = 0).
inline TwoFermionAmplitudes two_fermion_state(const SingleParticleUnitary& u, int x, int y) {
  if (x == y) throw RangeError("two_fermion_state: initial modes must differ");
  const Index ix = mode_index(u.L, x);
  const Index iy = mode_index(u.L, y);
  const VectorXcd ux = u.u.row(ix).transpose();
  const VectorXcd uy = u.u.row(iy).transpose();
  TwoFermionAmplitudes out;
  out.L = u.L;
  out.A = ux * uy.transpose() - uy * ux.transpose();
  return out;
}

inline twokink::TwoKinkAmplitudes to_twokink(const TwoFermionAmplitudes& f) {
  const int L = f.L;
  const twokink::TwoKinkBasis basis(L);
  twokink::TwoKinkAmplitudes out{VectorXcd::Zero(basis.dimension()), L};
  for (int i = 2; i <= L; ++i)
    for (int j = i + 1; j <= L; ++j) out.amps(basis.index(i, j - 1)) = f.A(i - 2, j - 2);
  return out;
}

/// Initial fermion modes of the domain |j, n>: kinks on links (j-1, j) and
/// (j+n-1, j+n).
inline std::pair<int, int> domain_modes(int j, int n) { return {j, j + n}; }

struct SchmidtBound {
  double s2 = 0.0;
  int schmidt_rank_upper = 4;
};

/// S2 at cut lB through the two-kink reduced density matrix, with the
/// four-term product decomposition bound Sch <= 4 enforced.
inline SchmidtBound schmidt_bound_s2(const twokink::TwoKinkAmplitudes& amps, const twokink::TwoKinkBasis& basis,
                                     int cut) {
  SchmidtBound out;
  out.s2 = twokink::renyi2_twokink_resolved(amps, basis, cut).s2;
  if (out.s2 > 2.0 + 1e-9)
    throw InvariantViolation("free-fermion pair state exceeded S2 <= 2 at cut " + std::to_string(cut) +
                             " (S2=" + std::to_string(out.s2) + ")");
  return out;
}

inline SchmidtBound schmidt_bound_s2(const TwoFermionAmplitudes& f, int cut) {
  return schmidt_bound_s2(to_twokink(f), twokink::TwoKinkBasis(f.L), cut);
}

/// S2 of KW sites 1..L_A from the correlation matrix of the two occupied
/// orbitals, C(i,j) = conj(u(x,i)) u(x,j) + conj(u(y,i)) u(y,j), restricted to
/// modes 2..L_A. KW site 1 is always up for a two-kink state and carries no
/// entanglement.
inline double gaussian_kw_renyi2(const SingleParticleUnitary& u, int x, int y, int subsystem_length) {
  if (subsystem_length < 1 || subsystem_length >= u.L) throw RangeError("gaussian_kw_renyi2: need 1 <= L_A < L");
  const Index n_a = subsystem_length - 1;
  if (n_a == 0) return 0.0;
  const VectorXcd ux = u.u.row(mode_index(u.L, x)).transpose().head(n_a);
  const VectorXcd uy = u.u.row(mode_index(u.L, y)).transpose().head(n_a);
  const MatrixXcd c = ux.conjugate() * ux.transpose() + uy.conjugate() * uy.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(c, Eigen::EigenvaluesOnly);
  double s2 = 0.0;
  for (Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double nu = std::clamp(es.eigenvalues()(k), 0.0, 1.0);
    s2 -= std::log2(nu * nu + (1.0 - nu) * (1.0 - nu));
  }
  return s2;
}

}  // namespace kinkasym::fermion
