#pragma once

// Test-only reference constructions. Everything here is built from explicit
// Kronecker products of 2x2 Pauli matrices and explicit projector sums so it
// shares no code path with the engines under test.

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include "kinkasym/model.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

inline MatrixXcd pauli(char which) {
  MatrixXcd m(2, 2);
  switch (which) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m = MatrixXcd::Identity(2, 2);
  }
  return m;
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Pauli string given as a map site (1-based) -> letter; site 1 is the
/// leftmost Kronecker factor.
inline MatrixXcd pauli_string(int L, const std::map<int, char>& ops) {
  MatrixXcd out = MatrixXcd::Identity(1, 1);
  for (int site = 1; site <= L; ++site) {
    auto it = ops.find(site);
    out = kron(out, pauli(it == ops.end() ? 'I' : it->second));
  }
  return out;
}

inline MatrixXcd hamiltonian(const kinkasym::ModelParams& p) {
  const int L = p.L;
  const auto dim = Eigen::Index{1} << L;
  MatrixXcd H = MatrixXcd::Zero(dim, dim);
  for (int i = 1; i <= L - 1; ++i) H -= p.J0 * pauli_string(L, {{i, 'Z'}, {i + 1, 'Z'}});
  for (int i = 2; i <= L - 1; ++i) H -= p.g * pauli_string(L, {{i, 'X'}});
  for (int i = 1; i <= L; ++i) H -= p.h * pauli_string(L, {{i, 'Z'}});
  for (int i = 1; i <= L - 2; ++i) H -= p.J * pauli_string(L, {{i, 'Z'}, {i + 1, 'X'}, {i + 2, 'Z'}});
  return H;
}

/// Dual-lattice Hamiltonian written term by term.
inline MatrixXcd kw_hamiltonian(const kinkasym::ModelParams& p) {
  const int L = p.L;
  const auto dim = Eigen::Index{1} << L;
  MatrixXcd H = MatrixXcd::Zero(dim, dim);
  for (int i = 2; i <= L; ++i) H -= p.J0 * pauli_string(L, {{i, 'Z'}});
  for (int i = 2; i <= L - 1; ++i) H -= p.g * pauli_string(L, {{i, 'X'}, {i + 1, 'X'}});
  for (int i = 1; i <= L; ++i) {
    std::map<int, char> ops;
    for (int j = 1; j <= i; ++j) ops[j] = 'Z';
    H -= p.h * pauli_string(L, ops);
  }
  for (int i = 2; i <= L - 1; ++i) H += p.J * pauli_string(L, {{i, 'Y'}, {i + 1, 'Y'}});
  return H;
}

/// Kink number operator sum_i (1 - Z_i Z_{i+1})/2 as a dense matrix.
inline MatrixXcd kink_number(int L) {
  const auto dim = Eigen::Index{1} << L;
  MatrixXcd N = MatrixXcd::Zero(dim, dim);
  for (int i = 1; i <= L - 1; ++i)
    N += 0.5 * (MatrixXcd::Identity(dim, dim) - pauli_string(L, {{i, 'Z'}, {i + 1, 'Z'}}));
  return N;
}

/// Charge operator of a ChargeSpec built from Pauli strings on the subsystem.
inline MatrixXcd charge_operator(const kinkasym::ChargeSpec& q) {
  const int n = q.subsystem_length;
  const auto dim = Eigen::Index{1} << n;
  const MatrixXcd id = MatrixXcd::Identity(dim, dim);
  MatrixXcd Q = MatrixXcd::Zero(dim, dim);
  switch (q.kind) {
    case kinkasym::ChargeKind::SiteNumber:
      for (int i = 1; i <= n; ++i) Q += 0.5 * (id - pauli_string(n, {{i, 'Z'}}));
      break;
    case kinkasym::ChargeKind::KwSiteNumber:
      for (int i = 2; i <= n; ++i) Q += 0.5 * (id - pauli_string(n, {{i, 'Z'}}));
      break;
    case kinkasym::ChargeKind::LinkKink:
      for (int i = 1; i < n; ++i) Q += 0.5 * (id - pauli_string(n, {{i, 'Z'}, {i + 1, 'Z'}}));
      break;
  }
  return Q;
}

/// sum_q Pi_q rho Pi_q with Pi_q built as explicit diagonal projectors.
inline MatrixXcd brute_force_projection(const MatrixXcd& rho, const kinkasym::ChargeSpec& q) {
  const MatrixXcd Q = charge_operator(q);
  const auto dim = rho.rows();
  MatrixXcd out = MatrixXcd::Zero(dim, dim);
  for (int sector = 0; sector <= q.spectral_range() + 1; ++sector) {
    MatrixXcd proj = MatrixXcd::Zero(dim, dim);
    for (Eigen::Index a = 0; a < dim; ++a)
      if (std::abs(Q(a, a).real() - sector) < 1e-9) proj(a, a) = 1.0;
    out += proj * rho * proj;
  }
  return out;
}

/// Partial trace over the right L - L_A sites via explicit index loops.
inline MatrixXcd partial_trace(const VectorXcd& psi, int L, int L_A) {
  const auto dim_a = Eigen::Index{1} << L_A;
  const auto dim_b = Eigen::Index{1} << (L - L_A);
  MatrixXcd rho = MatrixXcd::Zero(dim_a, dim_a);
  for (Eigen::Index a = 0; a < dim_a; ++a)
    for (Eigen::Index ap = 0; ap < dim_a; ++ap)
      for (Eigen::Index b = 0; b < dim_b; ++b) rho(a, ap) += psi(a * dim_b + b) * std::conj(psi(ap * dim_b + b));
  return rho;
}

inline VectorXcd random_state(Eigen::Index dim, std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  VectorXcd v(dim);
  for (auto& x : v) x = cplx(gauss(rng), gauss(rng));
  return v.normalized();
}

inline MatrixXcd random_density_matrix(Eigen::Index dim, std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  MatrixXcd g(dim, dim);
  for (auto& x : g.reshaped()) x = cplx(gauss(rng), gauss(rng));
  MatrixXcd rho = g * g.adjoint();
  return rho / rho.trace();
}

inline MatrixXcd matrix_exp_hermitian(const MatrixXcd& H, double t) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
  const VectorXcd ph = (es.eigenvalues().cast<cplx>() * cplx(0, -t)).array().exp().matrix();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace oracle
