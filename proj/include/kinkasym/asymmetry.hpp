#pragma once

// Entanglement asymmetry of an MPS subsystem A = sites 1..l_B.
//
// Tr rho_{A,Q}^2 = int dlambda/2pi f(lambda), f = Tr[e^{i lambda Q} rho_A
// e^{-i lambda Q} rho_A], integrated on the same trapezoid grid as the dense
// engine. f is even in lambda, so only half the nodes are evaluated.
//
// Two contractions of f are provided. The MPO one builds the two copies of
// rho_A (bond D^2 each) and contracts them site by site with a D^4
// environment. The transfer one uses f = |X|_F^2 with
// X(b', b) = <phi_b'| e^{i lambda Q} |phi_b>, a D x D transfer.

#include <cmath>
#include <string>
#include <vector>

#include "kinkasym/errors.hpp"
#include "kinkasym/exact.hpp"
#include "kinkasym/model.hpp"
#include "kinkasym/mps.hpp"
#include "kinkasym/parallel.hpp"

namespace kinkasym::mps {

enum class AsymmetryMethod { Mpo, Transfer };

inline AsymmetryMethod parse_asymmetry_method(const std::string& s) {
  if (s == "mpo") return AsymmetryMethod::Mpo;
  if (s == "transfer") return AsymmetryMethod::Transfer;
  throw RangeError("unknown asymmetry method '" + s + "' (expected mpo or transfer)");
}

inline const char* to_string(AsymmetryMethod m) { return m == AsymmetryMethod::Mpo ? "mpo" : "transfer"; }

struct AsymmetryOptions {
  AsymmetryMethod method = AsymmetryMethod::Mpo;
  Index mpo_bond_budget = 1024;  // max D^2 of the rho_A MPO
  int threads = 0;
};

struct AsymmetryResult {
  double s2 = 0.0;
  double s2_projected = 0.0;
  double ds2 = 0.0;
};

namespace detail {

/// Charge picked up at site i (1-based) given its spin bit and the bit of
/// site i-1 (-1 when i == 1).
inline int charge_step(ChargeKind kind, int site, int bit, int prev_bit) {
  switch (kind) {
    case ChargeKind::SiteNumber: return bit;
    case ChargeKind::KwSiteNumber: return site == 1 ? 0 : bit;
    case ChargeKind::LinkKink: return (prev_bit >= 0 && prev_bit != bit) ? 1 : 0;
  }
  return 0;
}

/// The A-block of the state with the Schmidt index open on the right:
/// sites 0..l_B-1 with the center on site l_B-1.
inline std::vector<Site> subsystem_block(MPSState& mps, int cut) {
  mps.move_center(cut - 1);
  std::vector<Site> out;
  for (int i = 0; i < cut; ++i) out.push_back(mps.site(i));
  return out;
}

inline double transfer_f(const std::vector<Site>& block, ChargeKind kind, double lambda) {
  // env[prev bit] holds sum over strings of conj(A..) (x) A.. with phases
  std::vector<MatrixXcd> env{MatrixXcd::Ones(1, 1)};
  std::vector<int> env_bits{-1};
  for (std::size_t i = 0; i < block.size(); ++i) {
    const Site& s = block[i];
    std::vector<MatrixXcd> next(2, MatrixXcd::Zero(s.dr, s.dr));
    for (int bit = 0; bit < 2; ++bit) {
      MatrixXcd summed = MatrixXcd::Zero(s.dl, s.dl);
      for (std::size_t e = 0; e < env.size(); ++e) {
        const int q = charge_step(kind, static_cast<int>(i) + 1, bit, env_bits[e]);
        summed += std::exp(cplx(0.0, lambda * q)) * env[e];
      }
      next[static_cast<std::size_t>(bit)] = s.slice(bit).adjoint() * summed * s.slice(bit);
    }
    env = std::move(next);
    env_bits = {0, 1};
  }
  const MatrixXcd x = env[0] + env[1];
  return x.squaredNorm();
}

/// One index contraction of the D^4 environment. `env` is a matrix whose
/// rows run over the first stored index; the result has that index replaced
/// by the new bond and rotated to the back.
inline MatrixXcd absorb(const MatrixXcd& env, const MatrixXcd& a) { return (a.transpose() * env).transpose(); }

inline double mpo_f(const std::vector<Site>& block, ChargeKind kind, double lambda, Index budget) {
  // env indices (a1, a1', a2, a2') stored a1 fastest; copy 1 is
  // e^{i lambda Q} rho e^{-i lambda Q} with ket string s and bra s', copy 2 is
  // rho with ket s' and bra s. One environment per previous (s, s') pair.
  std::vector<VectorXcd> env{VectorXcd::Ones(1)};
  std::vector<std::pair<int, int>> env_bits{{-1, -1}};
  for (std::size_t i = 0; i < block.size(); ++i) {
    const Site& st = block[i];
    const Index dl = st.dl;
    const Index dr = st.dr;
    if (dr * dr > budget)
      throw ResourceError("rho_A MPO bond " + std::to_string(i + 1) + "-" + std::to_string(i + 2) + " needs D^2 = " +
                          std::to_string(dr * dr) + " > budget " + std::to_string(budget));
    std::vector<VectorXcd> next;
    for (int s = 0; s < 2; ++s) {
      for (int sp = 0; sp < 2; ++sp) {
        VectorXcd f = VectorXcd::Zero(dl * dl * dl * dl);
        for (std::size_t e = 0; e < env.size(); ++e) {
          const int dq = charge_step(kind, static_cast<int>(i) + 1, s, env_bits[e].first) -
                         charge_step(kind, static_cast<int>(i) + 1, sp, env_bits[e].second);
          f += std::exp(cplx(0.0, lambda * dq)) * env[e];
        }
        const MatrixXcd as = st.slice(s);
        const MatrixXcd asp = st.slice(sp);
        MatrixXcd m = Eigen::Map<MatrixXcd>(f.data(), dl, dl * dl * dl);
        m = absorb(m, as);  // (a1', a2, a2', b1)
        m.resize(dl, dl * dl * dr);
        m = absorb(m, asp.conjugate());  // (a2, a2', b1, b1')
        m.resize(dl, dl * dr * dr);
        m = absorb(m, asp);  // (a2', b1, b1', b2)
        m.resize(dl, dr * dr * dr);
        m = absorb(m, as.conjugate());  // (b1, b1', b2, b2')
        next.emplace_back(Eigen::Map<VectorXcd>(m.data(), m.size()));
      }
    }
    env = std::move(next);
    env_bits = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  }
  const Index d = block.back().dr;
  cplx acc = 0.0;
  for (const auto& e : env)
    for (Index b1 = 0; b1 < d; ++b1)
      for (Index b2 = 0; b2 < d; ++b2) acc += e(b1 + d * (b1 + d * (b2 + d * b2)));
  return acc.real();
}

}  // namespace detail

/// f(lambda) for the subsystem of `cut` sites; `mps` is only re-gauged.
inline double charged_moment(MPSState& mps, int cut, ChargeKind kind, double lambda, const AsymmetryOptions& opt = {}) {
  const auto block = detail::subsystem_block(mps, cut);
  return opt.method == AsymmetryMethod::Mpo ? detail::mpo_f(block, kind, lambda, opt.mpo_bond_budget)
                                            : detail::transfer_f(block, kind, lambda);
}

inline AsymmetryResult asymmetry_s2(MPSState& mps, const ChargeSpec& q, int k, const AsymmetryOptions& opt = {}) {
  const int cut = q.subsystem_length;
  q.validate(mps.size());
  if (k < 2 * q.spectral_range())
    throw RangeError("asymmetry_s2: lambda grid k=" + std::to_string(k) + " below twice the charge spectral range (" +
                     std::to_string(q.spectral_range()) + ")");
  const auto block = detail::subsystem_block(mps, cut);
  const auto grid = exact::lambda_grid(k);
  // node m and node k - m sit at opposite lambda
  const int half = k / 2;
  std::vector<double> f(static_cast<std::size_t>(half + 1));
  parallel_for(
      f.size(),
      [&](std::size_t m) {
        f[m] = opt.method == AsymmetryMethod::Mpo ? detail::mpo_f(block, q.kind, grid.nodes[m], opt.mpo_bond_budget)
                                                  : detail::transfer_f(block, q.kind, grid.nodes[m]);
      },
      opt.threads);
  double projected = 0.0;
  for (int m = 0; m <= k; ++m)
    projected += grid.weights[static_cast<std::size_t>(m)] * f[static_cast<std::size_t>(std::min(m, k - m))];

  const VectorXd sv = mps.schmidt_values(cut - 1);
  AsymmetryResult out;
  out.s2 = -std::log2(sv.array().pow(4).sum());
  out.s2_projected = -std::log2(projected);
  out.ds2 = out.s2_projected - out.s2;
  return out;
}

}  // namespace kinkasym::mps
