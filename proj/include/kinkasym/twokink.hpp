#pragma once

// Evolution restricted to the sector with exactly one flipped domain.
//
// States are labelled |jL, jR> with the down domain on sites jL..jR and
// 1 < jL <= jR < L. A domain-wall pattern |j, n> maps to (jL, jR) = (j, j+n-1).
//
// For J = -g the full Hamiltonian leaves this sector invariant, and within it
// acts as the hopping problem H2 below plus the constant
//   E0 = -J0 (L - 5) - h L,
// which only contributes a global phase and is dropped from H2.

#include <cmath>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "kinkasym/exact.hpp"
#include "kinkasym/linalg.hpp"
#include "kinkasym/model.hpp"

namespace kinkasym::twokink {

class TwoKinkBasis {
 public:
  explicit TwoKinkBasis(int L) : L_(L) {
    if (L < 4) throw RangeError("two-kink basis needs L >= 4");
    offsets_.assign(static_cast<std::size_t>(L + 1), -1);
    Index idx = 0;
    for (int jl = 2; jl <= L - 1; ++jl) {
      offsets_[static_cast<std::size_t>(jl)] = idx;
      for (int jr = jl; jr <= L - 1; ++jr) pairs_.emplace_back(jl, jr), ++idx;
    }
  }

  [[nodiscard]] int L() const noexcept { return L_; }
  [[nodiscard]] Index dimension() const noexcept { return static_cast<Index>(pairs_.size()); }

  [[nodiscard]] bool contains(int jl, int jr) const noexcept { return 1 < jl && jl <= jr && jr < L_; }

  [[nodiscard]] Index index(int jl, int jr) const {
    if (!contains(jl, jr))
      throw RangeError("(" + std::to_string(jl) + ", " + std::to_string(jr) + ") is not a two-kink label for L=" +
                       std::to_string(L_));
    return offsets_[static_cast<std::size_t>(jl)] + (jr - jl);
  }

  [[nodiscard]] std::pair<int, int> pair(Index index) const { return pairs_.at(static_cast<std::size_t>(index)); }

 private:
  int L_;
  std::vector<Index> offsets_;
  std::vector<std::pair<int, int>> pairs_;
};

struct TwoKinkAmplitudes {
  VectorXcd amps;
  int L = 0;

  /// Basis state of a pattern with exactly one interior down domain.
  static TwoKinkAmplitudes from_pattern(const SpinPattern& p) {
    const int L = p.size();
    int jl = 0;
    int jr = 0;
    for (int i = 1; i <= L; ++i) {
      if (p(i) == -1) {
        if (jl == 0) jl = i;
        if (jr != 0 && jr != i - 1) throw RangeError("pattern has more than one down domain");
        jr = i;
      }
    }
    return from_labels(L, jl, jr);
  }

  static TwoKinkAmplitudes from_labels(int L, int jl, int jr) {
    const TwoKinkBasis basis(L);
    TwoKinkAmplitudes out{VectorXcd::Zero(basis.dimension()), L};
    out.amps(basis.index(jl, jr)) = 1.0;
    return out;
  }

  [[nodiscard]] double norm() const { return amps.norm(); }
};

inline double h2_energy_offset(const ModelParams& params) { return -params.J0 * (params.L - 5) - params.h * params.L; }

/// Diagonal 2 h n, hopping -(g - J) between labels that differ by one wall
/// step and stay inside the sector.
inline MatrixXd build_h2(const ModelParams& params) {
  params.validate();
  const TwoKinkBasis basis(params.L);
  const double hop = -(params.g - params.J);
  MatrixXd H = MatrixXd::Zero(basis.dimension(), basis.dimension());
  for (Index a = 0; a < basis.dimension(); ++a) {
    const auto [jl, jr] = basis.pair(a);
    H(a, a) = 2.0 * params.h * (jr - jl + 1);
    const std::pair<int, int> moves[] = {{jl - 1, jr}, {jl + 1, jr}, {jl, jr - 1}, {jl, jr + 1}};
    for (const auto& [ml, mr] : moves)
      if (basis.contains(ml, mr)) H(basis.index(ml, mr), a) += hop;
  }
  return H;
}

/// exp(-i H2 t) from one eigendecomposition; immutable and shareable.
class TwoKinkPropagator {
 public:
  explicit TwoKinkPropagator(const MatrixXd& h2) : eig_(linalg::symmetric_eigen(h2)) {}

  [[nodiscard]] TwoKinkAmplitudes evolve(const TwoKinkAmplitudes& amps, double t) const {
    return evolve_many(amps, std::vector<double>{t}).front();
  }

  /// Batched propagation: projects once, then applies the eigenvector matrix
  /// to blocks of phased coefficient columns with real GEMMs.
  [[nodiscard]] std::vector<TwoKinkAmplitudes> evolve_many(const TwoKinkAmplitudes& amps,
                                                           const std::vector<double>& times) const {
    const Index n = eig_.values.size();
    if (amps.amps.size() != n) throw RangeError("amplitude vector does not match the propagator dimension");
    const VectorXd c_re = eig_.vectors.transpose() * amps.amps.real();
    const VectorXd c_im = eig_.vectors.transpose() * amps.amps.imag();
    std::vector<TwoKinkAmplitudes> out;
    out.reserve(times.size());
    constexpr std::size_t kBatch = 64;
    for (std::size_t start = 0; start < times.size(); start += kBatch) {
      const auto count = static_cast<Index>(std::min(kBatch, times.size() - start));
      MatrixXd p_re(n, count);
      MatrixXd p_im(n, count);
      for (Index b = 0; b < count; ++b) {
        const double t = times[start + static_cast<std::size_t>(b)];
        for (Index k = 0; k < n; ++k) {
          const double c = std::cos(eig_.values(k) * t);
          const double s = -std::sin(eig_.values(k) * t);
          p_re(k, b) = c * c_re(k) - s * c_im(k);
          p_im(k, b) = c * c_im(k) + s * c_re(k);
        }
      }
      const MatrixXd r_re = eig_.vectors * p_re;
      const MatrixXd r_im = eig_.vectors * p_im;
      for (Index b = 0; b < count; ++b) {
        TwoKinkAmplitudes a{VectorXcd(n), amps.L};
        a.amps.real() = r_re.col(b);
        a.amps.imag() = r_im.col(b);
        out.push_back(std::move(a));
      }
    }
    return out;
  }

  [[nodiscard]] const VectorXd& energies() const noexcept { return eig_.values; }

 private:
  linalg::SymmetricEigen eig_;
};

inline TwoKinkAmplitudes evolve_twokink(const TwoKinkAmplitudes& amps, const MatrixXd& h2, double t) {
  return TwoKinkPropagator(h2).evolve(amps, t);
}

/// Kink density on link (i, i+1): weight of labels with jL = i+1 or jR = i.
inline double kink_density_twokink(const TwoKinkAmplitudes& a, int link) {
  if (link < 1 || link > a.L - 1) throw RangeError("kink density link out of range");
  const TwoKinkBasis basis(a.L);
  double acc = 0.0;
  for (Index k = 0; k < basis.dimension(); ++k) {
    const auto [jl, jr] = basis.pair(k);
    if (jl == link + 1 || jr == link) acc += std::norm(a.amps(k));
  }
  return acc;
}

inline double sigma_z_twokink(const TwoKinkAmplitudes& a, int site) {
  if (site < 1 || site > a.L) throw RangeError("sigma_z site out of range");
  const TwoKinkBasis basis(a.L);
  double down = 0.0;
  for (Index k = 0; k < basis.dimension(); ++k) {
    const auto [jl, jr] = basis.pair(k);
    if (jl <= site && site <= jr) down += std::norm(a.amps(k));
  }
  return 1.0 - 2.0 * down;
}

/// Kink density on every link (index i-1 holds link (i, i+1)) in one pass.
inline std::vector<double> kink_density_profile(const TwoKinkAmplitudes& a, const TwoKinkBasis& basis) {
  std::vector<double> delta(static_cast<std::size_t>(a.L - 1), 0.0);
  for (Index k = 0; k < basis.dimension(); ++k) {
    const auto [jl, jr] = basis.pair(k);
    const double p = std::norm(a.amps(k));
    delta[static_cast<std::size_t>(jl - 2)] += p;
    delta[static_cast<std::size_t>(jr - 1)] += p;
  }
  return delta;
}

/// <Z_i> on every site (index i-1 holds site i) in one pass.
inline std::vector<double> sigma_z_profile(const TwoKinkAmplitudes& a, const TwoKinkBasis& basis) {
  std::vector<double> diff(static_cast<std::size_t>(a.L + 1), 0.0);
  for (Index k = 0; k < basis.dimension(); ++k) {
    const auto [jl, jr] = basis.pair(k);
    const double p = std::norm(a.amps(k));
    diff[static_cast<std::size_t>(jl - 1)] += p;
    diff[static_cast<std::size_t>(jr)] -= p;
  }
  std::vector<double> out(static_cast<std::size_t>(a.L));
  double running = 0.0;
  for (int i = 0; i < a.L; ++i) {
    running += diff[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = 1.0 - 2.0 * running;
  }
  return out;
}

/// Reduced density matrix of sites 1..lB in the left basis
///   [ two-kink (jL <= jR < lB) | one-kink (jL <= lB, domain reaching lB) | no-kink ].
/// A label with jR == lB is the same left state as the one-kink state jL, so
/// it is accumulated into the one-kink block.
struct TwoKinkRDM {
  MatrixXcd entries;
  int cut = 0;
  int L = 0;
  std::vector<std::pair<int, int>> two_kink_labels;
  std::vector<int> one_kink_labels;

  [[nodiscard]] Index two_kink_offset() const noexcept { return 0; }
  [[nodiscard]] Index one_kink_offset() const noexcept { return static_cast<Index>(two_kink_labels.size()); }
  [[nodiscard]] Index no_kink_index() const noexcept {
    return static_cast<Index>(two_kink_labels.size() + one_kink_labels.size());
  }
  [[nodiscard]] Index dimension() const noexcept { return entries.rows(); }

  /// Left-subsystem pattern (sites 1..lB) of row `r`.
  [[nodiscard]] SpinPattern row_pattern(Index r) const {
    std::vector<int> spins(static_cast<std::size_t>(cut), 1);
    int first = 0;
    int last = -1;
    if (r < one_kink_offset()) {
      std::tie(first, last) = two_kink_labels[static_cast<std::size_t>(r)];
    } else if (r < no_kink_index()) {
      first = one_kink_labels[static_cast<std::size_t>(r - one_kink_offset())];
      last = cut;
    }
    for (int i = first; i <= last; ++i) spins[static_cast<std::size_t>(i - 1)] = -1;
    return SpinPattern(std::move(spins));
  }

  [[nodiscard]] double purity() const { return entries.cwiseAbs2().sum(); }
  [[nodiscard]] double renyi2() const { return -std::log2(purity()); }
};

inline TwoKinkRDM reduce_twokink(const TwoKinkAmplitudes& a, int cut) {
  const int L = a.L;
  if (cut < 1 || cut >= L) throw RangeError("reduce_twokink: need 1 <= lB < L");
  const TwoKinkBasis basis(L);
  TwoKinkRDM rdm;
  rdm.cut = cut;
  rdm.L = L;
  for (int jl = 2; jl < cut; ++jl)
    for (int jr = jl; jr < cut; ++jr) rdm.two_kink_labels.emplace_back(jl, jr);
  for (int jl = 2; jl <= cut; ++jl) rdm.one_kink_labels.push_back(jl);
  const Index dim = rdm.no_kink_index() + 1;
  rdm.entries = MatrixXcd::Zero(dim, dim);

  auto alpha = [&](int jl, int jr) { return a.amps(basis.index(jl, jr)); };
  auto one_row = [&](int jl) { return rdm.one_kink_offset() + (jl - 2); };
  // Row of a label lying entirely in the left block (jR <= lB).
  std::vector<std::pair<Index, cplx>> left_terms;
  Index t_row = 0;
  for (int jl = 2; jl <= cut && jl <= L - 1; ++jl)
    for (int jr = jl; jr <= cut && jr <= L - 1; ++jr)
      left_terms.emplace_back(jr < cut ? t_row++ : one_row(jl), alpha(jl, jr));

  // (1) left-only labels, no partial-trace sum
  for (const auto& [r, ar] : left_terms)
    for (const auto& [c, ac] : left_terms) rdm.entries(r, c) += ar * std::conj(ac);

  // (2) labels straddling the cut, matched on jR; adds into the one-kink block
  for (int jl = 2; jl <= cut; ++jl)
    for (int jlp = 2; jlp <= cut; ++jlp) {
      cplx acc = 0.0;
      for (int jr = cut + 1; jr < L; ++jr) acc += alpha(jl, jr) * std::conj(alpha(jlp, jr));
      rdm.entries(one_row(jl), one_row(jlp)) += acc;
    }

  // (3) right-only labels
  double no_kink = 0.0;
  for (int jl = cut + 1; jl < L; ++jl)
    for (int jr = jl; jr < L; ++jr) no_kink += std::norm(alpha(jl, jr));
  rdm.entries(rdm.no_kink_index(), rdm.no_kink_index()) += no_kink;

  // (4)/(5) straddling label against the right-only label starting at lB+1
  if (cut + 1 <= L - 1) {
    for (int jl = 2; jl <= cut; ++jl) {
      cplx acc = 0.0;
      for (int jr = cut + 1; jr < L; ++jr) acc += alpha(jl, jr) * std::conj(alpha(cut + 1, jr));
      rdm.entries(one_row(jl), rdm.no_kink_index()) += acc;
      rdm.entries(rdm.no_kink_index(), one_row(jl)) += std::conj(acc);
    }
  }
  return rdm;
}

/// S2 and the kink-sector-projected S2 at one cut, from a compressed
/// coefficient matrix of size at most (lB+1) x (L-lB+1).
///
/// The left-only two-kink rows only couple to the all-up right state and the
/// right-only rows with jL > lB+1 only couple to the all-up left state, so
/// each group collapses to a single row/column of its norm without changing
/// the spectrum of rho. Row groups carry kink charge 2, 1, 0 inside the left
/// block.
struct CutEntropy {
  double s2 = 0.0;
  double s2_projected = 0.0;
};

inline CutEntropy renyi2_twokink_resolved(const TwoKinkAmplitudes& a, const TwoKinkBasis& basis, int cut) {
  const int L = a.L;
  if (cut < 1 || cut >= L) throw RangeError("renyi2_twokink: need 1 <= lB < L");
  const Index n_one = cut - 1;
  const Index n_right = L - 1 - cut;
  // rows: [t, O_2..O_cut, N], cols: [U, P_{cut+1}..P_{L-1}, r]
  MatrixXcd m = MatrixXcd::Zero(n_one + 2, n_right + 2);
  const Index row_n = n_one + 1;
  const Index col_r = n_right + 1;
  double t_norm2 = 0.0;
  double r_norm2 = 0.0;
  for (Index k = 0; k < basis.dimension(); ++k) {
    const auto [jl, jr] = basis.pair(k);
    const cplx v = a.amps(k);
    if (jr < cut)
      t_norm2 += std::norm(v);
    else if (jl <= cut && jr == cut)
      m(1 + (jl - 2), 0) = v;
    else if (jl <= cut)
      m(1 + (jl - 2), 1 + (jr - cut - 1)) = v;
    else if (jl == cut + 1)
      m(row_n, 1 + (jr - cut - 1)) = v;
    else
      r_norm2 += std::norm(v);
  }
  m(0, 0) = std::sqrt(t_norm2);
  m(row_n, col_r) = std::sqrt(r_norm2);
  // |M M^dag|_F = |M^dag M|_F; use whichever Gram matrix is smaller
  auto gram_purity = [](const auto& block) {
    if (block.rows() <= block.cols()) return (block * block.adjoint()).cwiseAbs2().sum();
    return (block.adjoint() * block).cwiseAbs2().sum();
  };
  CutEntropy out;
  out.s2 = -std::log2(gram_purity(m));
  const double projected = std::pow(m.row(0).squaredNorm(), 2) + gram_purity(m.middleRows(1, n_one)) +
                           std::pow(m.row(row_n).squaredNorm(), 2);
  out.s2_projected = -std::log2(projected);
  return out;
}

inline double renyi2_twokink(const TwoKinkAmplitudes& a, int cut) {
  return renyi2_twokink_resolved(a, TwoKinkBasis(a.L), cut).s2;
}

/// Embeds into the dense 2^L space (site 1 most significant, down = 1).
inline exact::DenseState embed_dense(const TwoKinkAmplitudes& a, int dense_limit = exact::kDefaultDenseLimit) {
  exact::check_capacity(a.L, dense_limit);
  const TwoKinkBasis basis(a.L);
  exact::DenseState out{VectorXcd::Zero(Index{1} << a.L), a.L};
  for (Index k = 0; k < basis.dimension(); ++k) {
    const auto [jl, jr] = basis.pair(k);
    std::uint64_t index = 0;
    for (int i = jl; i <= jr; ++i) index |= exact::detail::site_mask(a.L, i);
    out.amplitudes(static_cast<Index>(index)) = a.amps(k);
  }
  return out;
}

}  // namespace kinkasym::twokink
