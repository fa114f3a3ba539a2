#pragma once

// Open-boundary MPS with a single orthogonality center.
//
// Site tensor storage: a dl x (2 dr) column-major matrix whose column index
// is s + 2 r. The same buffer read as a (2 dl) x dr matrix has row index
// l + dl s, so both groupings are free reshapes. Physical index 0 is spin up
// (Z = +1), 1 is spin down.

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "kinkasym/exact.hpp"
#include "kinkasym/linalg.hpp"
#include "kinkasym/model.hpp"

namespace kinkasym::mps {

struct TruncationParams {
  int chi_max = 128;
  double cutoff = 1e-10;  // drop singular values below cutoff * |s|
};

struct Site {
  Index dl = 1;
  Index dr = 1;
  MatrixXcd t;  // dl x 2 dr

  [[nodiscard]] Eigen::Map<const MatrixXcd> left() const { return {t.data(), 2 * dl, dr}; }
  [[nodiscard]] Eigen::Map<const MatrixXcd, 0, Eigen::OuterStride<>> slice(int s) const {
    return {t.data() + dl * s, dl, dr, Eigen::OuterStride<>(2 * dl)};
  }
  static Site from_left(const MatrixXcd& m, Index dl) {
    Site out{dl, m.cols(), MatrixXcd()};
    out.t = Eigen::Map<const MatrixXcd>(m.data(), dl, 2 * m.cols());
    return out;
  }
  static Site from_right(MatrixXcd m) {
    Site out{m.rows(), m.cols() / 2, std::move(m)};
    return out;
  }
};

class MPSState {
 public:
  MPSState() = default;
  MPSState(std::vector<Site> sites, int center, TruncationParams trunc)
      : sites_(std::move(sites)), center_(center), trunc_(trunc) {}

  [[nodiscard]] int size() const noexcept { return static_cast<int>(sites_.size()); }
  [[nodiscard]] int center() const noexcept { return center_; }
  [[nodiscard]] const Site& site(int i) const { return sites_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const TruncationParams& truncation() const noexcept { return trunc_; }
  [[nodiscard]] double truncation_error() const noexcept { return discarded_; }
  [[nodiscard]] bool budget_warning() const noexcept { return budget_warning_; }
  void set_truncation(TruncationParams t) { trunc_ = t; }

  /// Bond dimension between sites i and i+1 (0-based).
  [[nodiscard]] Index bond(int i) const { return site(i).dr; }
  [[nodiscard]] Index max_bond() const {
    Index m = 1;
    for (const auto& s : sites_) m = std::max(m, s.dr);
    return m;
  }

  void move_center(int target) {
    if (target < 0 || target >= size()) throw RangeError("orthogonality center target out of range");
    while (center_ < target) shift_right();
    while (center_ > target) shift_left();
  }

  /// Schmidt values across bond (i, i+1), 0-based, normalized to unit weight.
  [[nodiscard]] VectorXd schmidt_values(int i) {
    if (i < 0 || i + 1 >= size()) throw RangeError("bond index out of range");
    move_center(i);
    const auto sv = linalg::svd(MatrixXcd(sites_[static_cast<std::size_t>(i)].left()));
    return sv.S / sv.S.norm();
  }

  [[nodiscard]] double norm() const {
    MatrixXcd env = MatrixXcd::Ones(1, 1);
    for (const auto& s : sites_) {
      MatrixXcd next = MatrixXcd::Zero(s.dr, s.dr);
      for (int p = 0; p < 2; ++p) next += s.slice(p).adjoint() * env * s.slice(p);
      env = std::move(next);
    }
    return std::sqrt(std::abs(env(0, 0)));
  }

  /// Applies an n-site gate (n = 2 or 3) to sites i..i+n-1. The gate acts on
  /// the local index s_i + 2 s_{i+1} + 4 s_{i+2}. With sweep_right the
  /// center ends on the last site, otherwise on the first.
  void apply_gate(int i, int n, const MatrixXcd& gate, bool sweep_right) {
    if (i < 0 || i + n > size() || n < 1) throw RangeError("gate sites out of range");
    if (center_ < i) move_center(i);
    if (center_ > i + n - 1) move_center(i + n - 1);

    const Index dl = sites_[static_cast<std::size_t>(i)].dl;
    MatrixXcd theta = sites_[static_cast<std::size_t>(i)].left();
    Index rows = 2 * dl;
    for (int k = 1; k < n; ++k) {
      const Site& s = sites_[static_cast<std::size_t>(i + k)];
      MatrixXcd next = theta * s.t;  // (rows) x (2 dr)
      rows *= 2;
      theta = Eigen::Map<MatrixXcd>(next.data(), rows, s.dr);
    }
    const Index dr = theta.cols();
    const Index local = Index{1} << n;
    for (Index r = 0; r < dr; ++r) {
      Eigen::Map<MatrixXcd> block(theta.data() + r * dl * local, dl, local);
      block = (block * gate.transpose()).eval();
    }

    if (sweep_right) {
      // peel sites off the left
      MatrixXcd rest = theta;
      Index left_dim = dl;
      for (int k = 0; k < n - 1; ++k) {
        const Index rest_cols = rest.size() / (2 * left_dim);
        const auto sv = truncated_svd(Eigen::Map<MatrixXcd>(rest.data(), 2 * left_dim, rest_cols));
        sites_[static_cast<std::size_t>(i + k)] = Site::from_left(sv.U, left_dim);
        rest = sv.S.cast<cplx>().asDiagonal() * sv.Vh;
        left_dim = sv.S.size();
      }
      sites_[static_cast<std::size_t>(i + n - 1)] = Site::from_right(Eigen::Map<MatrixXcd>(rest.data(), left_dim, 2 * dr));
      center_ = i + n - 1;
    } else {
      MatrixXcd rest = theta;
      Index right_dim = dr;
      for (int k = n - 1; k > 0; --k) {
        const Index rest_rows = rest.size() / (2 * right_dim);
        const auto sv = truncated_svd(Eigen::Map<MatrixXcd>(rest.data(), rest_rows, 2 * right_dim));
        sites_[static_cast<std::size_t>(i + k)] = Site::from_right(sv.Vh);
        rest = sv.U * sv.S.cast<cplx>().asDiagonal();
        right_dim = sv.S.size();
      }
      sites_[static_cast<std::size_t>(i)] = Site::from_left(Eigen::Map<MatrixXcd>(rest.data(), 2 * dl, right_dim), dl);
      center_ = i;
    }
  }

  /// Max deviation from the isometry conditions implied by the center.
  [[nodiscard]] double canonical_error() const {
    double err = 0.0;
    for (int i = 0; i < center_; ++i) {
      const auto a = site(i).left();
      err = std::max(err, (a.adjoint() * a - MatrixXcd::Identity(a.cols(), a.cols())).cwiseAbs().maxCoeff());
    }
    for (int i = center_ + 1; i < size(); ++i) {
      const auto& b = site(i).t;
      err = std::max(err, (b * b.adjoint() - MatrixXcd::Identity(b.rows(), b.rows())).cwiseAbs().maxCoeff());
    }
    return err;
  }

 private:
  struct Split {
    MatrixXcd U;
    VectorXd S;
    MatrixXcd Vh;
  };

  Split truncated_svd(const MatrixXcd& m) {
    auto sv = linalg::svd(m);
    const double total = sv.S.squaredNorm();
    const double floor = trunc_.cutoff * std::sqrt(total);
    Index keep = sv.S.size();
    while (keep > 1 && sv.S(keep - 1) < floor) --keep;
    if (keep > trunc_.chi_max) {
      budget_warning_ = true;
      keep = trunc_.chi_max;
    }
    const double tail = sv.S.tail(sv.S.size() - keep).squaredNorm();
    discarded_ += total > 0.0 ? tail / total : 0.0;
    Split out{sv.U.leftCols(keep), sv.S.head(keep), sv.Vh.topRows(keep)};
    const double kept = out.S.norm();
    if (kept > 0.0) out.S *= std::sqrt(total) / kept;
    return out;
  }

  void shift_right() {
    Site& a = sites_[static_cast<std::size_t>(center_)];
    Site& b = sites_[static_cast<std::size_t>(center_ + 1)];
    Eigen::HouseholderQR<MatrixXcd> qr(a.left());
    const Index k = std::min(2 * a.dl, a.dr);
    const MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(2 * a.dl, k);
    const MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    a = Site::from_left(q, a.dl);
    b = Site::from_right(r * b.t);
    ++center_;
  }

  void shift_left() {
    Site& a = sites_[static_cast<std::size_t>(center_ - 1)];
    Site& b = sites_[static_cast<std::size_t>(center_)];
    Eigen::HouseholderQR<MatrixXcd> qr(b.t.adjoint());
    const Index k = std::min(2 * b.dr, b.dl);
    const MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(2 * b.dr, k);
    const MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    b = Site::from_right(q.adjoint());
    a = Site::from_left(MatrixXcd(a.left()) * r.adjoint(), a.dl);
    --center_;
  }

  std::vector<Site> sites_;
  int center_ = 0;
  TruncationParams trunc_;
  double discarded_ = 0.0;
  bool budget_warning_ = false;
};

using Snapshot = std::shared_ptr<const MPSState>;
inline Snapshot snapshot(const MPSState& state) { return std::make_shared<const MPSState>(state); }

inline MPSState mps_from_pattern(const SpinPattern& p, TruncationParams trunc = {}) {
  std::vector<Site> sites;
  for (int i = 1; i <= p.size(); ++i) {
    Site s{1, 1, MatrixXcd::Zero(1, 2)};
    s.t(0, p(i) == 1 ? 0 : 1) = 1.0;
    sites.push_back(std::move(s));
  }
  return MPSState(std::move(sites), 0, trunc);
}

/// Exact MPS of a dense state by successive SVDs (center on the last site).
inline MPSState mps_from_dense(const exact::DenseState& psi, TruncationParams trunc = {}) {
  const int L = psi.L;
  std::vector<Site> sites;
  // dense index has site 1 as the most significant bit; peel from the left
  MatrixXcd rest = psi.amplitudes.transpose();  // 1 x 2^L, column = s1 s2 .. sL (binary)
  Index dl = 1;
  for (int i = 0; i < L - 1; ++i) {
    const Index right_states = Index{1} << (L - i - 1);
    // rest(a, s_i * right_states + tail) -> matrix rows a + dl s_i
    MatrixXcd m(2 * dl, right_states);
    for (Index a = 0; a < dl; ++a)
      for (int s = 0; s < 2; ++s) m.row(a + dl * s) = rest.row(a).segment(s * right_states, right_states);
    auto sv = linalg::svd(m);
    Index keep = 0;
    while (keep < sv.S.size() && sv.S(keep) > 1e-14 * sv.S(0)) ++keep;
    keep = std::max<Index>(keep, 1);
    sites.push_back(Site::from_left(sv.U.leftCols(keep), dl));
    rest = sv.S.head(keep).cast<cplx>().asDiagonal() * sv.Vh.topRows(keep);
    dl = keep;
  }
  sites.push_back(Site::from_right(Eigen::Map<MatrixXcd>(rest.data(), dl, 2)));
  return MPSState(std::move(sites), L - 1, trunc);
}

inline exact::DenseState to_dense(const MPSState& mps) {
  const int L = mps.size();
  exact::check_capacity(L, exact::kDefaultDenseLimit);
  // rows: configurations of sites processed so far (site 1 most significant)
  MatrixXcd acc = MatrixXcd::Ones(1, 1);
  for (int i = 0; i < L; ++i) {
    const Site& s = mps.site(i);
    MatrixXcd next(acc.rows() * 2, s.dr);
    for (Index c = 0; c < acc.rows(); ++c)
      for (int p = 0; p < 2; ++p) next.row(2 * c + p) = acc.row(c) * s.slice(p);
    acc = std::move(next);
  }
  return exact::DenseState{acc.col(0), L};
}

inline double renyi2_at_cut(MPSState& mps, int cut) {
  if (cut < 1 || cut >= mps.size()) throw RangeError("renyi2_at_cut: need 1 <= l_B < L");
  const VectorXd s = mps.schmidt_values(cut - 1);
  return -std::log2(s.array().pow(4).sum());
}

inline double renyi2_at_cut(const MPSState& mps, int cut) {
  MPSState copy = mps;
  return renyi2_at_cut(copy, cut);
}

/// S2 at cuts 1..L-1 in one left-to-right sweep.
inline std::vector<double> renyi2_all_cuts(MPSState& mps) {
  std::vector<double> out;
  for (int cut = 1; cut < mps.size(); ++cut) out.push_back(renyi2_at_cut(mps, cut));
  return out;
}

/// <Z_i> for all sites and <Z_i Z_{i+1}> for all links, by one sweep.
struct LocalZ {
  std::vector<double> z;
  std::vector<double> zz;
};

inline LocalZ local_z(MPSState& mps) {
  const int L = mps.size();
  LocalZ out;
  out.z.resize(static_cast<std::size_t>(L));
  out.zz.resize(static_cast<std::size_t>(L - 1));
  for (int i = 0; i < L; ++i) {
    mps.move_center(i);
    const Site& a = mps.site(i);
    out.z[static_cast<std::size_t>(i)] = a.slice(0).squaredNorm() - a.slice(1).squaredNorm();
    if (i + 1 < L) {
      const Site& b = mps.site(i + 1);
      double acc = 0.0;
      for (int s = 0; s < 2; ++s)
        for (int p = 0; p < 2; ++p) acc += (s == p ? 1.0 : -1.0) * (a.slice(s) * b.slice(p)).squaredNorm();
      out.zz[static_cast<std::size_t>(i)] = acc;
    }
  }
  return out;
}

inline double kink_number_expectation(MPSState& mps) {
  double n = 0.0;
  for (double zz : local_z(mps).zz) n += 0.5 * (1.0 - zz);
  return n;
}

inline double kink_number_expectation(const MPSState& mps) {
  MPSState copy = mps;
  return kink_number_expectation(copy);
}

/// CNOT with control on the first site of the pair, local index s_c + 2 s_t.
inline MatrixXcd cnot_gate() {
  MatrixXcd g = MatrixXcd::Zero(4, 4);
  g(0, 0) = 1.0;  // (0,0) -> (0,0)
  g(3, 1) = 1.0;  // (1,0) -> (1,1)
  g(2, 2) = 1.0;  // (0,1) -> (0,1)
  g(1, 3) = 1.0;  // (1,1) -> (1,0)
  return g;
}

/// KW ladder: control L-1 -> L first, control 1 -> 2 last.
inline MPSState kw_apply(MPSState mps) {
  const MatrixXcd g = cnot_gate();
  for (int i = mps.size() - 2; i >= 0; --i) mps.apply_gate(i, 2, g, false);
  return mps;
}

}  // namespace kinkasym::mps
