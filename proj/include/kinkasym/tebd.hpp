#pragma once

// Trotterized time evolution with three-site gates. Term i (0-based,
// i = 0..L-3) lives on sites i, i+1, i+2 and carries the X and ZXZ terms
// centred on i+1, the ZZ bond (i, i+1) and the field on site i; the last
// term also takes the remaining ZZ bond and the fields on the last two
// sites. With J = -g every term conserves the kink number on its own.

#include <cmath>
#include <map>
#include <vector>

#include "kinkasym/linalg.hpp"
#include "kinkasym/model.hpp"
#include "kinkasym/mps.hpp"

namespace kinkasym::mps {

/// Local Hamiltonian of term i in the basis s_i + 2 s_{i+1} + 4 s_{i+2}.
inline MatrixXcd local_term(const ModelParams& p, int i) {
  const int L = p.L;
  const bool last = (i == L - 3);
  MatrixXcd h = MatrixXcd::Zero(8, 8);
  for (int b = 0; b < 8; ++b) {
    const double z0 = (b & 1) ? -1.0 : 1.0;
    const double z1 = (b & 2) ? -1.0 : 1.0;
    const double z2 = (b & 4) ? -1.0 : 1.0;
    double diag = -p.J0 * z0 * z1 - p.h * z0;
    if (last) diag += -p.J0 * z1 * z2 - p.h * z1 - p.h * z2;
    h(b, b) = diag;
    // flip the middle spin
    h(b ^ 2, b) += -p.g - p.J * z0 * z2;
  }
  return h;
}

class TebdEvolver {
 public:
  TebdEvolver(const ModelParams& params, double dt, int order = 2) : params_(params), dt_(dt), order_(order) {
    params_.validate();
    if (!(dt > 0.0)) throw RangeError("tebd: dt must be positive");
    if (order != 2 && order != 4) throw RangeError("tebd: trotter order must be 2 or 4");
  }

  [[nodiscard]] double dt() const noexcept { return dt_; }
  [[nodiscard]] int order() const noexcept { return order_; }

  void step(MPSState& mps) {
    if (order_ == 2) {
      second_order(mps, dt_);
      return;
    }
    const double p = 1.0 / (4.0 - std::cbrt(4.0));
    second_order(mps, p * dt_);
    second_order(mps, p * dt_);
    second_order(mps, (1.0 - 4.0 * p) * dt_);
    second_order(mps, p * dt_);
    second_order(mps, p * dt_);
  }

  /// Advances by `duration` in whole steps; the remainder (if any) is taken
  /// as one shorter step.
  void evolve(MPSState& mps, double duration) {
    if (duration < 0.0) throw RangeError("tebd: negative duration");
    const auto n = static_cast<long>(std::floor(duration / dt_ + 1e-9));
    for (long k = 0; k < n; ++k) step(mps);
    const double rest = duration - static_cast<double>(n) * dt_;
    if (rest > 1e-12 * dt_) {
      TebdEvolver tail(params_, rest, order_);
      tail.step(mps);
    }
  }

 private:
  void second_order(MPSState& mps, double tau) {
    layer(mps, 0, 0.5 * tau);
    layer(mps, 1, 0.5 * tau);
    layer(mps, 2, tau);
    layer(mps, 1, 0.5 * tau);
    layer(mps, 0, 0.5 * tau);
  }

  const std::vector<MatrixXcd>& gates(double tau) {
    auto it = cache_.find(tau);
    if (it != cache_.end()) return it->second;
    std::vector<MatrixXcd> g;
    for (int i = 0; i + 2 < params_.L; ++i) g.push_back(linalg::hermitian_exp(local_term(params_, i), cplx(0.0, -tau)));
    return cache_.emplace(tau, std::move(g)).first->second;
  }

  void layer(MPSState& mps, int group, double tau) {
    const auto& g = gates(tau);
    std::vector<int> sites;
    for (int i = group; i + 2 < params_.L; i += 3) sites.push_back(i);
    if (sites.empty()) return;
    const bool rightward = mps.center() <= (sites.front() + sites.back() + 2) / 2;
    if (rightward) {
      for (int i : sites) mps.apply_gate(i, 3, g[static_cast<std::size_t>(i)], true);
    } else {
      for (auto it = sites.rbegin(); it != sites.rend(); ++it) mps.apply_gate(*it, 3, g[static_cast<std::size_t>(*it)], false);
    }
  }

  ModelParams params_;
  double dt_;
  int order_;
  std::map<double, std::vector<MatrixXcd>> cache_;
};

inline void tebd_step(MPSState& mps, const ModelParams& params, double dt, int order = 2) {
  TebdEvolver(params, dt, order).step(mps);
}

}  // namespace kinkasym::mps
