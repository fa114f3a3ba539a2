#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "kinkasym/exact.hpp"
#include "kinkasym/fermion.hpp"
#include "kinkasym/twokink.hpp"
#include "oracles/pauli_oracle.hpp"

using namespace kinkasym;
using twokink::TwoKinkAmplitudes;
using twokink::TwoKinkBasis;

namespace {

TwoKinkAmplitudes random_amps(int L, std::mt19937& rng) {
  return TwoKinkAmplitudes{oracle::random_state(TwoKinkBasis(L).dimension(), rng), L};
}

SpinPattern label_pattern(int L, int jl, int jr) {
  std::vector<int> s(static_cast<std::size_t>(L), 1);
  for (int i = jl; i <= jr; ++i) s[static_cast<std::size_t>(i - 1)] = -1;
  return SpinPattern(std::move(s));
}

/// H2 from single spin flips of the full model: flipping site i of a
/// two-kink pattern (with J = -g) has amplitude -g (1 - s_{i-1} s_{i+1}),
/// and only moves that land on another interior single domain are kept.
MatrixXd h2_from_spin_flips(const ModelParams& p) {
  const TwoKinkBasis basis(p.L);
  MatrixXd H = MatrixXd::Zero(basis.dimension(), basis.dimension());
  for (Index a = 0; a < basis.dimension(); ++a) {
    const auto [jl, jr] = basis.pair(a);
    const auto pat = label_pattern(p.L, jl, jr);
    H(a, a) = 2.0 * p.h * (jr - jl + 1);
    for (int i = 2; i <= p.L - 1; ++i) {
      std::vector<int> s(pat.spins().begin(), pat.spins().end());
      const double amp = -p.g - p.J * s[static_cast<std::size_t>(i - 2)] * s[static_cast<std::size_t>(i)];
      s[static_cast<std::size_t>(i - 1)] *= -1;
      const SpinPattern flipped(s);
      if (kink_count(flipped) != 2 || flipped(1) != 1 || flipped(p.L) != 1) continue;
      const auto target = TwoKinkAmplitudes::from_pattern(flipped);
      Index b = 0;
      target.amps.cwiseAbs().maxCoeff(&b);
      H(b, a) += amp;
    }
  }
  return H;
}

MatrixXcd embedding(int L) {
  const TwoKinkBasis basis(L);
  MatrixXcd P(Index{1} << L, basis.dimension());
  for (Index k = 0; k < basis.dimension(); ++k) {
    const auto [jl, jr] = basis.pair(k);
    P.col(k) = twokink::embed_dense(TwoKinkAmplitudes::from_labels(L, jl, jr)).amplitudes;
  }
  return P;
}

}  // namespace

TEST(TwoKinkBasis, DimensionAndExhaustiveRoundTrip) {
  for (int L = 4; L <= 40; ++L) {
    const TwoKinkBasis basis(L);
    ASSERT_EQ(basis.dimension(), (L - 1) * (L - 2) / 2);
    for (Index k = 0; k < basis.dimension(); ++k) {
      const auto [jl, jr] = basis.pair(k);
      ASSERT_TRUE(1 < jl && jl <= jr && jr < L);
      ASSERT_EQ(basis.index(jl, jr), k);
    }
  }
  EXPECT_THROW((void)TwoKinkBasis(10).index(1, 3), RangeError);
  EXPECT_THROW((void)TwoKinkBasis(10).index(4, 10), RangeError);
  EXPECT_THROW((void)TwoKinkBasis(10).index(5, 4), RangeError);
}

TEST(TwoKinkBasis, DomainWallLabels) {
  const auto a = TwoKinkAmplitudes::from_pattern(build_domain_wall(10, 5, 2));
  EXPECT_EQ(a.amps(TwoKinkBasis(10).index(5, 6)), cplx(1.0));
  EXPECT_THROW(TwoKinkAmplitudes::from_pattern(SpinPattern::parse("uduudu")), RangeError);
}

TEST(BuildH2, SmallChainMatchesSpinFlipRules) {
  const ModelParams p{1.0, 0.4, 0.3, -0.4, 5};
  const MatrixXd H = twokink::build_h2(p);
  ASSERT_EQ(H.rows(), 6);
  EXPECT_LT((H - h2_from_spin_flips(p)).cwiseAbs().maxCoeff(), 1e-15);
  const TwoKinkBasis basis(5);
  const Index mid = basis.index(3, 3);
  EXPECT_DOUBLE_EQ(H(mid, mid), 2.0 * 0.3);
  EXPECT_DOUBLE_EQ(H(basis.index(2, 3), mid), -0.8);
  EXPECT_DOUBLE_EQ(H(basis.index(3, 4), mid), -0.8);
  EXPECT_DOUBLE_EQ(H(basis.index(2, 2), mid), 0.0);
  for (int L = 6; L <= 12; ++L) {
    const ModelParams q{1.0, 0.7, 0.05, -0.7, L};
    EXPECT_LT((twokink::build_h2(q) - h2_from_spin_flips(q)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(BuildH2, EqualsProjectedDenseHamiltonianUpToOffset) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int L = 8;
  const MatrixXcd P = embedding(L);
  for (int trial = 0; trial < 4; ++trial) {
    ModelParams p{1.0, u(rng), u(rng), 0.0, L};
    p.J = -p.g;
    const MatrixXcd H = exact::build_hamiltonian(p).cast<cplx>();
    // the sector is invariant ...
    EXPECT_LT((H * P - P * (P.adjoint() * H * P)).norm(), 1e-10);
    // ... and H restricted to it is H2 plus a constant
    const MatrixXd restricted = (P.adjoint() * H * P).real();
    const MatrixXd shifted =
        twokink::build_h2(p) + twokink::h2_energy_offset(p) * MatrixXd::Identity(restricted.rows(), restricted.cols());
    EXPECT_LT((restricted - shifted).cwiseAbs().maxCoeff(), 1e-10);
    const auto e_dense = linalg::symmetric_eigen(restricted).values;
    const auto e_h2 = linalg::symmetric_eigen(twokink::build_h2(p)).values;
    EXPECT_LT((e_dense - (e_h2.array() + twokink::h2_energy_offset(p)).matrix()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(BuildH2, FreeSpectrumIsPairSumsOfHoppingModes) {
  const ModelParams p{1.0, 0.6, 0.0, -0.6, 12};
  const auto eps = linalg::symmetric_eigen(fermion::hopping_matrix(p)).values;
  std::vector<double> sums;
  for (Index a = 0; a < eps.size(); ++a)
    for (Index b = a + 1; b < eps.size(); ++b) sums.push_back(eps(a) + eps(b) + 4.0 * p.J0);  // drop 2 x (-2 J0)
  std::sort(sums.begin(), sums.end());
  const auto e_h2 = linalg::symmetric_eigen(twokink::build_h2(p)).values;
  ASSERT_EQ(static_cast<std::size_t>(e_h2.size()), sums.size());
  for (std::size_t k = 0; k < sums.size(); ++k) EXPECT_NEAR(e_h2(static_cast<Index>(k)), sums[k], 1e-10);
}

TEST(EvolveTwoKink, IdentityAndClassicalPhases) {
  std::mt19937 rng(6);
  const auto a0 = random_amps(9, rng);
  const ModelParams p{1.0, 0.7, 0.1, -0.7, 9};
  EXPECT_LT((twokink::evolve_twokink(a0, twokink::build_h2(p), 0.0).amps - a0.amps).norm(), 1e-12);

  const twokink::TwoKinkPropagator classical(twokink::build_h2({1.0, 0.0, 0.2, 0.0, 9}));
  for (double t : {1.0, 7.5}) {
    const auto a = classical.evolve(a0, t);
    EXPECT_LT((a.amps.cwiseAbs() - a0.amps.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(EvolveTwoKink, BatchedPropagationMatchesMatrixExponential) {
  std::mt19937 rng(10);
  const ModelParams p{1.0, 0.7, 0.1, -0.7, 12};
  const MatrixXd h2 = twokink::build_h2(p);
  const auto a0 = random_amps(12, rng);
  std::vector<double> times;
  for (int k = 0; k < 150; ++k) times.push_back(0.13 * k);
  const auto out = twokink::TwoKinkPropagator(h2).evolve_many(a0, times);
  for (std::size_t k = 0; k < times.size(); k += 37) {
    const VectorXcd ref = oracle::matrix_exp_hermitian(h2.cast<cplx>(), times[k]) * a0.amps;
    EXPECT_LT((out[k].amps - ref).norm(), 1e-10);
    EXPECT_NEAR(out[k].norm(), 1.0, 1e-10);
  }
}

TEST(EvolveTwoKink, MatchesExactEngineOnTheConservingLine) {
  const ModelParams p{1.0, 0.7, 0.1, -0.7, 10};
  const auto pattern = build_domain_wall(10, 5, 2);
  const exact::Propagator dense(exact::build_hamiltonian(p));
  const twokink::TwoKinkPropagator sector(twokink::build_h2(p));
  const auto psi0 = exact::DenseState::basis(pattern);
  const auto a0 = TwoKinkAmplitudes::from_pattern(pattern);
  for (double t = 0.0; t <= 20.0; t += 0.5) {
    const auto psi = dense.evolve(psi0, t);
    const auto a = sector.evolve(a0, t);
    EXPECT_NEAR(twokink::sigma_z_twokink(a, 3), exact::sigma_z_expectation(psi, 3), 1e-8);
    EXPECT_NEAR(twokink::kink_density_twokink(a, 3), exact::kink_density(psi, 3), 1e-8);
    EXPECT_NEAR(twokink::renyi2_twokink(a, 5), exact::renyi2(exact::reduce(psi, 5)), 1e-8);
    // amplitudes agree up to the dropped constant energy
    const VectorXcd phased = std::exp(cplx(0, -twokink::h2_energy_offset(p) * t)) * a.amps;
    EXPECT_LT((twokink::embed_dense(TwoKinkAmplitudes{phased, 10}).amplitudes - psi.amplitudes).norm(), 1e-8);
  }
}

TEST(ReduceTwoKink, PureLabelsOnEitherSide) {
  const auto left = reduce_twokink(TwoKinkAmplitudes::from_labels(10, 3, 4), 6);
  EXPECT_NEAR(left.renyi2(), 0.0, 1e-14);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(left.entries, Eigen::EigenvaluesOnly);
  EXPECT_NEAR(es.eigenvalues().maxCoeff(), 1.0, 1e-14);

  const auto right = reduce_twokink(TwoKinkAmplitudes::from_labels(10, 7, 8), 5);
  MatrixXcd expected = MatrixXcd::Zero(right.dimension(), right.dimension());
  expected(right.no_kink_index(), right.no_kink_index()) = 1.0;
  EXPECT_LT((right.entries - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ReduceTwoKink, BlockLayout) {
  const auto rdm = reduce_twokink(TwoKinkAmplitudes::from_labels(10, 3, 4), 6);
  // two-kink block jL <= jR < 6 (10 labels), one-kink block jL = 2..6, no-kink
  EXPECT_EQ(rdm.two_kink_labels.size(), 10U);
  EXPECT_EQ(rdm.one_kink_labels.size(), 5U);
  EXPECT_EQ(rdm.dimension(), 6 * 5 / 2 + 1);
  EXPECT_EQ(rdm.row_pattern(rdm.one_kink_offset()).to_string(), "uddddd");
  EXPECT_EQ(rdm.row_pattern(rdm.no_kink_index()).to_string(), "uuuuuu");
  EXPECT_EQ(rdm.row_pattern(0).to_string(), "uduuuu");
}

TEST(ReduceTwoKink, MatchesDensePartialTraceOnEmbeddedStates) {
  std::mt19937 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const int L = 8;
    const auto a = random_amps(L, rng);
    const auto psi = twokink::embed_dense(a);
    for (int cut = 1; cut < L; ++cut) {
      const auto rdm = reduce_twokink(a, cut);
      const auto dense = exact::reduce(psi, cut);
      // map every block row back to its basis configuration
      std::vector<Index> rows;
      for (Index r = 0; r < rdm.dimension(); ++r) rows.push_back(static_cast<Index>(rdm.row_pattern(r).to_index()));
      MatrixXcd mapped = MatrixXcd::Zero(dense.entries.rows(), dense.entries.cols());
      for (Index r = 0; r < rdm.dimension(); ++r)
        for (Index c = 0; c < rdm.dimension(); ++c) mapped(rows[r], rows[c]) = rdm.entries(r, c);
      EXPECT_LT((mapped - dense.entries).cwiseAbs().maxCoeff(), 1e-12) << "cut " << cut;
      EXPECT_NEAR(rdm.renyi2(), exact::renyi2(dense), 1e-12);
      EXPECT_TRUE((exact::DensityMatrix{rdm.entries, cut}.is_valid()));
    }
  }
}

TEST(ReduceTwoKink, CompressedPurityAndKinkProjection) {
  std::mt19937 rng(15);
  for (int L : {6, 9, 10}) {
    const auto a = random_amps(L, rng);
    const TwoKinkBasis basis(L);
    const auto psi = twokink::embed_dense(a);
    for (int cut = 1; cut < L; ++cut) {
      const auto r = twokink::renyi2_twokink_resolved(a, basis, cut);
      EXPECT_NEAR(r.s2, reduce_twokink(a, cut).renyi2(), 1e-12);
      const auto rho = exact::reduce(psi, cut);
      EXPECT_NEAR(r.s2_projected, exact::renyi2(exact::project_charge(rho, {ChargeKind::LinkKink, cut})), 1e-12);
    }
  }
}

TEST(TwoKinkObservables, PureStateAndSumRule) {
  const auto a = TwoKinkAmplitudes::from_labels(10, 5, 6);
  for (int i = 1; i < 10; ++i) EXPECT_DOUBLE_EQ(twokink::kink_density_twokink(a, i), (i == 4 || i == 6) ? 1.0 : 0.0);
  std::mt19937 rng(16);
  const auto r = random_amps(14, rng);
  const TwoKinkBasis basis(14);
  const auto delta = twokink::kink_density_profile(r, basis);
  double sum = 0.0;
  for (double d : delta) sum += d;
  EXPECT_NEAR(sum, 2.0, 1e-12);
  const auto z = twokink::sigma_z_profile(r, basis);
  for (int i = 1; i <= 14; ++i) {
    EXPECT_NEAR(z[static_cast<std::size_t>(i - 1)], twokink::sigma_z_twokink(r, i), 1e-14);
    if (i < 14) EXPECT_NEAR(delta[static_cast<std::size_t>(i - 1)], twokink::kink_density_twokink(r, i), 1e-14);
  }
}

TEST(TwoKinkObservables, MatchDenseEngineOnEmbeddedStates) {
  std::mt19937 rng(18);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_amps(8, rng);
    const auto psi = twokink::embed_dense(a);
    for (int i = 1; i <= 8; ++i) {
      EXPECT_NEAR(twokink::sigma_z_twokink(a, i), exact::sigma_z_expectation(psi, i), 1e-12);
      if (i < 8) EXPECT_NEAR(twokink::kink_density_twokink(a, i), exact::kink_density(psi, i), 1e-12);
    }
  }
}

TEST(TwoKinkBound, FreeEvolutionNeverExceedsTwo) {
  const int L = 30;
  for (double g : {0.3, 0.7}) {
    const ModelParams p{1.0, g, 0.0, -g, L};
    const twokink::TwoKinkPropagator prop(twokink::build_h2(p));
    const TwoKinkBasis basis(L);
    for (auto [j, n] : {std::pair{14, 2}, std::pair{5, 9}, std::pair{2, 27}}) {
      const auto a0 = TwoKinkAmplitudes::from_pattern(build_domain_wall(L, j, n));
      std::vector<double> times;
      for (int k = 0; k <= 400; ++k) times.push_back(0.5 * k);
      for (const auto& a : prop.evolve_many(a0, times))
        for (int cut = 1; cut < L; ++cut) ASSERT_LE(twokink::renyi2_twokink_resolved(a, basis, cut).s2, 2.0 + 1e-9);
    }
  }
}
