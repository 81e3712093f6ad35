#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qtomo/estimators.hpp"
#include "qtomo/metrics.hpp"
#include "qtomo/povm.hpp"

using namespace qtomo;

namespace {

const Eigen::Vector3d kFig1(0.6886, 0.1137, -0.5025);

double min_eig_traceless(const Superoperator& s) {
  return oracle::min_eig(traceless_block(0.5 * (s + s.transpose())));
}

// Covariance of sum_k f_k Theta_k from the multinomial covariance, written
// directly as sum p Theta Theta - rho rho in matrix space.
Superoperator direct_mse(const Povm& p, const std::vector<OperatorKet>& theta, const CMatrix& rho) {
  const auto& b = gell_mann_basis(p.dim());
  const int n = b.size();
  Superoperator c = Superoperator::Zero(n, n);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double pk = (p[k] * rho).trace().real();
    c += pk * theta[k] * theta[k].transpose();
  }
  const OperatorKet r = b.vectorize(rho);
  return c - r * r.transpose();
}

}  // namespace

TEST(Frequencies, Validation) {
  EXPECT_THROW(Frequencies(std::vector<std::uint64_t>{}), ValidationError);
  EXPECT_THROW(Frequencies({0, 0, 0}), ValidationError);
  const Frequencies f({3, 1, 0, 4});
  EXPECT_EQ(f.shots(), 8u);
  EXPECT_TRUE(f.has_zero());
  EXPECT_NEAR(f.values().sum(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(f.values()(3), 0.5);
}

TEST(ParseEstimator, Aliases) {
  EXPECT_EQ(parse_estimator("blue1"), EstimatorKind::blue_oracle);
  EXPECT_EQ(parse_estimator("blue2"), EstimatorKind::blue_plugin);
  EXPECT_EQ(parse_estimator("mle"), EstimatorKind::mle);
  EXPECT_THROW(parse_estimator("lsq"), ValidationError);
}

TEST(CanonicalRecon, TetrahedronClosedForm) {
  const Povm p = platonic_povm("tetrahedron");
  const auto recon = canonical_recon(p);
  const auto v = platonic_vertices(PlatonicSolid::tetrahedron);
  for (std::size_t k = 0; k < 4; ++k) {
    CMatrix expect = 0.5 * CMatrix::Identity(2, 2);
    for (int i = 0; i < 3; ++i) expect += 1.5 * v[k](i) * oracle::pauli(i);
    EXPECT_LT((recon.operators[k] - expect).norm(), 1e-12);
  }
  EXPECT_LT(recon.unbiasedness_residual(p), 1e-9);
}

TEST(CanonicalRecon, MubQutrit) {
  const Povm p = mub_povm(3);
  const auto recon = canonical_recon(p);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const CMatrix proj = p[k] * 4.0;  // weight 1/(d+1)
    EXPECT_LT((recon.operators[k] - (4.0 * proj - CMatrix::Identity(3, 3))).norm(), 1e-10);
  }
}

TEST(CanonicalRecon, NotInformationallyComplete) {
  std::vector<CMatrix> trine;
  for (int k = 0; k < 3; ++k) {
    const double a = 2.0 * M_PI * k / 3.0;
    trine.push_back(oracle::qubit({std::cos(a), 0, std::sin(a)}) * (2.0 / 3.0));
  }
  EXPECT_THROW(canonical_recon(Povm(trine)), NotInformationallyComplete);
}

TEST(Cle, ExactProbabilitiesAndExtremeCounts) {
  std::mt19937_64 rng(11);
  for (const char* name : {"tetrahedron", "cube", "sic3", "mub3"}) {
    const Povm p = builtin_povm(name);
    const CMatrix rho = oracle::random_state(p.dim(), rng);
    const auto r = cle(p, Frequencies::exact(p.probabilities(rho)));
    EXPECT_LT((r.estimate - rho).cwiseAbs().maxCoeff(), 1e-10) << name;
  }
  const Povm tet = platonic_povm("tetrahedron");
  const auto r = cle(tet, Frequencies({10, 0, 0, 0}));
  EXPECT_LT((r.estimate - canonical_recon(tet).operators[0]).norm(), 1e-12);
  EXPECT_NEAR(r.estimate.trace().real(), 1.0, 1e-12);
  EXPECT_LT(hermitian_eigenvalues(r.estimate).minCoeff(), -0.5);
}

TEST(OptimalRecon, ReducesToCanonicalAtMaximallyMixed) {
  for (const char* name : {"cube", "icosahedron", "sic3", "mub3"}) {
    const Povm p = builtin_povm(name);
    const auto a = optimal_recon(p, maximally_mixed(p.dim()));
    const auto b = canonical_recon(p);
    for (std::size_t k = 0; k < p.size(); ++k)
      EXPECT_LT((a.operators[k] - b.operators[k]).norm(), 1e-10) << name;
  }
}

TEST(OptimalRecon, TraceAndResolutionIdentities) {
  const Povm oct = platonic_povm("octahedron");
  const auto d = optimal_recon(oct, oracle::qubit({0, 0, 0.7}));
  for (const auto& t : d.operators) EXPECT_NEAR(t.trace().real(), 1.0, 1e-9);
  const Povm cube = platonic_povm("cube");
  const auto c = optimal_recon(cube, oracle::qubit(kFig1));
  CMatrix sum = CMatrix::Zero(2, 2);
  for (std::size_t k = 0; k < cube.size(); ++k) {
    sum += cube.weights()[k] * c.operators[k];
    EXPECT_NEAR(c.operators[k].trace().real(), 1.0, 1e-9);
  }
  EXPECT_LT((sum - CMatrix::Identity(2, 2)).norm(), 1e-9);
  EXPECT_LT(c.unbiasedness_residual(cube), 1e-9);
  EXPECT_THROW(optimal_recon(oct, oracle::qubit({0, 0, 1})), BoundaryStateError);
}

TEST(Blue, ExactFrequenciesAllModes) {
  std::mt19937_64 rng(5);
  for (const char* name : {"cube", "sic3"}) {
    const Povm p = builtin_povm(name);
    const CMatrix rho = oracle::random_state(p.dim(), rng);
    const auto f = Frequencies::exact(p.probabilities(rho), 1000);
    for (auto mode : {EstimatorKind::blue_oracle, EstimatorKind::blue_plugin, EstimatorKind::blue_twostep}) {
      BlueOptions o;
      o.mode = mode;
      o.rho_true = rho;
      const auto r = blue(p, f, o);
      EXPECT_LT((r.estimate - rho).cwiseAbs().maxCoeff(), 1e-10) << name << ' ' << to_string(mode);
    }
  }
}

TEST(Blue, OracleRequiresInteriorState) {
  const Povm cube = platonic_povm("cube");
  BlueOptions o;
  o.mode = EstimatorKind::blue_oracle;
  o.rho_true = oracle::qubit({1, 0, 0});
  EXPECT_THROW(blue(cube, Frequencies({1, 1, 1, 1, 1, 1, 1, 1}), o), BoundaryStateError);
  o.rho_true.reset();
  EXPECT_THROW(blue(cube, Frequencies({1, 1, 1, 1, 1, 1, 1, 1}), o), ValidationError);
}

TEST(Blue, PluginZeroFrequencyPolicy) {
  const Povm tet = platonic_povm("tetrahedron");
  const Frequencies f({5, 3, 2, 0});
  BlueOptions o;
  o.mode = EstimatorKind::blue_plugin;
  const auto r = blue(tet, f, o);
  EXPECT_NEAR(r.estimate.trace().real(), 1.0, 1e-12);
  // Regularized weights (n + 1/2)/(N + K/2), built independently here.
  RVector q(4);
  q << 5.5, 3.5, 2.5, 0.5;
  q /= 12.0;
  const auto recon = weighted_recon(tet, q, ReconstructionMode::blue_plugin);
  EXPECT_LT((r.estimate - recon.estimate(f.values())).norm(), 1e-12);
  o.zero_policy = ZeroFrequencyPolicy::error;
  EXPECT_THROW(blue(tet, f, o), BoundaryStateError);
}

TEST(Mle, ExactFrequenciesRecoverInteriorState) {
  std::mt19937_64 rng(3);
  for (const char* name : {"tetrahedron", "cube", "mub3"}) {
    const Povm p = builtin_povm(name);
    const CMatrix rho = oracle::random_state(p.dim(), rng);
    const auto r = mle(p, Frequencies::exact(p.probabilities(rho)));
    EXPECT_TRUE(r.converged) << name;
    EXPECT_LT((r.estimate - rho).cwiseAbs().maxCoeff(), 1e-5) << name;
    EXPECT_NEAR(r.estimate.trace().real(), 1.0, 1e-10);
    EXPECT_GT(hermitian_eigenvalues(r.estimate).minCoeff(), -1e-10);
  }
}

TEST(Mle, ExtremeCountsGiveBoundaryPureState) {
  const Povm tet = platonic_povm("tetrahedron");
  const Frequencies f({20, 0, 0, 0});
  MleOptions opt;
  opt.max_iter = 20000;
  const auto r = mle(tet, f, opt);
  EXPECT_GT(hermitian_eigenvalues(r.estimate).minCoeff(), -1e-10);
  // Grid oracle: maximize ln p_1 over a fine grid of the Bloch ball.
  const Eigen::Vector3d v1 = platonic_vertices(PlatonicSolid::tetrahedron)[0];
  double best = -1e300;
  Eigen::Vector3d arg = Eigen::Vector3d::Zero();
  const int m = 40;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      for (int k = -m; k <= m; ++k) {
        const Eigen::Vector3d s(double(i) / m, double(j) / m, double(k) / m);
        if (s.norm() > 1.0) continue;
        const double ll = std::log((1.0 + v1.dot(s)) / 4.0);
        if (ll > best) {
          best = ll;
          arg = s;
        }
      }
  const Eigen::Vector3d got = oracle::bloch(r.estimate);
  EXPECT_LT((arg - v1).norm(), 2.0 * std::sqrt(3.0) / m);
  EXPECT_LT((got - v1).norm(), 1e-3);
  EXPECT_GE(mean_log_likelihood(tet, f.values(), r.estimate), best - 1e-9);
}

TEST(Mle, LikelihoodNotBelowOtherStates) {
  const Povm cube = platonic_povm("cube");
  const Frequencies f({30, 10, 12, 8, 25, 5, 6, 4});
  const auto r = mle(cube, f);
  const double ll = mean_log_likelihood(cube, f.values(), r.estimate);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const CMatrix other = oracle::qubit(oracle::random_bloch(rng, 0.999));
    EXPECT_GE(ll, mean_log_likelihood(cube, f.values(), other) - 1e-10);
  }
}

TEST(MseMatrix, TetrahedronCanonicalBlochForm) {
  const Povm tet = platonic_povm("tetrahedron");
  const auto v = platonic_vertices(PlatonicSolid::tetrahedron);
  const Eigen::Vector3d s(0.3, -0.2, 0.5);
  const Eigen::Matrix3d c = bloch_covariance(mse_matrix(tet, canonical_recon(tet), oracle::qubit(s)));
  Eigen::Matrix3d expect = 3.0 * Eigen::Matrix3d::Identity() - s * s.transpose();
  for (const auto& vk : v) expect += (9.0 / 4.0) * vk.dot(s) * vk * vk.transpose();
  EXPECT_LT((c - expect).norm(), 1e-12);
}

TEST(MseMatrix, OctahedronOptimalDiagonalState) {
  const Povm oct = platonic_povm("octahedron");
  const double z = 0.6;
  const Eigen::Matrix3d c = bloch_covariance(blue_mse_matrix(oct, oracle::qubit({0, 0, z})));
  const Eigen::Matrix3d expect = Eigen::Vector3d(3.0, 3.0, 3.0 * (1 - z * z)).asDiagonal();
  EXPECT_LT((c - expect).norm(), 1e-12);
}

TEST(MseMatrix, BlueIsInverseOfReducedFrame) {
  std::mt19937_64 rng(21);
  for (const char* name : {"tetrahedron", "cube", "icosahedron", "dodecahedron", "sic3", "mub3", "mub5"}) {
    const Povm p = builtin_povm(name);
    const CMatrix rho = oracle::random_state(p.dim(), rng);
    const Superoperator c = blue_mse_matrix(p, rho);
    const Superoperator fbar = bar_restrict(frame_superop_at(p, rho));
    const Superoperator ibar = traceless_projector(p.dim());
    EXPECT_LT((c * fbar - ibar).cwiseAbs().maxCoeff(), 1e-8) << name;
    const Superoperator via_recon = direct_mse(p, optimal_recon(p, rho).kets, rho);
    EXPECT_LT((c - via_recon).cwiseAbs().maxCoeff(), 1e-9) << name;
  }
}

TEST(MseMatrix, CramerRaoAndBlueOptimality) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0, 1);
  for (const char* name : {"cube", "icosahedron", "sic3", "mub3"}) {
    const Povm p = builtin_povm(name);
    const int n = gell_mann_basis(p.dim()).size();
    const auto k = static_cast<Eigen::Index>(p.size());
    RMatrix bmat(n, k);
    for (Eigen::Index i = 0; i < k; ++i) bmat.col(i) = p.kets()[static_cast<std::size_t>(i)];
    const RMatrix proj = RMatrix::Identity(k, k) - bmat.transpose() * (bmat * bmat.transpose()).inverse() * bmat;
    for (int t = 0; t < 5; ++t) {
      const CMatrix rho = oracle::random_state(p.dim(), rng);
      const Superoperator cb = blue_mse_matrix(p, rho);
      const Superoperator cc = mse_matrix(p, canonical_recon(p), rho);
      EXPECT_GE(min_eig_traceless(cc - cb), -1e-9) << name;
      RMatrix a(n, k);
      const auto opt = optimal_recon(p, rho);
      for (Eigen::Index i = 0; i < k; ++i) a.col(i) = opt.kets[static_cast<std::size_t>(i)];
      RMatrix z(n, k);
      for (int i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j) z(i, j) = g(rng);
      z.row(0).setZero();  // keep unit trace
      const RMatrix alt = a + z * proj;
      EXPECT_LT((alt * bmat.transpose() - RMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-9);
      std::vector<OperatorKet> kets;
      for (Eigen::Index i = 0; i < k; ++i) kets.emplace_back(alt.col(i));
      EXPECT_GE(min_eig_traceless(direct_mse(p, kets, rho) - cb), -1e-9) << name;
    }
  }
}

TEST(Fisher, CubeBlochForm) {
  const Povm cube = platonic_povm("cube");
  const auto v = platonic_vertices(PlatonicSolid::cube);
  const Eigen::Vector3d s = kFig1;
  const RMatrix f = fisher_matrix(cube, oracle::qubit(s), gell_mann_basis(2));
  Eigen::Matrix3d expect = Eigen::Matrix3d::Zero();
  for (const auto& vk : v) expect += vk * vk.transpose() / (1.0 + vk.dot(s));
  expect /= 8.0;
  // Gell-Mann coordinates are sigma/sqrt(2): a factor 2 relative to Bloch parameters.
  EXPECT_LT((f / 2.0 - expect).norm(), 1e-12);
  EXPECT_LT((f - traceless_block(bar_restrict(frame_superop_at(cube, oracle::qubit(s))))).norm(), 1e-9);
}

TEST(Fisher, ConvexCombinationAndOperatorConvexity) {
  std::mt19937_64 rng(17);
  const Povm cube = platonic_povm("cube");
  Eigen::HouseholderQR<CMatrix> qr(oracle::random_state(2, rng) +
                                   std::complex<double>(0, 1) * oracle::random_state(2, rng));
  const CMatrix u = qr.householderQ();
  const Povm rotated = rotate_povm(cube, u);
  const double w = 0.3;
  const Povm mixed = mix_povms(cube, w, rotated);
  const CMatrix rho = oracle::qubit(oracle::random_bloch(rng, 0.9));
  const auto& b = gell_mann_basis(2);
  const RMatrix i1 = fisher_matrix(cube, rho, b);
  const RMatrix i2 = fisher_matrix(rotated, rho, b);
  EXPECT_LT((fisher_matrix(mixed, rho, b) - (w * i1 + (1 - w) * i2)).norm(), 1e-10);
  const Superoperator c1 = blue_mse_matrix(cube, rho);
  const Superoperator c2 = blue_mse_matrix(rotated, rho);
  const Superoperator cm = blue_mse_matrix(mixed, rho);
  EXPECT_GE(min_eig_traceless(w * c1 + (1 - w) * c2 - cm), -1e-9);
}

TEST(Incomplete, PauliZBasis) {
  const Povm z({oracle::qubit({0, 0, 1}), oracle::qubit({0, 0, -1})});
  const CMatrix rho = oracle::qubit({0, 0, 0.4});  // p = (0.7, 0.3)
  const auto r = incomplete_recon(z, rho);
  EXPECT_NEAR(r.restricted_mse_trace, 0.42, 1e-12);
  const auto mm = incomplete_recon(mub_povm(3), maximally_mixed(3));
  EXPECT_NEAR(mm.restricted_mse_trace, trace_bar(blue_mse_matrix(mub_povm(3), maximally_mixed(3))), 1e-10);
  // One projective basis of a qutrit at the maximally mixed state.
  std::vector<CMatrix> basis;
  for (int k = 0; k < 3; ++k) {
    CMatrix e = CMatrix::Zero(3, 3);
    e(k, k) = 1.0;
    basis.push_back(e);
  }
  EXPECT_NEAR(incomplete_recon(Povm(basis), maximally_mixed(3)).restricted_mse_trace, 1.0 - 1.0 / 3.0, 1e-12);
}

TEST(Incomplete, ReducesToOptimalForIcPovm) {
  std::mt19937_64 rng(2);
  const Povm p = platonic_povm("cube");
  const CMatrix rho = oracle::qubit(oracle::random_bloch(rng));
  const auto inc = incomplete_recon(p, rho);
  const auto opt = optimal_recon(p, rho);
  for (std::size_t k = 0; k < p.size(); ++k)
    EXPECT_LT((inc.recon.operators[k] - opt.operators[k]).norm(), 1e-9);
  EXPECT_LT((inc.restricted_mse - blue_mse_matrix(p, rho)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Unbiasedness, ExactMultinomialExpectation) {
  std::mt19937_64 rng(13);
  const Povm tet = platonic_povm("tetrahedron");
  const CMatrix rho = oracle::qubit(oracle::random_bloch(rng));
  const RVector pv = tet.probabilities(rho);
  const std::vector<double> p(pv.data(), pv.data() + 4);
  const ReconstructionSet sets[] = {canonical_recon(tet), optimal_recon(tet, oracle::qubit({0.1, 0.2, 0.3}))};
  for (int n = 1; n <= 6; ++n) {
    for (const auto& set : sets) {
      CMatrix mean = CMatrix::Zero(2, 2);
      oracle::for_each_composition(n, 4, [&](const std::vector<int>& c) {
        RVector f(4);
        for (int k = 0; k < 4; ++k) f(k) = double(c[static_cast<std::size_t>(k)]) / n;
        mean += oracle::multinomial_pmf(c, p) * set.estimate(f);
      });
      EXPECT_LT((mean - rho).cwiseAbs().maxCoeff(), 1e-12) << n;
    }
  }
}
