#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qtomo/estimators.hpp"
#include "qtomo/povm.hpp"

using namespace qtomo;

namespace {

// Rank-one outcome -> normalized vector.
CVector top_vector(const CMatrix& pi) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(pi);
  return es.eigenvectors().col(pi.rows() - 1);
}

double fidelity(const CMatrix& a, const CMatrix& b) {
  return std::norm(top_vector(a).dot(top_vector(b)));
}

CMatrix sum_outcomes(const Povm& p) {
  CMatrix s = CMatrix::Zero(p.dim(), p.dim());
  for (const auto& o : p.outcomes()) s += o;
  return s;
}

}  // namespace

TEST(Platonic, OutcomeCountsAndCompleteness) {
  const std::pair<const char*, std::size_t> solids[] = {
      {"tetrahedron", 4}, {"octahedron", 6}, {"cube", 8}, {"icosahedron", 12}, {"dodecahedron", 20}};
  for (const auto& [name, n] : solids) {
    const Povm p = platonic_povm(name);
    EXPECT_EQ(p.size(), n) << name;
    EXPECT_LT((sum_outcomes(p) - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12) << name;
    for (const auto& v : platonic_vertices(parse_solid(name))) EXPECT_NEAR(v.norm(), 1.0, 1e-14);
  }
  EXPECT_THROW(platonic_povm("hexagon"), ValidationError);
}

TEST(Platonic, TetrahedronOrientationAndFidelities) {
  const auto v = platonic_vertices(PlatonicSolid::tetrahedron);
  EXPECT_LT((v[0] - Eigen::Vector3d::Ones() / std::sqrt(3.0)).norm(), 1e-14);
  const Povm p = platonic_povm(PlatonicSolid::tetrahedron);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_NEAR(fidelity(p[i], p[j]), i == j ? 1.0 : 1.0 / 3.0, 1e-12);
  // Each outcome is (1 + v.sigma)/4.
  for (std::size_t k = 0; k < 4; ++k)
    EXPECT_LT((p[k] - oracle::qubit(v[k]) / 2.0).norm(), 1e-14);
}

TEST(Platonic, OctahedronIsPauliEigenbases) {
  const Povm oct = platonic_povm("octahedron");
  const Povm mub = mub_povm(2);
  // Same set of outcomes up to order.
  for (const auto& a : oct.outcomes()) {
    double best = 1e9;
    for (const auto& b : mub.outcomes()) best = std::min(best, (a - b).norm());
    EXPECT_LT(best, 1e-12);
  }
}

TEST(Sic, QubitMatchesTetrahedronUpToRotation) {
  const Povm sic = sic_povm(2);
  EXPECT_EQ(sic.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_NEAR(fidelity(sic[i], sic[j]), (2.0 * (i == j) + 1.0) / 3.0, 1e-12);
  // Bloch vectors of the orbit form a regular tetrahedron: pairwise dot -1/3.
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      const Eigen::Vector3d a = oracle::bloch(sic[i] * 2.0);
      const Eigen::Vector3d b = oracle::bloch(sic[j] * 2.0);
      EXPECT_NEAR(a.dot(b), -1.0 / 3.0, 1e-12);
    }
}

TEST(Sic, QutritBuiltinFiducial) {
  const Povm sic = sic_povm(3);
  EXPECT_EQ(sic.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j)
      EXPECT_NEAR(fidelity(sic[i], sic[j]), (3.0 * (i == j) + 1.0) / 4.0, 1e-12);
  EXPECT_LT((sum_outcomes(sic) - CMatrix::Identity(3, 3)).norm(), 1e-12);
}

TEST(Sic, BadFiducialRejected) {
  CVector f(2);
  f << 1.0, 0.0;
  try {
    sic_povm(2, f);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("SIC condition violated"), std::string::npos);
  }
  EXPECT_THROW(sic_povm(5), ValidationError);  // no built-in
}

TEST(Mub, UnbiasedAcrossBases) {
  for (int d : {2, 3, 5}) {
    const Povm m = mub_povm(d);
    ASSERT_EQ(m.size(), static_cast<std::size_t>(d * (d + 1)));
    EXPECT_LT((sum_outcomes(m) - CMatrix::Identity(d, d)).norm(), 1e-12);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j) {
        const bool same_basis = i / d == j / d;
        const double expect = same_basis ? (i == j ? 1.0 : 0.0) : 1.0 / d;
        EXPECT_NEAR(fidelity(m[i], m[j]), expect, 1e-10) << d << ' ' << i << ' ' << j;
      }
  }
  try {
    mub_povm(4);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("dim not prime"), std::string::npos);
  }
}

TEST(Povm, ValidationNamesOutcome) {
  std::vector<CMatrix> outs{CMatrix::Identity(2, 2) * 0.5, CMatrix::Identity(2, 2) * 0.5};
  outs[1](0, 1) = 0.3;  // not Hermitian
  try {
    Povm p(outs);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("outcome 1"), std::string::npos);
  }
  std::vector<CMatrix> short_sum{CMatrix::Identity(2, 2) * 0.5};
  EXPECT_THROW(Povm{short_sum}, ValidationError);
}

TEST(Frame, TetrahedronSpectrumAndCanonicalOperators) {
  const Povm p = platonic_povm("tetrahedron");
  const Superoperator f = frame_superop(p);
  Eigen::SelfAdjointEigenSolver<Superoperator> es(f);
  EXPECT_NEAR(es.eigenvalues()(0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(2), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(3), 2.0, 1e-12);
  const OperatorKet one = gell_mann_basis(2).identity_ket();
  EXPECT_LT((f * one - 2.0 * one).norm(), 1e-12);
  const auto recon = canonical_recon(p);
  const auto v = platonic_vertices(PlatonicSolid::tetrahedron);
  for (std::size_t k = 0; k < 4; ++k) {
    const CMatrix expect = 0.5 * (CMatrix::Identity(2, 2) + 3.0 * (2.0 * oracle::qubit(v[k]) - CMatrix::Identity(2, 2)));
    EXPECT_LT((recon.operators[k] - expect).norm(), 1e-12);
  }
  // Octahedron shares the traceless spectrum.
  Eigen::SelfAdjointEigenSolver<Superoperator> eo(frame_superop(platonic_povm("octahedron")));
  EXPECT_LT((eo.eigenvalues() - es.eigenvalues()).norm(), 1e-12);
}

TEST(Frame, StateDependentIdentities) {
  const CMatrix rho = oracle::qubit({0.6886, 0.1137, -0.5025});
  const auto& b = gell_mann_basis(2);
  for (const char* name : {"tetrahedron", "octahedron", "cube", "icosahedron", "dodecahedron"}) {
    const Povm p = platonic_povm(name);
    const Superoperator f = frame_superop_at(p, rho);
    EXPECT_LT((f * b.vectorize(rho) - b.identity_ket()).norm(), 1e-10) << name;
  }
  // At 1/d the state-dependent form equals the state-independent one.
  for (const char* name : {"builtin:sic3", "builtin:mub3", "builtin:cube"}) {
    const Povm p = builtin_povm(std::string(name).substr(8));
    EXPECT_LT((frame_superop_at(p, maximally_mixed(p.dim())) - frame_superop(p)).norm(), 1e-10);
  }
}

TEST(Frame, BoundaryStateNamesOutcome) {
  const Povm oct = platonic_povm("octahedron");
  try {
    frame_superop_at(oct, oracle::qubit({0, 0, 1}));
    FAIL();
  } catch (const BoundaryStateError& e) {
    EXPECT_NE(std::string(e.what()).find("boundary state"), std::string::npos);
    EXPECT_GE(e.outcome(), 0);
  }
}

TEST(Frame, ZeroTraceOutcomeRejected) {
  std::vector<CMatrix> outs{CMatrix::Identity(2, 2), CMatrix::Zero(2, 2)};
  const Povm p(outs);
  EXPECT_THROW(frame_superop(p), ValidationError);
}

TEST(TightIc, BuiltinsAndGenericFailure) {
  for (const char* name : {"tetrahedron", "octahedron", "cube", "icosahedron", "dodecahedron",
                           "sic2", "sic3", "mub2", "mub3", "mub5"}) {
    const auto r = is_tight_ic(builtin_povm(name));
    EXPECT_TRUE(r.tight) << name;
    EXPECT_LT(r.residual, 1e-12) << name;
  }
  // Four projectors onto generic non-symmetric directions (trine-like POVM plus z).
  std::vector<Eigen::Vector3d> dirs{{0, 0, 1}, {0.9, 0, -0.1}, {-0.3, 0.7, -0.2}, {-0.6, -0.7, -0.7}};
  // Weights making it a POVM: sum w_k = 2, sum w_k v_k = 0.
  Eigen::Matrix4d a;
  Eigen::Vector4d rhs(2, 0, 0, 0);
  for (int k = 0; k < 4; ++k) {
    dirs[static_cast<std::size_t>(k)].normalize();
    a(0, k) = 1.0;
    a.block<3, 1>(1, k) = dirs[static_cast<std::size_t>(k)];
  }
  const Eigen::Vector4d wk = a.colPivHouseholderQr().solve(rhs);
  std::vector<CMatrix> outs;
  for (int k = 0; k < 4; ++k) {
    ASSERT_GT(wk(k), 0.0);
    outs.push_back(wk(k) * oracle::qubit(dirs[static_cast<std::size_t>(k)]));
  }
  const Povm custom(outs);
  EXPECT_TRUE(is_informationally_complete(custom));
  EXPECT_FALSE(is_tight_ic(custom).tight);
  // Non rank-one: a noisy tetrahedron.
  const Povm noisy = mix_povms(platonic_povm("tetrahedron"), 0.5,
                               Povm({CMatrix::Identity(2, 2) * 0.5, CMatrix::Identity(2, 2) * 0.5}));
  EXPECT_FALSE(is_tight_ic(noisy).tight);
  EXPECT_FALSE(is_tight_ic(noisy).rank_one);
}

TEST(Ic, RankCriterion) {
  for (const char* name : {"tetrahedron", "cube", "icosahedron", "sic3", "mub3", "covariant8"})
    EXPECT_TRUE(is_informationally_complete(builtin_povm(name))) << name;
  // Pauli-Z basis only.
  const Povm z({oracle::qubit({0, 0, 1}), oracle::qubit({0, 0, -1})});
  EXPECT_FALSE(is_informationally_complete(z));
  // Three-outcome trine is not IC.
  std::vector<CMatrix> trine;
  for (int k = 0; k < 3; ++k) {
    const double a = 2.0 * M_PI * k / 3.0;
    trine.push_back(oracle::qubit({std::cos(a), 0, std::sin(a)}) * (2.0 / 3.0));
  }
  EXPECT_FALSE(is_informationally_complete(Povm(trine)));
}

TEST(Covariant, DiscretizationIsIsotropic) {
  const Povm c = covariant_qubit_povm(8);
  EXPECT_TRUE(is_tight_ic(c).tight);
  EXPECT_LT((sum_outcomes(c) - CMatrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(Rotate, PreservesCompletenessAndSpectrum) {
  std::mt19937_64 rng(8);
  const Povm cube = platonic_povm("cube");
  Eigen::HouseholderQR<CMatrix> qr(oracle::random_state(2, rng) + std::complex<double>(0, 1) * oracle::random_state(2, rng));
  const CMatrix u = qr.householderQ();
  const Povm r = rotate_povm(cube, u);
  EXPECT_LT((sum_outcomes(r) - CMatrix::Identity(2, 2)).norm(), 1e-12);
  Eigen::SelfAdjointEigenSolver<Superoperator> a(frame_superop(cube)), b(frame_superop(r));
  EXPECT_LT((a.eigenvalues() - b.eigenvalues()).norm(), 1e-12);
}

TEST(Frame, RankOneTightCanonicalOperators) {
  for (const char* name : {"sic3", "mub3", "icosahedron"}) {
    const Povm p = builtin_povm(name);
    const int d = p.dim();
    const auto recon = canonical_recon(p);
    CMatrix total = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < p.size(); ++k) {
      const CMatrix proj = p[k] / p.weights()[k];
      const CMatrix expect = (d + 1.0) * proj - CMatrix::Identity(d, d);
      EXPECT_LT((recon.operators[k] - expect).norm(), 1e-10) << name << ' ' << k;
      total += p.weights()[k] * recon.operators[k];
    }
    EXPECT_LT((total - CMatrix::Identity(d, d)).norm(), 1e-10) << name;
  }
}
