#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtomo/opspace.hpp"

namespace qtomo {

enum class PovmFamily { sic, mub, platonic, covariant, custom };

enum class PlatonicSolid { tetrahedron, octahedron, cube, icosahedron, dodecahedron };

std::string_view to_string(PovmFamily family);
std::string_view to_string(PlatonicSolid solid);

/// Throws ValidationError("unknown solid ...") for anything else.
PlatonicSolid parse_solid(std::string_view name);

/// Qubit Bloch vector; rho = (1 + s.sigma)/2.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm_squared() const noexcept { return x * x + y * y + z * z; }
  double norm() const noexcept;
  Eigen::Vector3d vec() const { return {x, y, z}; }
};

CMatrix bloch_state(const BlochVector& s);

/// Bloch vector of a 2x2 Hermitian unit-trace operator.
BlochVector bloch_vector(const CMatrix& rho);

/// Pauli matrices sigma_x, sigma_y, sigma_z.
const std::array<CMatrix, 3>& pauli_matrices();

/// Tolerance used when validating POVM elements.
inline constexpr double kPovmTol = 1e-10;

/// A measurement: positive operators Pi_k that sum to the identity.
///
/// The outcomes are validated on construction and never change afterwards;
/// their operator kets in gell_mann_basis(dim) and weights tr(Pi_k) are
/// cached.
class Povm {
 public:
  /// Throws ValidationError naming the offending outcome index if an outcome
  /// is not Hermitian, has the wrong size or is not PSD, or if the outcomes do
  /// not sum to the identity.
  explicit Povm(std::vector<CMatrix> outcomes, PovmFamily family = PovmFamily::custom,
                std::string label = "custom");

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return outcomes_.size(); }
  const CMatrix& operator[](std::size_t k) const { return outcomes_[k]; }
  const std::vector<CMatrix>& outcomes() const noexcept { return outcomes_; }
  const std::vector<OperatorKet>& kets() const noexcept { return kets_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  PovmFamily family() const noexcept { return family_; }
  const std::string& label() const noexcept { return label_; }

  /// Born probabilities p_k = tr(Pi_k rho), no validation of rho.
  RVector probabilities(const CMatrix& rho) const;

 private:
  int dim_ = 0;
  std::vector<CMatrix> outcomes_;
  std::vector<OperatorKet> kets_;
  std::vector<double> weights_;
  PovmFamily family_;
  std::string label_;
};

/// Unit vertices of the platonic solid. Cube and octahedron are axis
/// aligned; the tetrahedron is the four cube vertices containing
/// (1,1,1)/sqrt(3); icosahedron and dodecahedron use the golden-ratio
/// embedding.
std::vector<Eigen::Vector3d> platonic_vertices(PlatonicSolid solid);

/// Qubit POVM with outcomes (1 + v_k.sigma)/n over the n vertices.
Povm platonic_povm(PlatonicSolid solid);
Povm platonic_povm(std::string_view solid);

/// Built-in Weyl-Heisenberg fiducials exist for d = 2 and d = 3.
std::optional<CVector> builtin_sic_fiducial(int dim);

/// SIC POVM |psi_ab><psi_ab|/d with psi_ab = X^a Z^b psi. Without a fiducial
/// the built-in one is used. The orbit is checked against the equal pairwise
/// fidelity condition before returning; ValidationError("SIC condition
/// violated ...") otherwise.
Povm sic_povm(int dim, const std::optional<CVector>& fiducial = std::nullopt);

/// Complete set of d+1 mutually unbiased bases for prime d, each projector
/// scaled by 1/(d+1). The computational basis comes first.
Povm mub_povm(int dim);

/// Discretized covariant qubit measurement: Gauss-Legendre nodes in cos(theta)
/// times uniform nodes in phi. Converges to the Haar-covariant POVM as the
/// node count grows.
Povm covariant_qubit_povm(int polar_nodes);

/// Performs `a` with probability p and `b` with probability 1 - p.
Povm mix_povms(const Povm& a, double p, const Povm& b);

/// Outcomes U Pi_k U^dag.
Povm rotate_povm(const Povm& povm, const CMatrix& unitary);

/// Resolve "builtin:<name>" descriptors: tetrahedron, octahedron, cube,
/// icosahedron, dodecahedron, sic<d>, mub<d>, covariant<n>.
Povm builtin_povm(std::string_view name);

/// State-independent frame superoperator F = d sum_k |Pi_k>><<Pi_k| / tr(Pi_k).
Superoperator frame_superop(const Povm& povm);

inline constexpr double kBoundaryEps = 1e-12;

/// F(rho) = sum_k |Pi_k>><<Pi_k| / p_k. Throws BoundaryStateError naming the
/// first outcome with p_k <= eps.
Superoperator frame_superop_at(const Povm& povm, const CMatrix& rho,
                               double eps = kBoundaryEps);

/// F built from arbitrary positive weights q_k in place of the probabilities.
Superoperator frame_superop_from(const Povm& povm, const RVector& q,
                                 double eps = kBoundaryEps);

/// The frame superoperator has full rank d^2.
bool is_informationally_complete(const Povm& povm);

struct TightIcResult {
  bool tight = false;
  bool rank_one = false;
  /// Max entrywise deviation of sum_k w_k (psi_k psi_k^dag)^{x2} from
  /// 2 P_sym/(d+1); infinity when the POVM is not rank one.
  double residual = 0.0;
};

/// Weighted 2-design test for rank-one POVMs.
TightIcResult is_tight_ic(const Povm& povm, double tol = 1e-10);

}  // namespace qtomo
