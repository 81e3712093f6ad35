#pragma once

// Linear algebra on the real vector space of Hermitian operators.
//
// A d x d Hermitian operator A is identified with its coordinates
// |A>> = (tr(E_0 A), ..., tr(E_{d^2-1} A)) in an orthonormal Hermitian basis
// whose first element is 1/sqrt(d). Superoperators are then real d^2 x d^2
// matrices, and <<A|B>> = tr(AB). Index 0 is the trace direction; indices
// 1..d^2-1 span the traceless operators.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qtomo/errors.hpp"

namespace qtomo {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Real coordinates of a Hermitian operator in a HermitianBasis.
using OperatorKet = Eigen::VectorXd;
/// Real d^2 x d^2 matrix acting on operator kets.
using Superoperator = Eigen::MatrixXd;

inline constexpr double kHermitianTol = 1e-12;

bool is_hermitian(const CMatrix& a, double tol = kHermitianTol);

/// Eigenvalues of a Hermitian matrix in ascending order.
RVector hermitian_eigenvalues(const CMatrix& a);

/// Hermitian, unit trace and positive semidefinite, all within `tol`.
bool is_state(const CMatrix& rho, double tol = kHermitianTol);

/// Throws ValidationError naming `what` unless `rho` is a density matrix.
void require_state(const CMatrix& rho, const char* what = "state",
                   double tol = kHermitianTol);

/// 1/d times the identity.
CMatrix maximally_mixed(int dim);

/// Generalized Gell-Mann basis: identity/sqrt(d) first, then for every pair
/// j < k the symmetric and antisymmetric elements, then the d-1 diagonal
/// ones. For a qubit elements 1..3 are sigma_x, sigma_y, sigma_z over sqrt(2).
class HermitianBasis {
 public:
  explicit HermitianBasis(int dim);

  int dim() const noexcept { return dim_; }
  /// Number of elements, d^2.
  int size() const noexcept { return dim_ * dim_; }
  const CMatrix& operator[](int j) const { return elements_[static_cast<std::size_t>(j)]; }
  const std::vector<CMatrix>& elements() const noexcept { return elements_; }

  /// coords[j] = tr(E_j A). Throws ValidationError on a dimension mismatch.
  OperatorKet vectorize(const CMatrix& a) const;
  CMatrix devectorize(const OperatorKet& coords) const;

  /// |1>> for the identity operator, i.e. sqrt(d) e_0.
  OperatorKet identity_ket() const;

 private:
  int dim_;
  std::vector<CMatrix> elements_;
  CMatrix analysis_;   // row j = conj(vec(E_j))^T
  CMatrix synthesis_;  // column j = vec(E_j)
};

/// Shared, lazily built basis for dimension `dim`. Thread-safe.
const HermitianBasis& gell_mann_basis(int dim);

/// Operator dimension d of a d^2 x d^2 superoperator. Throws ValidationError
/// if the size is not a perfect square.
int superop_dim(const Superoperator& s);

Superoperator identity_superop(int dim);

/// Projector onto the traceless Hermitian operators.
Superoperator traceless_projector(int dim);

/// Default relative cutoff used by pinv: n * machine epsilon.
double default_pinv_rtol(Eigen::Index n);

/// Moore-Penrose pseudoinverse of a symmetric real matrix. Eigenvalues with
/// magnitude below rtol * max|eigenvalue| are treated as zero. The input is
/// symmetrized first.
Superoperator pinv(const Superoperator& m, std::optional<double> rtol = std::nullopt);

/// Pseudoinverse of a general complex matrix by SVD with the same cutoff rule.
CMatrix pinv_general(const CMatrix& m, std::optional<double> rtol = std::nullopt);

/// Rank of a symmetric real matrix under the pinv cutoff rule.
Eigen::Index symmetric_rank(const Superoperator& m, std::optional<double> rtol = std::nullopt);

/// I_bar S I_bar, where I_bar projects onto traceless operators.
Superoperator bar_restrict(const Superoperator& s);

/// The (d^2-1) x (d^2-1) block of `s` acting within the traceless subspace.
RMatrix traceless_block(const Superoperator& s);

/// Determinant of the restriction of `s` to the traceless subspace.
double det_bar(const Superoperator& s);

/// Trace of the restriction of `s` to the traceless subspace.
double trace_bar(const Superoperator& s);

/// |a>><<b|
inline Superoperator ket_outer(const OperatorKet& a, const OperatorKet& b) {
  return a * b.transpose();
}

/// Tr of a superoperator.
inline double superop_trace(const Superoperator& s) { return s.trace(); }

/// Minimal left inverse in the sense of the optimal-reconstruction lemma:
/// returns (B B^dag)^+ B, which satisfies A B^dag = projector onto range(B)
/// and minimizes A A^dag among all such A.
CMatrix minimal_left_inverse(const CMatrix& b, std::optional<double> rtol = std::nullopt);

}  // namespace qtomo
