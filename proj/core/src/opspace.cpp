#include "qtomo/opspace.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace qtomo {

bool is_hermitian(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

RVector hermitian_eigenvalues(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

bool is_state(const CMatrix& rho, double tol) {
  if (rho.rows() == 0 || !is_hermitian(rho, tol)) return false;
  if (std::abs(rho.trace().real() - 1.0) > tol) return false;
  return hermitian_eigenvalues(rho).minCoeff() >= -tol;
}

void require_state(const CMatrix& rho, const char* what, double tol) {
  if (rho.rows() == 0 || rho.rows() != rho.cols())
    throw ValidationError(std::string(what) + ": not a square matrix");
  if (!is_hermitian(rho, tol))
    throw ValidationError(std::string(what) + ": not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > tol)
    throw ValidationError(std::string(what) + ": trace differs from 1");
  if (hermitian_eigenvalues(rho).minCoeff() < -tol)
    throw ValidationError(std::string(what) + ": has a negative eigenvalue");
}

CMatrix maximally_mixed(int dim) {
  return CMatrix::Identity(dim, dim) / static_cast<double>(dim);
}

HermitianBasis::HermitianBasis(int dim) : dim_(dim) {
  if (dim < 1) throw ValidationError("basis dimension must be positive");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const std::complex<double> i(0.0, 1.0);

  elements_.reserve(static_cast<std::size_t>(dim * dim));
  elements_.push_back(CMatrix::Identity(dim, dim) / std::sqrt(static_cast<double>(dim)));
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      CMatrix sym = CMatrix::Zero(dim, dim);
      sym(j, k) = inv_sqrt2;
      sym(k, j) = inv_sqrt2;
      elements_.push_back(std::move(sym));
      CMatrix anti = CMatrix::Zero(dim, dim);
      anti(j, k) = -i * inv_sqrt2;
      anti(k, j) = i * inv_sqrt2;
      elements_.push_back(std::move(anti));
    }
  }
  for (int l = 1; l < dim; ++l) {
    CMatrix diag = CMatrix::Zero(dim, dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) diag(j, j) = norm;
    diag(l, l) = -static_cast<double>(l) * norm;
    elements_.push_back(std::move(diag));
  }

  const int n = dim * dim;
  analysis_.resize(n, n);
  synthesis_.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const auto& e = elements_[static_cast<std::size_t>(j)];
    Eigen::Map<const CVector> v(e.data(), n);
    synthesis_.col(j) = v;
    analysis_.row(j) = v.adjoint();
  }
}

OperatorKet HermitianBasis::vectorize(const CMatrix& a) const {
  if (a.rows() != dim_ || a.cols() != dim_)
    throw ValidationError("vectorize: operator is " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + ", basis dimension is " +
                          std::to_string(dim_));
  Eigen::Map<const CVector> v(a.data(), size());
  return (analysis_ * v).real();
}

CMatrix HermitianBasis::devectorize(const OperatorKet& coords) const {
  if (coords.size() != size())
    throw ValidationError("devectorize: ket has " + std::to_string(coords.size()) +
                          " coordinates, expected " + std::to_string(size()));
  CVector v = synthesis_ * coords.cast<std::complex<double>>();
  return Eigen::Map<const CMatrix>(v.data(), dim_, dim_);
}

OperatorKet HermitianBasis::identity_ket() const {
  OperatorKet k = OperatorKet::Zero(size());
  k(0) = std::sqrt(static_cast<double>(dim_));
  return k;
}

const HermitianBasis& gell_mann_basis(int dim) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<HermitianBasis>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[dim];
  if (!slot) slot = std::make_unique<HermitianBasis>(dim);
  return *slot;
}

int superop_dim(const Superoperator& s) {
  const auto n = s.rows();
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (s.cols() != n || static_cast<Eigen::Index>(d) * d != n || d < 1)
    throw ValidationError("superoperator is not d^2 x d^2");
  return d;
}

Superoperator identity_superop(int dim) {
  return Superoperator::Identity(dim * dim, dim * dim);
}

Superoperator traceless_projector(int dim) {
  Superoperator p = identity_superop(dim);
  p(0, 0) = 0.0;
  return p;
}

double default_pinv_rtol(Eigen::Index n) {
  return static_cast<double>(n) * std::numeric_limits<double>::epsilon();
}

Superoperator pinv(const Superoperator& m, std::optional<double> rtol) {
  const Eigen::Index n = m.rows();
  if (n == 0) return m;
  const double tol = rtol.value_or(default_pinv_rtol(n));
  const Superoperator sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Superoperator> es(sym);
  const RVector& w = es.eigenvalues();
  const double cutoff = tol * w.cwiseAbs().maxCoeff();
  RVector inv = RVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k)
    if (std::abs(w(k)) > cutoff) inv(k) = 1.0 / w(k);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

CMatrix pinv_general(const CMatrix& m, std::optional<double> rtol) {
  if (m.size() == 0) return m.adjoint();
  const double tol = rtol.value_or(default_pinv_rtol(std::max(m.rows(), m.cols())));
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  const double cutoff = tol * sv(0);
  RVector inv = RVector::Zero(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cutoff) inv(k) = 1.0 / sv(k);
  return svd.matrixV() * inv.cast<std::complex<double>>().asDiagonal() *
         svd.matrixU().adjoint();
}

Eigen::Index symmetric_rank(const Superoperator& m, std::optional<double> rtol) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 0;
  const double tol = rtol.value_or(default_pinv_rtol(n));
  Eigen::SelfAdjointEigenSolver<Superoperator> es(0.5 * (m + m.transpose()),
                                                  Eigen::EigenvaluesOnly);
  const RVector w = es.eigenvalues().cwiseAbs();
  const double cutoff = tol * w.maxCoeff();
  return (w.array() > cutoff).count();
}

Superoperator bar_restrict(const Superoperator& s) {
  superop_dim(s);
  Superoperator r = s;
  r.row(0).setZero();
  r.col(0).setZero();
  return r;
}

RMatrix traceless_block(const Superoperator& s) {
  superop_dim(s);
  const Eigen::Index n = s.rows() - 1;
  return s.bottomRightCorner(n, n);
}

double det_bar(const Superoperator& s) {
  const RMatrix block = traceless_block(s);
  if (block.size() == 0) return 1.0;
  return block.determinant();
}

double trace_bar(const Superoperator& s) { return traceless_block(s).trace(); }

CMatrix minimal_left_inverse(const CMatrix& b, std::optional<double> rtol) {
  const CMatrix gram = b * b.adjoint();
  return pinv_general(gram, rtol) * b;
}

}  // namespace qtomo
