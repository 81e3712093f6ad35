#include "qtomo/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qtomo/povm.hpp"

namespace qtomo {

std::string_view to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::hs: return "hs";
    case WeightKind::bures: return "bures";
    case WeightKind::chernoff: return "chernoff";
    case WeightKind::custom: return "custom";
  }
  return "hs";
}

WeightKind parse_weight(std::string_view name) {
  if (name == "hs") return WeightKind::hs;
  if (name == "bures") return WeightKind::bures;
  if (name == "chernoff") return WeightKind::chernoff;
  throw ValidationError("unknown weight '" + std::string(name) + "'");
}

double WeightSpec::kernel(double x, double y) const {
  switch (kind) {
    case WeightKind::hs: return 1.0;
    case WeightKind::bures: return 2.0 / (x + y);
    case WeightKind::chernoff: {
      const double r = std::sqrt(x) + std::sqrt(y);
      return 4.0 / (r * r);
    }
    case WeightKind::custom: {
      if (!c) throw ValidationError("custom weight without a Morozova-Chentsov function");
      const double v = c(x, y);
      const double w = c(y, x);
      if (!(v > 0.0) || !std::isfinite(v))
        throw ValidationError("Morozova-Chentsov function is not positive at (" +
                              std::to_string(x) + ", " + std::to_string(y) + ")");
      if (std::abs(v - w) > 1e-12 * std::max(1.0, std::abs(v)))
        throw ValidationError("Morozova-Chentsov function is not symmetric");
      return v;
    }
  }
  return 1.0;
}

Superoperator weight_superop(const CMatrix& rho, const WeightSpec& spec) {
  require_state(rho, "weight_superop state", 1e-10);
  const int d = static_cast<int>(rho.rows());
  if (spec.kind == WeightKind::hs) return identity_superop(d);

  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  const RVector& lam = es.eigenvalues();
  if (!(lam.minCoeff() > 0.0))
    throw BoundaryStateError("weight_superop: state is not full rank (min eigenvalue " +
                             std::to_string(lam.minCoeff()) + ")");
  const CMatrix& u = es.eigenvectors();
  const auto& basis = gell_mann_basis(d);
  const int n = d * d;
  Superoperator w = Superoperator::Zero(n, n);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const std::complex<double> i(0.0, 1.0);
  for (int j = 0; j < d; ++j) {
    const OperatorKet p = basis.vectorize(u.col(j) * u.col(j).adjoint());
    w.noalias() += p * p.transpose() / (4.0 * lam(j));
    for (int k = j + 1; k < d; ++k) {
      const CMatrix jk = u.col(j) * u.col(k).adjoint();
      const OperatorKet ep = basis.vectorize(inv_sqrt2 * (jk + jk.adjoint()));
      const OperatorKet em = basis.vectorize(-i * inv_sqrt2 * (jk - jk.adjoint()));
      const double cjk = spec.kernel(lam(j), lam(k));
      w.noalias() += 0.25 * cjk * (ep * ep.transpose() + em * em.transpose());
    }
  }
  return 0.5 * (w + w.transpose());
}

double wmse(const Superoperator& c, const Superoperator& w) {
  if (c.rows() != w.rows() || c.cols() != w.cols())
    throw ValidationError("wmse: shape mismatch");
  return (w.cwiseProduct(c.transpose())).sum();
}

double unit_ball_volume(int n) {
  const double h = 0.5 * n;
  return std::exp(h * std::log(std::numbers::pi) - std::lgamma(h + 1.0));
}

double log_ellipsoid_volume(const Superoperator& c) {
  const int d = superop_dim(c);
  const double det = det_bar(c);
  if (det < -1e-12)
    throw NumericalError("ellipsoid_volume: negative determinant " + std::to_string(det));
  const int n = d * d - 1;
  const double log_vn = 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0);
  if (det <= 0.0) return -std::numeric_limits<double>::infinity();
  return log_vn + 0.5 * std::log(det);
}

double ellipsoid_volume(const Superoperator& c) { return std::exp(log_ellipsoid_volume(c)); }

namespace {

std::array<OperatorKet, 3> pauli_kets() {
  const auto& basis = gell_mann_basis(2);
  const auto& s = pauli_matrices();
  return {basis.vectorize(s[0]), basis.vectorize(s[1]), basis.vectorize(s[2])};
}

}  // namespace

Eigen::Matrix3d bloch_covariance(const Superoperator& c) {
  if (superop_dim(c) != 2) throw ValidationError("bloch_covariance needs a qubit superoperator");
  const auto k = pauli_kets();
  Eigen::Matrix3d out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) out(a, b) = k[a].dot(c * k[b]);
  return out;
}

Eigen::Matrix3d bloch_weight(const Superoperator& w) {
  return 0.25 * bloch_covariance(w);
}

}  // namespace qtomo
