#pragma once

#include <functional>
#include <string_view>

#include "qtomo/opspace.hpp"

namespace qtomo {

/// Morozova-Chentsov function c(x, y) of a monotone Riemannian metric.
using MorozovaChentsov = std::function<double(double, double)>;

enum class WeightKind { hs, bures, chernoff, custom };

std::string_view to_string(WeightKind kind);
WeightKind parse_weight(std::string_view name);

struct WeightSpec {
  WeightKind kind = WeightKind::hs;
  /// Used only when kind == custom. Validated pointwise for symmetry and
  /// positivity at the eigenvalue pairs it is evaluated on; operator
  /// monotonicity of the underlying function is not checked.
  MorozovaChentsov c;

  static WeightSpec hs() { return {WeightKind::hs, {}}; }
  static WeightSpec bures() { return {WeightKind::bures, {}}; }
  static WeightSpec chernoff() { return {WeightKind::chernoff, {}}; }
  static WeightSpec custom(MorozovaChentsov fn) { return {WeightKind::custom, std::move(fn)}; }

  /// The kernel c(x, y); bures is 2/(x+y), chernoff 4/(sqrt(x)+sqrt(y))^2.
  double kernel(double x, double y) const;
};

/// Weighting superoperator W of the local metric at rho,
///   D^2 = sum_j |<j|drho|j>|^2/(4 lambda_j) + sum_{j!=k} c(lambda_j, lambda_k)/4 |<j|drho|k>|^2,
/// in the eigenbasis of rho. For hs, W is the identity superoperator.
/// Non-hs kinds throw BoundaryStateError unless rho has full rank.
Superoperator weight_superop(const CMatrix& rho, const WeightSpec& spec);

/// Tr(W C).
double wmse(const Superoperator& c, const Superoperator& w);

/// pi^{n/2} / Gamma(n/2 + 1).
double unit_ball_volume(int n);

/// V_{d^2-1} sqrt(det_bar C) for an MSE matrix in operator (HS) coordinates.
/// Throws NumericalError if det_bar(C) < -1e-12.
double ellipsoid_volume(const Superoperator& c);

/// ln of ellipsoid_volume; -infinity for a degenerate ellipsoid.
double log_ellipsoid_volume(const Superoperator& c);

/// 3 x 3 covariance of the Bloch vector, <<sigma_i|C|sigma_j>>, for a qubit
/// MSE matrix in operator coordinates. Equals 2 C restricted to traceless.
Eigen::Matrix3d bloch_covariance(const Superoperator& c);

/// 3 x 3 weighting matrix in Bloch coordinates, <<sigma_i|W|sigma_j>>/4.
Eigen::Matrix3d bloch_weight(const Superoperator& w);

}  // namespace qtomo
