#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace qtomo {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
GaussLegendreRule gauss_legendre(int n);

/// Average of f over the unit sphere using a product rule with `polar_nodes`
/// Gauss-Legendre nodes in cos(theta) and 2 * polar_nodes equally spaced
/// azimuths. Exact for polynomials of degree < 2 * polar_nodes.
double sphere_average(const std::function<double(const Eigen::Vector3d&)>& f, int polar_nodes);

}  // namespace qtomo
