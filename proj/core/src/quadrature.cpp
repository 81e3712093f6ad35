#include "qtomo/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qtomo {

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

double sphere_average(const std::function<double(const Eigen::Vector3d&)>& f, int polar_nodes) {
  const auto rule = gauss_legendre(polar_nodes);
  const int azimuths = 2 * polar_nodes;
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double ct = rule.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double ring = 0.0;
    for (int k = 0; k < azimuths; ++k) {
      const double phi = 2.0 * std::numbers::pi * (k + 0.5) / azimuths;
      ring += f(Eigen::Vector3d(st * std::cos(phi), st * std::sin(phi), ct));
    }
    total += rule.weights[i] * ring / azimuths;
  }
  return 0.5 * total;
}

}  // namespace qtomo
