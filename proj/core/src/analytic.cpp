#include "qtomo/analytic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qtomo/quadrature.hpp"

namespace qtomo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

double log_beta(double x, double y) { return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y); }

// 2 atanh(s)/s = (1/s) ln((1+s)/(1-s)), continuous at s = 0.
double log_ratio_over_s(double s) {
  if (s < 1e-4) return 2.0 + 2.0 * s * s / 3.0 + 2.0 * std::pow(s, 4) / 5.0;
  return 2.0 * std::atanh(s) / s;
}

// 1/2 int_0^1 x^M/(1 + u - x) dx in the printed closed form.
double antiderivative_j(int m, double u) {
  const double base = 1.0 + u;
  double sum = 0.0;
  double pw = 1.0;
  for (int n = 0; n < m; ++n) {
    sum += pw / (m - n);
    pw *= base;
  }
  return 0.5 * pw * std::log1p(1.0 / u) - 0.5 * sum;
}

void check_dr(int d, int r) {
  if (d < 2) throw ValidationError("dimension must be at least 2");
  if (r < 1 || r > d - 1)
    throw ValidationError("rank must satisfy 1 <= r <= d-1, got r=" + std::to_string(r));
}

void check_s(double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw ValidationError("mixing parameter must lie in [0, 1], got " + std::to_string(s));
}

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

}  // namespace

FamilyState::FamilyState(int d_, int r_, double s_) : d(d_), r(r_), s(s_) {
  check_dr(d, r);
  check_s(s);
}

RVector FamilyState::eigenvalues() const {
  RVector lam(d);
  for (int j = 0; j < d; ++j) lam(j) = j < r ? lambda1() : lambda2();
  return lam;
}

CMatrix FamilyState::matrix() const {
  return eigenvalues().cast<std::complex<double>>().asDiagonal();
}

bool CovariantParams::c_infinite() const { return std::isinf(c); }

double covariant_g(int d, int r, double s, int j, int k) {
  check_dr(d, r);
  check_s(s);
  if (j < 0 || k < 0) throw ValidationError("g_jk indices must be nonnegative");
  const int n = r - 1 + j;
  const int m = d - r - 1 + k;
  const double log_pref = std::log(2.0 * d * r) + std::lgamma(d + 1.0) - std::lgamma(r + j) -
                          std::lgamma(d - r + k);
  if (s == 1.0) {
    if (n == 0) return kInf;
    return std::exp(log_pref + log_beta(m + 1.0, n)) / (2.0 * d);
  }
  const double ds = d * s;
  const double den = ds + r * (1.0 - s);
  const double q = ds / den;
  if (q <= 0.5) {
    // 1/(den (1 - q t)) expanded in powers of q t.
    double beta_k = std::exp(log_beta(m + 1.0, n + 1.0));
    double qk = 1.0;
    double sum = 0.0;
    for (int i = 0; i < 400; ++i) {
      const double term = qk * beta_k;
      sum += term;
      if (term < 1e-18 * sum) break;
      beta_k *= (m + 1.0 + i) / (m + n + 2.0 + i);
      qk *= q;
    }
    return std::exp(log_pref) * sum / (2.0 * den);
  }
  const double u = r * (1.0 - s) / ds;
  double sum = 0.0;
  double binom = 1.0;
  for (int i = 0; i <= n; ++i) {
    sum += (i % 2 == 0 ? 1.0 : -1.0) * binom * antiderivative_j(m + i, u);
    binom = binom * (n - i) / (i + 1.0);
  }
  return std::exp(log_pref) * sum / ds;
}

CovariantParams covariant_params(int d, int r, double s) {
  CovariantParams p;
  p.d = d;
  p.r = r;
  p.s = s;
  p.a = covariant_g(d, r, s, 2, 0);
  p.b = covariant_g(d, r, s, 1, 1);
  p.c = covariant_g(d, r, s, 0, 2);
  p.beta = std::isinf(p.c)
               ? kInf
               : ((r + 1.0) * (d - r) * p.a + r * (d - r + 1.0) * p.c - 2.0 * r * (d - r) * p.b) / d;
  return p;
}

double qubit_covariant_b(double s) {
  check_s(s);
  if (s == 1.0) return 1.0;
  if (s < 1e-2) {
    const double s2 = s * s;
    return 2.0 / 3.0 + s2 * (2.0 / 15.0 + s2 * (2.0 / 35.0 + s2 * 2.0 / 63.0));
  }
  const double l = std::log((1.0 + s) / (1.0 - s));
  return (2.0 * s - (1.0 - s * s) * l) / (2.0 * s * s * s);
}

double qubit_covariant_beta(double s) {
  check_s(s);
  if (s == 1.0) return kInf;
  if (s < 1e-2) {
    const double s2 = s * s;
    return 2.0 / 3.0 + s2 * (2.0 / 5.0 + s2 * (2.0 / 7.0 + s2 * 2.0 / 9.0));
  }
  const double l = std::log((1.0 + s) / (1.0 - s));
  return (l - 2.0 * s) / (s * s * s);
}

FigureSet covariant_blue_figures(int d, int r, double s, const WeightSpec& spec) {
  const FamilyState st(d, r, s);
  const CovariantParams p = covariant_params(d, r, s);
  const double l1 = st.lambda1();
  const double l2 = st.lambda2();
  const double dr = d - r;

  FigureSet out;
  out.mse = (r * r - 1.0) / p.a + 2.0 * r * dr / p.b + (dr * dr - 1.0) * inv(p.c) + inv(p.beta);

  const double n = d * d - 1.0;
  const double log_vn = 0.5 * n * std::log(kPi) - std::lgamma(0.5 * n + 1.0);
  if (std::isinf(p.c)) {
    out.log_volume = -kInf;
    out.volume = 0.0;
  } else {
    out.log_volume = log_vn - 0.5 * ((r * r - 1.0) * std::log(p.a) + 2.0 * r * dr * std::log(p.b) +
                                     (dr * dr - 1.0) * std::log(p.c) + std::log(p.beta));
    out.volume = std::exp(*out.log_volume);
  }

  if (l2 > 0.0) {
    out.msb = 0.25 * ((r * r - 1.0) / (p.a * l1) + 4.0 * r * dr / (p.b * (l1 + l2)) +
                      (dr * dr - 1.0) / (p.c * l2) + dr / (d * p.beta * l1) + r / (d * p.beta * l2));
    if (spec.kind == WeightKind::hs) {
      out.wmse = out.mse;
    } else {
      const double c11 = spec.kernel(l1, l1);
      const double c12 = spec.kernel(l1, l2);
      const double c22 = spec.kernel(l2, l2);
      out.wmse = 0.25 * (r * (r - 1.0) * c11 / p.a + (r - 1.0) / (p.a * l1) +
                         2.0 * r * dr * c12 / p.b + dr * (dr - 1.0) * c22 / p.c +
                         (dr - 1.0) / (p.c * l2) + (dr / (d * l1) + r / (d * l2)) / p.beta);
    }
  } else if (spec.kind == WeightKind::hs) {
    out.wmse = out.mse;
  }
  return out;
}

FigureSet covariant_canonical_figures(const RVector& lam, const WeightSpec& spec) {
  const auto d = static_cast<int>(lam.size());
  if (d < 2) throw ValidationError("need at least two eigenvalues");
  if ((lam.array() < -1e-12).any() || std::abs(lam.sum() - 1.0) > 1e-10)
    throw ValidationError("eigenvalues must be nonnegative and sum to 1");
  const double dd = d;
  FigureSet out;
  out.mse = dd * dd + dd - 1.0 - lam.squaredNorm();

  // Traceless spectrum of the canonical MSE matrix: off-diagonal pairs give
  // (d+1)(1+l_j+l_k)/(d+2) twice, diagonal block is Q on the complement of 1.
  RMatrix q(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      q(j, k) = ((j == k ? (dd + 1.0) * (1.0 + 2.0 * lam(j)) : 0.0) - 1.0 - lam(j) - lam(k) -
                 (dd + 2.0) * lam(j) * lam(k)) /
                (dd + 2.0);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(q);
  // Q annihilates the all-ones vector; drop the eigenvalue closest to it.
  const RVector ones = RVector::Ones(d) / std::sqrt(dd);
  Eigen::Index drop = 0;
  (es.eigenvectors().transpose() * ones).cwiseAbs().maxCoeff(&drop);
  double log_det = 0.0;
  bool degenerate = false;
  for (int j = 0; j < d; ++j) {
    if (j == drop) continue;
    const double ev = es.eigenvalues()(j);
    if (ev <= 0.0) degenerate = true;
    else log_det += std::log(ev);
  }
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k)
      log_det += 2.0 * std::log((dd + 1.0) * (1.0 + lam(j) + lam(k)) / (dd + 2.0));
  const double n = dd * dd - 1.0;
  const double log_vn = 0.5 * n * std::log(kPi) - std::lgamma(0.5 * n + 1.0);
  out.log_volume = degenerate ? -kInf : log_vn + 0.5 * log_det;
  out.volume = std::exp(*out.log_volume);

  if (lam.minCoeff() > 0.0) {
    double inv_sum = 0.0;
    for (int j = 0; j < d; ++j) inv_sum += 1.0 / lam(j);
    double pair = 0.0;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (j != k) pair += 2.0 * (dd + 1.0) / (lam(j) + lam(k));
    out.msb = (2.0 * dd * dd * dd + 2.0 * dd * dd - 3.0 * dd - 2.0) / (4.0 * (dd + 2.0)) +
              (dd * inv_sum + pair) / (4.0 * (dd + 2.0));
    if (spec.kind == WeightKind::hs) {
      out.wmse = out.mse;
    } else {
      double cs = 0.0;
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          if (j != k) cs += (1.0 + lam(j) + lam(k)) * spec.kernel(lam(j), lam(k));
      out.wmse = (2.0 * dd * dd - dd - 2.0) / (4.0 * (dd + 2.0)) + dd * inv_sum / (4.0 * (dd + 2.0)) +
                 (dd + 1.0) * cs / (4.0 * (dd + 2.0));
    }
  } else if (spec.kind == WeightKind::hs) {
    out.wmse = out.mse;
  }
  return out;
}

double covariant_rank_limit_mse(int d, int r) {
  check_dr(d, r);
  if (r < 2) throw ValidationError("the rank limit formula needs r >= 2");
  const double dd = d;
  return dd * dd + 2.0 * dd - 1.0 - dd * dd / r - 1.0 / r;
}

std::string_view to_string(QubitMeasurement m) {
  switch (m) {
    case QubitMeasurement::sic: return "sic";
    case QubitMeasurement::mub: return "mub";
    case QubitMeasurement::cube: return "cube";
    case QubitMeasurement::covariant: return "covariant";
    case QubitMeasurement::iso: return "iso";
  }
  return "sic";
}

std::string_view to_string(QubitRecon r) {
  return r == QubitRecon::canonical ? "canonical" : "optimal";
}

std::string_view to_string(QubitFigure f) {
  switch (f) {
    case QubitFigure::mse: return "mse";
    case QubitFigure::msb: return "msb";
    case QubitFigure::volume: return "volume";
    case QubitFigure::avg_mse: return "avg_mse";
    case QubitFigure::avg_msb: return "avg_msb";
    case QubitFigure::avg_logvolume: return "avg_logvolume";
  }
  return "mse";
}

QubitMeasurement parse_qubit_measurement(std::string_view name) {
  if (name == "sic" || name == "tetrahedron") return QubitMeasurement::sic;
  if (name == "mub" || name == "octahedron") return QubitMeasurement::mub;
  if (name == "cube") return QubitMeasurement::cube;
  if (name == "covariant") return QubitMeasurement::covariant;
  if (name == "iso" || name == "iso_canonical") return QubitMeasurement::iso;
  throw ValidationError("unknown qubit measurement '" + std::string(name) + "'");
}

QubitRecon parse_qubit_recon(std::string_view name) {
  if (name == "canonical") return QubitRecon::canonical;
  if (name == "optimal") return QubitRecon::optimal;
  throw ValidationError("unknown reconstruction '" + std::string(name) + "'");
}

QubitFigure parse_qubit_figure(std::string_view name) {
  if (name == "mse") return QubitFigure::mse;
  if (name == "msb") return QubitFigure::msb;
  if (name == "volume") return QubitFigure::volume;
  if (name == "avg_mse") return QubitFigure::avg_mse;
  if (name == "avg_msb") return QubitFigure::avg_msb;
  if (name == "avg_logvolume") return QubitFigure::avg_logvolume;
  throw ValidationError("unknown figure '" + std::string(name) + "'");
}

namespace {

double sic_volume(double x, double y, double z) {
  const double s2 = x * x + y * y + z * z;
  const double inner = 2.0 * (std::pow(x, 4) + std::pow(y, 4) + std::pow(z, 4)) +
                       8.0 * std::sqrt(3.0) * x * y * z - s2 * s2 - 6.0 * s2 + 9.0;
  return std::sqrt(2.0 / 3.0) * kPi * std::sqrt(std::max(inner, 0.0));
}

double sic_msb(double x, double y, double z) {
  const double s2 = x * x + y * y + z * z;
  return 2.25 + (s2 + 3.0 * std::sqrt(3.0) * x * y * z) / (2.0 * (1.0 - s2));
}

double sic_avg_logvolume(double s) {
  return sphere_average(
      [s](const Eigen::Vector3d& n) { return std::log(sic_volume(s * n.x(), s * n.y(), s * n.z())); },
      48);
}

}  // namespace

std::optional<double> qubit_closed_form(QubitMeasurement m, const BlochVector& sv, QubitRecon recon,
                                        QubitFigure figure) {
  const double x = sv.x, y = sv.y, z = sv.z;
  const double s2 = sv.norm_squared();
  const double s = std::sqrt(s2);
  if (s > 1.0 + 1e-12) throw ValidationError("Bloch vector outside the unit ball");
  const bool metric = figure == QubitFigure::msb || figure == QubitFigure::avg_msb;
  if (metric && s2 >= 1.0)
    throw BoundaryStateError("Bures-weighted figure requested for a pure state");
  const double x4 = std::pow(x, 4) + std::pow(y, 4) + std::pow(z, 4);

  if (recon == QubitRecon::canonical) {
    const bool tetra = m == QubitMeasurement::sic;
    switch (figure) {
      case QubitFigure::mse:
      case QubitFigure::avg_mse: return (9.0 - s2) / 2.0;
      case QubitFigure::msb: return tetra ? sic_msb(x, y, z) : 2.25 + s2 / (2.0 * (1.0 - s2));
      case QubitFigure::avg_msb: return 2.25 + s2 / (2.0 * (1.0 - s2));
      case QubitFigure::volume:
        return tetra ? sic_volume(x, y, z) : kPi * std::sqrt(2.0 * (3.0 - s2));
      case QubitFigure::avg_logvolume:
        return tetra ? sic_avg_logvolume(s) : std::log(kPi * std::sqrt(2.0 * (3.0 - s2)));
    }
  }

  switch (m) {
    case QubitMeasurement::sic:
      switch (figure) {
        case QubitFigure::mse:
        case QubitFigure::avg_mse: return (9.0 - s2) / 2.0;
        case QubitFigure::msb: return sic_msb(x, y, z);
        case QubitFigure::avg_msb: return 2.25 + s2 / (2.0 * (1.0 - s2));
        case QubitFigure::volume: return sic_volume(x, y, z);
        case QubitFigure::avg_logvolume: return sic_avg_logvolume(s);
      }
      break;
    case QubitMeasurement::mub:
      switch (figure) {
        case QubitFigure::mse:
        case QubitFigure::avg_mse: return 1.5 * (3.0 - s2);
        case QubitFigure::msb: return 0.75 * (3.0 - s2) + 3.0 * (s2 - x4) / (4.0 * (1.0 - s2));
        case QubitFigure::avg_msb: return 2.25 + 3.0 * s2 * s2 / (10.0 * (1.0 - s2));
        case QubitFigure::volume:
          return kPi * std::sqrt(6.0 * (1.0 - x * x) * (1.0 - y * y) * (1.0 - z * z));
        case QubitFigure::avg_logvolume:
          return std::log(std::sqrt(6.0) * kPi) - 3.0 +
                 1.5 * (std::log1p(-s2) + log_ratio_over_s(s));
      }
      break;
    case QubitMeasurement::cube:
      switch (figure) {
        case QubitFigure::mse: return (27.0 - 18.0 * s2 + s2 * s2 + 2.0 * x4) / (2.0 * (3.0 - s2));
        case QubitFigure::avg_mse:
          return (135.0 - 90.0 * s2 + 11.0 * s2 * s2) / (10.0 * (3.0 - s2));
        case QubitFigure::msb: {
          const double x6 = std::pow(x, 6) + std::pow(y, 6) + std::pow(z, 6);
          return (27.0 - 27.0 * s2 - 2.0 * s2 * s2) / (12.0 * (1.0 - s2)) +
                 (6.0 * x4 - 2.0 * x6 - 21.0 * x * x * y * y * z * z) /
                     (3.0 * (3.0 - s2) * (1.0 - s2));
        }
        case QubitFigure::avg_msb:
          return (945.0 - 1260.0 * s2 + 413.0 * s2 * s2 - 26.0 * s2 * s2 * s2) /
                 (140.0 * (3.0 - s2) * (1.0 - s2));
        case QubitFigure::volume: {
          auto sq = [](double v) { return v * v; };
          return kPi / 3.0 *
                 std::sqrt(2.0 * (3.0 - sq(x + y - z)) * (3.0 - sq(x - y + z)) / (3.0 - s2)) *
                 std::sqrt((3.0 - sq(-x + y + z)) * (3.0 - sq(x + y + z)));
        }
        case QubitFigure::avg_logvolume:
          return std::log(3.0 * std::sqrt(2.0) * kPi) - 4.0 +
                 std::log((1.0 - s2) * (1.0 - s2) / std::sqrt(3.0 - s2)) + 2.0 * log_ratio_over_s(s);
      }
      break;
    case QubitMeasurement::covariant: {
      const double b = qubit_covariant_b(std::min(s, 1.0));
      const double beta = qubit_covariant_beta(std::min(s, 1.0));
      switch (figure) {
        case QubitFigure::mse:
        case QubitFigure::avg_mse: return 2.0 / b + inv(beta);
        case QubitFigure::msb:
        case QubitFigure::avg_msb: return 1.0 / b + 1.0 / (2.0 * beta * (1.0 - s2));
        case QubitFigure::volume: return std::isinf(beta) ? 0.0 : 4.0 * kPi / (3.0 * b * std::sqrt(beta));
        case QubitFigure::avg_logvolume:
          return std::isinf(beta) ? -kInf : std::log(4.0 * kPi / 3.0) - std::log(b) - 0.5 * std::log(beta);
      }
      break;
    }
    case QubitMeasurement::iso:
      return std::nullopt;
  }
  return std::nullopt;
}

double qubit_covariant_wmse(double s, const WeightSpec& spec, QubitRecon recon) {
  check_s(s);
  if (spec.kind == WeightKind::hs)
    return *qubit_closed_form(QubitMeasurement::covariant, {0.0, 0.0, s}, recon, QubitFigure::mse);
  if (s >= 1.0) throw BoundaryStateError("metric-weighted figure requested for a pure state");
  const double c = spec.kernel(0.5 * (1.0 + s), 0.5 * (1.0 - s));
  const double s2 = s * s;
  if (recon == QubitRecon::canonical) return 0.75 * c + (3.0 - s2) / (4.0 * (1.0 - s2));
  return c / (2.0 * qubit_covariant_b(s)) + 1.0 / (2.0 * qubit_covariant_beta(s) * (1.0 - s2));
}

PureStateLimits pure_state_limits(int d) {
  if (d < 2) throw ValidationError("dimension must be at least 2");
  PureStateLimits out;
  const double dd = d;
  out.covariant_mse = 2.0 * (dd - 1.0);
  out.covariant_mean_trace = std::exp(std::lgamma(dd - 0.5) - std::lgamma(dd - 1.0));
  out.covariant_mean_hs = std::numbers::sqrt2 * out.covariant_mean_trace;
  out.minimal_mse = dd * dd + dd - 2.0;
  out.trace_distance_ratio = 4.0 * dd / (3.0 * kPi);
  return out;
}

double minimal_ic_bound(int d, double purity) {
  if (d < 2) throw ValidationError("dimension must be at least 2");
  if (purity < 1.0 / d - 1e-12 || purity > 1.0 + 1e-12)
    throw ValidationError("purity must lie in [1/d, 1]");
  const double dd = d;
  return dd * dd + dd - 1.0 - purity;
}

double mub_blue_mse(int d, double purity) {
  if (d < 2) throw ValidationError("dimension must be at least 2");
  if (purity < 1.0 / d - 1e-12 || purity > 1.0 + 1e-12)
    throw ValidationError("purity must lie in [1/d, 1]");
  return (d + 1.0) * (d - purity);
}

const std::vector<FormulaInfo>& formula_catalog() {
  static const std::vector<FormulaInfo> catalog = {
      {"sic_mse", {"d", "purity"}, "SIC BLUE scaled MSE d^2+d-1-purity"},
      {"mub_mse", {"d", "purity"}, "MUB BLUE scaled MSE (d+1)(d-purity)"},
      {"minimal_ic_bound", {"d", "purity"}, "lower bound for minimal IC measurements"},
      {"covariant_a", {"d", "r", "s"}, "g_20"},
      {"covariant_b", {"d", "r", "s"}, "g_11"},
      {"covariant_c", {"d", "r", "s"}, "g_02"},
      {"covariant_beta", {"d", "r", "s"}, "last Fisher eigenvalue"},
      {"covariant_mse", {"d", "r", "s"}, "covariant BLUE scaled MSE"},
      {"covariant_msb", {"d", "r", "s"}, "covariant BLUE scaled MSB"},
      {"covariant_chernoff", {"d", "r", "s"}, "covariant BLUE Chernoff WMSE"},
      {"covariant_volume", {"d", "r", "s"}, "covariant BLUE ellipsoid volume"},
      {"covariant_log_volume", {"d", "r", "s"}, "log of covariant_volume"},
      {"covariant_rank_limit_mse", {"d", "r"}, "scaled MSE at s=1 for r>=2"},
      {"canonical_mse", {"d", "r", "s"}, "covariant canonical scaled MSE"},
      {"canonical_msb", {"d", "r", "s"}, "covariant canonical scaled MSB"},
      {"canonical_chernoff", {"d", "r", "s"}, "covariant canonical Chernoff WMSE"},
      {"canonical_volume", {"d", "r", "s"}, "covariant canonical ellipsoid volume"},
      {"qubit_covariant_b", {"s"}, "printed qubit b"},
      {"qubit_covariant_beta", {"s"}, "printed qubit beta"},
      {"qubit_<sic|mub|cube|covariant|iso>_<canonical|optimal>_<figure>",
       {"x", "y", "z"},
       "qubit catalog; figure is mse, msb, volume, avg_mse, avg_msb or avg_logvolume "
       "(averaged figures also accept s)"},
      {"pure_covariant_mse", {"d"}, "2(d-1)"},
      {"pure_mean_trace", {"d"}, "Gamma(d-1/2)/Gamma(d-1)"},
      {"pure_mean_hs", {"d"}, "sqrt(2) Gamma(d-1/2)/Gamma(d-1)"},
      {"pure_minimal_mse", {"d"}, "d^2+d-2"},
      {"unit_ball_volume", {"n"}, "pi^(n/2)/Gamma(n/2+1)"},
  };
  return catalog;
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) throw ValidationError("missing parameter --" + key);
  return it->second;
}

int int_param(const std::map<std::string, double>& p, const std::string& key) {
  const double v = param(p, key);
  if (std::floor(v) != v) throw ValidationError("parameter --" + key + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

std::optional<double> evaluate_formula(std::string_view name_view,
                                       const std::map<std::string, double>& p) {
  const std::string name(name_view);
  if (name == "sic_mse" || name == "minimal_ic_bound")
    return minimal_ic_bound(int_param(p, "d"), param(p, "purity"));
  if (name == "mub_mse") return mub_blue_mse(int_param(p, "d"), param(p, "purity"));
  if (name.rfind("covariant_", 0) == 0 && name != "covariant_rank_limit_mse") {
    const int d = int_param(p, "d");
    const int r = int_param(p, "r");
    const double s = param(p, "s");
    if (name == "covariant_a") return covariant_params(d, r, s).a;
    if (name == "covariant_b") return covariant_params(d, r, s).b;
    if (name == "covariant_c") return covariant_params(d, r, s).c;
    if (name == "covariant_beta") return covariant_params(d, r, s).beta;
    if (name == "covariant_mse") return covariant_blue_figures(d, r, s).mse;
    if (name == "covariant_msb") return covariant_blue_figures(d, r, s).msb;
    if (name == "covariant_chernoff") return covariant_blue_figures(d, r, s, WeightSpec::chernoff()).wmse;
    if (name == "covariant_volume") return covariant_blue_figures(d, r, s).volume;
    if (name == "covariant_log_volume") return covariant_blue_figures(d, r, s).log_volume;
  }
  if (name == "covariant_rank_limit_mse")
    return covariant_rank_limit_mse(int_param(p, "d"), int_param(p, "r"));
  if (name.rfind("canonical_", 0) == 0) {
    const FamilyState st(int_param(p, "d"), int_param(p, "r"), param(p, "s"));
    if (name == "canonical_mse") return covariant_canonical_figures(st.eigenvalues()).mse;
    if (name == "canonical_msb") return covariant_canonical_figures(st.eigenvalues()).msb;
    if (name == "canonical_chernoff")
      return covariant_canonical_figures(st.eigenvalues(), WeightSpec::chernoff()).wmse;
    if (name == "canonical_volume") return covariant_canonical_figures(st.eigenvalues()).volume;
  }
  if (name == "qubit_covariant_b") return qubit_covariant_b(param(p, "s"));
  if (name == "qubit_covariant_beta") return qubit_covariant_beta(param(p, "s"));
  if (name.rfind("qubit_", 0) == 0) {
    const std::string rest = name.substr(6);
    const auto a = rest.find('_');
    const auto b = a == std::string::npos ? a : rest.find('_', a + 1);
    if (b == std::string::npos) throw ValidationError("unknown formula '" + name + "'");
    const auto m = parse_qubit_measurement(rest.substr(0, a));
    const auto recon = parse_qubit_recon(rest.substr(a + 1, b - a - 1));
    const auto fig = parse_qubit_figure(rest.substr(b + 1));
    BlochVector v{};
    if (p.count("x") || p.count("y") || p.count("z")) {
      v = {p.count("x") ? p.at("x") : 0.0, p.count("y") ? p.at("y") : 0.0,
           p.count("z") ? p.at("z") : 0.0};
    } else {
      v = {0.0, 0.0, param(p, "s")};
    }
    return qubit_closed_form(m, v, recon, fig);
  }
  if (name == "pure_covariant_mse") return pure_state_limits(int_param(p, "d")).covariant_mse;
  if (name == "pure_mean_trace") return pure_state_limits(int_param(p, "d")).covariant_mean_trace;
  if (name == "pure_mean_hs") return pure_state_limits(int_param(p, "d")).covariant_mean_hs;
  if (name == "pure_minimal_mse") return pure_state_limits(int_param(p, "d")).minimal_mse;
  if (name == "unit_ball_volume") return unit_ball_volume(int_param(p, "n"));
  throw ValidationError("unknown formula '" + name + "'");
}

}  // namespace qtomo
