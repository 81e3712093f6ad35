#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtomo/metrics.hpp"
#include "qtomo/opspace.hpp"
#include "qtomo/povm.hpp"

namespace qtomo {

/// rho_r(s) = (s/r) P_r + (1-s)/d: the mixture of a rank-r projector state
/// and the maximally mixed state.
struct FamilyState {
  int d = 2;
  int r = 1;
  double s = 0.0;

  /// Throws ValidationError unless 1 <= r <= d-1 and 0 <= s <= 1.
  FamilyState(int d, int r, double s);

  double lambda1() const { return s / r + (1.0 - s) / d; }
  double lambda2() const { return (1.0 - s) / d; }
  RVector eigenvalues() const;
  /// Diagonal density matrix with the r largest eigenvalues first.
  CMatrix matrix() const;
};

/// Eigenvalues a, b, c, beta of the Fisher information of the covariant
/// measurement at rho_r(s). An infinite c (r = 1, s = 1) is reported as
/// +infinity, with beta following it.
struct CovariantParams {
  int d = 2;
  int r = 1;
  double s = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double beta = 0.0;

  bool c_infinite() const;
};

/// g_jk of the covariant frame superoperator. For s <= 1 the integral is
/// summed as a power series when q = ds/(ds + r(1-s)) <= 1/2 and otherwise
/// through the closed-form antiderivative
///   1/2 (1+u)^m ln((1+u)/u) - 1/2 sum_{n<m} (1+u)^n/(m-n),  u = r(1-s)/(ds).
double covariant_g(int d, int r, double s, int j, int k);

/// a = g_20, b = g_11, c = g_02 and
/// beta = [(r+1)(d-r)a + r(d-r+1)c - 2r(d-r)b]/d.
CovariantParams covariant_params(int d, int r, double s);

/// Printed qubit forms b = [2s - (1-s^2)L]/(2s^3), beta = (L - 2s)/s^3 with
/// L = ln((1+s)/(1-s)); a Taylor series is used for s < 1e-2.
double qubit_covariant_b(double s);
double qubit_covariant_beta(double s);

struct FigureSet {
  double mse = 0.0;
  /// Bures-weighted MSE; empty on the boundary.
  std::optional<double> msb;
  /// WMSE for the requested weight; empty on the boundary for metric weights.
  std::optional<double> wmse;
  std::optional<double> volume;
  std::optional<double> log_volume;
};

/// Covariant measurement with optimal (BLUE) reconstruction at rho_r(s).
FigureSet covariant_blue_figures(int d, int r, double s, const WeightSpec& spec = WeightSpec::hs());

/// Covariant (equivalently any isotropic) measurement with canonical
/// reconstruction at a state with the given spectrum.
FigureSet covariant_canonical_figures(const RVector& eigenvalues,
                                      const WeightSpec& spec = WeightSpec::hs());

/// Scaled MSE of rho_r(1) for r >= 2: d^2 + 2d - 1 - d^2/r - 1/r.
double covariant_rank_limit_mse(int d, int r);

enum class QubitMeasurement { sic, mub, cube, covariant, iso };
enum class QubitRecon { canonical, optimal };
enum class QubitFigure { mse, msb, volume, avg_mse, avg_msb, avg_logvolume };

std::string_view to_string(QubitMeasurement m);
std::string_view to_string(QubitRecon r);
std::string_view to_string(QubitFigure f);
QubitMeasurement parse_qubit_measurement(std::string_view name);
QubitRecon parse_qubit_recon(std::string_view name);
QubitFigure parse_qubit_figure(std::string_view name);

/// Closed-form qubit figures of merit in the HS convention. The tetrahedron
/// is taken with vertex (1,1,1)/sqrt(3) and the cube in standard orientation.
/// Averaged figures depend only on |s|. Returns nullopt for combinations with
/// no closed form (numeric-only). Throws ValidationError for |s| > 1 and
/// BoundaryStateError for metric figures at |s| = 1.
std::optional<double> qubit_closed_form(QubitMeasurement m, const BlochVector& s, QubitRecon recon,
                                        QubitFigure figure);

/// Covariant qubit WMSE for a Morozova-Chentsov weight.
double qubit_covariant_wmse(double s, const WeightSpec& spec, QubitRecon recon);

struct PureStateLimits {
  /// 2(d-1)
  double covariant_mse = 0.0;
  /// Gamma(d - 1/2)/Gamma(d - 1)
  double covariant_mean_trace = 0.0;
  /// sqrt(2) times the mean trace distance.
  double covariant_mean_hs = 0.0;
  /// d^2 + d - 2
  double minimal_mse = 0.0;
  /// 4d/(3 pi): approximate large-d ratio of mean trace distances between
  /// minimal tomography and the covariant measurement.
  double trace_distance_ratio = 0.0;
};

PureStateLimits pure_state_limits(int d);

/// d^2 + d - 1 - purity; the SIC value of the scaled MSE.
double minimal_ic_bound(int d, double purity);

/// BLUE scaled MSE of a complete set of MUB: (d+1)(d - purity).
double mub_blue_mse(int d, double purity);

/// Named evaluators used by the command line front end.
struct FormulaInfo {
  std::string name;
  std::vector<std::string> params;
  std::string description;
};

const std::vector<FormulaInfo>& formula_catalog();

/// Evaluate a formula from formula_catalog(). Throws ValidationError for an
/// unknown name or a missing parameter; returns nullopt for numeric-only
/// combinations.
std::optional<double> evaluate_formula(std::string_view name,
                                       const std::map<std::string, double>& params);

}  // namespace qtomo
