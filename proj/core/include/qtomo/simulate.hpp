#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qtomo/estimators.hpp"
#include "qtomo/metrics.hpp"
#include "qtomo/opspace.hpp"
#include "qtomo/povm.hpp"

namespace qtomo {

/// Counter-based seed derivation: splitmix64 applied to the master seed and
/// each index in turn. Independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Multinomial draw by sequential conditional binomials. Throws
/// ValidationError unless probs >= 0 and sum to 1 within 1e-12 (relative to
/// the number of outcomes).
std::vector<std::uint64_t> sample_counts(const RVector& probs, std::uint64_t shots,
                                         std::mt19937_64& rng);
std::vector<std::uint64_t> sample_counts(const RVector& probs, std::uint64_t shots,
                                         std::uint64_t seed);

/// How the true state of an experiment is given.
struct StateSpec {
  enum class Kind { bloch, family, matrix };
  Kind kind = Kind::bloch;
  BlochVector bloch{};
  int d = 2;
  int r = 1;
  double s = 0.0;
  CMatrix matrix;

  static StateSpec from_bloch(BlochVector v);
  static StateSpec from_family(int d, int r, double s);
  static StateSpec from_matrix(CMatrix rho);

  /// The density matrix; throws ValidationError if it is not a state.
  CMatrix resolve() const;
};

struct ExperimentConfig {
  /// "builtin:<name>" or a POVM JSON file.
  std::string povm = "builtin:cube";
  StateSpec state;
  std::vector<EstimatorKind> estimators = {EstimatorKind::cle};
  std::vector<std::uint64_t> n_grid = {1000};
  int reps = 100;
  std::uint64_t seed = 0;
  /// Per-estimator figures: mse (N ||drho||_HS^2), msb and chernoff (N drho.W.drho
  /// with the local weight at the true state), bloch (raw estimate
  /// coordinates x, y, z; qubits only).
  std::vector<std::string> figures = {"mse"};
  /// Emit N ||rho_A - rho_B||_HS^2 for every estimator pair.
  bool pairwise = true;
  /// 0 uses the hardware concurrency.
  int threads = 0;
  /// Prefix for <output>.csv and <output>_aggregate.csv; empty disables files.
  std::string output;
  ZeroFrequencyPolicy zero_policy = ZeroFrequencyPolicy::regularize;
  MleOptions mle;

  /// Throws ValidationError on an empty grid, N = 0, R < 1, unknown figures.
  void validate() const;
};

/// One row of the raw output. Pairwise rows use estimator "A~B".
struct TrialRecord {
  std::uint64_t n = 0;
  int rep = 0;
  std::string estimator;
  std::string figure;
  double value = 0.0;
  /// Set when the estimator failed on this trial; value is then NaN.
  std::optional<std::string> error;
};

struct AggregateRecord {
  std::uint64_t n = 0;
  std::string estimator;
  std::string figure;
  double mean = 0.0;
  double stderr_ = 0.0;
  /// Number of finite values entering the mean.
  int count = 0;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;
  std::vector<AggregateRecord> aggregate;
  /// Wall time of the whole run in seconds. Not part of the CSV output.
  double wall_time = 0.0;
};

/// Runs every (N, rep) trial, in parallel, and returns rows sorted by
/// (N, rep, estimator, figure) together with per-(N, estimator, figure)
/// aggregates. Estimator failures become error rows and never abort.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::vector<AggregateRecord> aggregate(const std::vector<TrialRecord>& trials);

/// CSV with header N,rep,estimator,figure,value; values in %.17g.
void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& trials);
/// CSV with header N,estimator,figure,mean,stderr,R.
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRecord>& rows);

/// Writes <prefix>.csv and <prefix>_aggregate.csv, creating directories.
void write_experiment(const std::string& prefix, const ExperimentResult& result);

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// R's diagonal moved into Q.
CMatrix haar_unitary(int dim, std::mt19937_64& rng);

struct HaarStats {
  RVector mean;
  RVector stderr_;
  int samples = 0;
};

/// Averages a vector-valued quantity over U diag(spectrum) U^dag for
/// Haar-random U. Sample i uses derive_seed(seed, i), so the result does not
/// depend on `threads`.
HaarStats haar_average(const std::function<RVector(const CMatrix&)>& quantity,
                       const RVector& spectrum, int samples, std::uint64_t seed, int threads = 1);

/// Scalar convenience overload returning {mean, stderr}.
std::pair<double, double> haar_average(const std::function<double(const CMatrix&)>& quantity,
                                       const RVector& spectrum, int samples, std::uint64_t seed,
                                       int threads = 1);

/// Spectrum (1+s)/2, (1-s)/2 of a qubit with Bloch radius s.
RVector qubit_spectrum(double s);

/// Scaled MSE, MSB and log volume of a reconstruction at rho, from the MSE
/// matrix (F(rho)^{-1} - |rho>><<rho| for optimal, canonical C otherwise).
struct PointFigures {
  double mse = 0.0;
  double msb = 0.0;
  double log_volume = 0.0;
};
PointFigures point_figures(const Povm& povm, const CMatrix& rho, bool optimal);

/// Least-squares slope of ln y against ln x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Canned configurations of the figure-reproduction runs.
ExperimentConfig fig1_config(std::uint64_t seed, int reps);

}  // namespace qtomo
