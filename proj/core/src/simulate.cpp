#include "qtomo/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>
#include <tuple>

#include "qtomo/io.hpp"

namespace qtomo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int resolve_threads(int requested, std::size_t tasks) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(n, 1);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(tasks, 1)));
}

// Runs body(i) for i in [0, count) on `threads` workers.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b + 0x632be59bd9b4e019ULL));
}

std::vector<std::uint64_t> sample_counts(const RVector& probs, std::uint64_t shots,
                                         std::mt19937_64& rng) {
  if (probs.size() == 0) throw ValidationError("empty probability vector");
  if ((probs.array() < 0.0).any() || !probs.allFinite())
    throw ValidationError("probabilities must be finite and nonnegative");
  if (std::abs(probs.sum() - 1.0) > 1e-12 * std::max<double>(1.0, static_cast<double>(probs.size())))
    throw ValidationError("probabilities must sum to 1");
  const auto k = static_cast<std::size_t>(probs.size());
  std::vector<std::uint64_t> counts(k, 0);
  std::uint64_t remaining = shots;
  double mass = 1.0;
  for (std::size_t i = 0; i + 1 < k && remaining > 0; ++i) {
    const double p = probs(static_cast<Eigen::Index>(i));
    const double cond = mass > 0.0 ? std::clamp(p / mass, 0.0, 1.0) : 1.0;
    std::uint64_t draw = 0;
    if (cond >= 1.0) draw = remaining;
    else if (cond > 0.0) draw = std::binomial_distribution<std::uint64_t>(remaining, cond)(rng);
    counts[i] = draw;
    remaining -= draw;
    mass -= p;
  }
  counts[k - 1] += remaining;
  return counts;
}

std::vector<std::uint64_t> sample_counts(const RVector& probs, std::uint64_t shots,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_counts(probs, shots, rng);
}

StateSpec StateSpec::from_bloch(BlochVector v) {
  StateSpec s;
  s.kind = Kind::bloch;
  s.bloch = v;
  return s;
}

StateSpec StateSpec::from_family(int d, int r, double mix) {
  StateSpec s;
  s.kind = Kind::family;
  s.d = d;
  s.r = r;
  s.s = mix;
  return s;
}

StateSpec StateSpec::from_matrix(CMatrix rho) {
  StateSpec s;
  s.kind = Kind::matrix;
  s.matrix = std::move(rho);
  return s;
}

CMatrix StateSpec::resolve() const {
  CMatrix rho;
  switch (kind) {
    case Kind::bloch:
      if (bloch.norm_squared() > 1.0 + 1e-12) throw ValidationError("Bloch vector outside the unit ball");
      rho = bloch_state(bloch);
      break;
    case Kind::family: {
      if (d < 2 || r < 1 || r > d - 1 || s < 0.0 || s > 1.0)
        throw ValidationError("family state needs d >= 2, 1 <= r <= d-1, 0 <= s <= 1");
      rho = CMatrix::Zero(d, d);
      for (int j = 0; j < d; ++j) rho(j, j) = (j < r ? s / r : 0.0) + (1.0 - s) / d;
      break;
    }
    case Kind::matrix: rho = matrix; break;
  }
  require_state(rho, "true state", 1e-10);
  return rho;
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw ValidationError("empty N grid");
  for (auto n : n_grid)
    if (n < 1) throw ValidationError("N must be at least 1");
  if (reps < 1) throw ValidationError("repetitions must be at least 1");
  if (estimators.empty()) throw ValidationError("no estimators configured");
  for (const auto& f : figures)
    if (f != "mse" && f != "msb" && f != "chernoff" && f != "bloch")
      throw ValidationError("unknown figure '" + f + "'");
  if (threads < 0) throw ValidationError("thread count must be nonnegative");
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const Povm povm = resolve_povm(config.povm);
  const CMatrix rho = config.state.resolve();
  if (rho.rows() != povm.dim()) throw ValidationError("state and POVM dimensions differ");
  const auto& basis = gell_mann_basis(povm.dim());
  const OperatorKet rho_ket = basis.vectorize(rho);

  RVector probs = povm.probabilities(rho).cwiseMax(0.0);
  probs /= probs.sum();

  auto wants = [&](const char* f) {
    return std::find(config.figures.begin(), config.figures.end(), f) != config.figures.end();
  };
  const bool need_canonical =
      std::find(config.estimators.begin(), config.estimators.end(), EstimatorKind::cle) !=
      config.estimators.end();
  const bool need_oracle =
      std::find(config.estimators.begin(), config.estimators.end(), EstimatorKind::blue_oracle) !=
      config.estimators.end();

  std::optional<ReconstructionSet> canonical;
  std::optional<ReconstructionSet> oracle;
  std::string oracle_error;
  if (need_canonical) canonical = canonical_recon(povm);
  if (need_oracle) {
    try {
      if (hermitian_eigenvalues(rho).minCoeff() <= 1e-10)
        throw BoundaryStateError("blue oracle: true state is on the boundary of the state space");
      oracle = optimal_recon(povm, rho);
    } catch (const Error& e) {
      oracle_error = e.what();
    }
  }

  struct Weight {
    std::string name;
    std::optional<Superoperator> w;
    std::string error;
  };
  std::vector<Weight> weights;
  for (const char* name : {"msb", "chernoff"}) {
    if (!wants(name)) continue;
    Weight w{name, std::nullopt, {}};
    try {
      w.w = weight_superop(rho, std::string(name) == "msb" ? WeightSpec::bures() : WeightSpec::chernoff());
    } catch (const Error& e) {
      w.error = e.what();
    }
    weights.push_back(std::move(w));
  }
  const bool bloch = wants("bloch");
  if (bloch && povm.dim() != 2) throw ValidationError("bloch figure needs a qubit");

  const std::size_t reps = static_cast<std::size_t>(config.reps);
  const std::size_t tasks = config.n_grid.size() * reps;
  std::vector<std::vector<TrialRecord>> out(tasks);

  parallel_for(tasks, resolve_threads(config.threads, tasks), [&](std::size_t t) {
    const std::size_t ni = t / reps;
    const int rep = static_cast<int>(t % reps);
    const std::uint64_t n = config.n_grid[ni];
    auto& rows = out[t];
    const auto counts = sample_counts(probs, n, derive_seed(config.seed, ni, static_cast<std::uint64_t>(rep)));
    const Frequencies freqs(counts);
    const double scale = static_cast<double>(n);

    std::vector<std::pair<std::string, std::optional<CMatrix>>> estimates;
    for (const auto kind : config.estimators) {
      const std::string label(to_string(kind));
      std::optional<CMatrix> est;
      std::string error;
      try {
        switch (kind) {
          case EstimatorKind::cle: est = canonical->estimate(freqs.values()); break;
          case EstimatorKind::blue_oracle:
            if (!oracle) throw BoundaryStateError(oracle_error);
            est = oracle->estimate(freqs.values());
            break;
          case EstimatorKind::blue_plugin:
          case EstimatorKind::blue_twostep: {
            BlueOptions opts;
            opts.mode = kind;
            opts.zero_policy = config.zero_policy;
            est = blue(povm, freqs, opts).estimate;
            break;
          }
          case EstimatorKind::mle: est = mle(povm, freqs, config.mle).estimate; break;
        }
      } catch (const Error& e) {
        error = e.what();
      }
      if (!est) {
        rows.push_back({n, rep, label, "error", std::nan(""), error});
        estimates.emplace_back(label, std::nullopt);
        continue;
      }
      const OperatorKet delta = basis.vectorize(*est) - rho_ket;
      if (wants("mse")) rows.push_back({n, rep, label, "mse", scale * delta.squaredNorm(), std::nullopt});
      for (const auto& w : weights) {
        if (w.w) rows.push_back({n, rep, label, w.name, scale * delta.dot(*w.w * delta), std::nullopt});
        else rows.push_back({n, rep, label, w.name, std::nan(""), w.error});
      }
      if (bloch) {
        const BlochVector b = bloch_vector(*est);
        rows.push_back({n, rep, label, "bloch_x", b.x, std::nullopt});
        rows.push_back({n, rep, label, "bloch_y", b.y, std::nullopt});
        rows.push_back({n, rep, label, "bloch_z", b.z, std::nullopt});
      }
      estimates.emplace_back(label, std::move(est));
    }
    if (config.pairwise) {
      for (std::size_t a = 0; a < estimates.size(); ++a)
        for (std::size_t b = a + 1; b < estimates.size(); ++b) {
          const std::string label = estimates[a].first + "~" + estimates[b].first;
          if (!estimates[a].second || !estimates[b].second) {
            rows.push_back({n, rep, label, "mse", std::nan(""), std::string("estimator failed")});
            continue;
          }
          const double diff = (*estimates[a].second - *estimates[b].second).squaredNorm();
          rows.push_back({n, rep, label, "mse", scale * diff, std::nullopt});
        }
    }
  });

  ExperimentResult result;
  std::size_t total = 0;
  for (const auto& v : out) total += v.size();
  result.trials.reserve(total);
  for (auto& v : out)
    for (auto& r : v) result.trials.push_back(std::move(r));
  result.aggregate = aggregate(result.trials);
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!config.output.empty()) write_experiment(config.output, result);
  return result;
}

std::vector<AggregateRecord> aggregate(const std::vector<TrialRecord>& trials) {
  // Two passes (mean, then deviations) keep the variance accurate.
  std::map<std::tuple<std::uint64_t, std::string, std::string>, std::vector<double>> groups;
  for (const auto& t : trials) {
    if (t.figure == "error") continue;
    auto& g = groups[{t.n, t.estimator, t.figure}];
    if (std::isfinite(t.value)) g.push_back(t.value);
  }
  std::vector<AggregateRecord> rows;
  rows.reserve(groups.size());
  for (const auto& [key, values] : groups) {
    AggregateRecord r;
    r.n = std::get<0>(key);
    r.estimator = std::get<1>(key);
    r.figure = std::get<2>(key);
    r.count = static_cast<int>(values.size());
    if (values.empty()) {
      r.mean = r.stderr_ = std::nan("");
    } else {
      double sum = 0.0;
      for (double v : values) sum += v;
      r.mean = sum / r.count;
      double ss = 0.0;
      for (double v : values) ss += (v - r.mean) * (v - r.mean);
      r.stderr_ = r.count > 1 ? std::sqrt(ss / (r.count - 1) / r.count) : 0.0;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& trials) {
  os << "N,rep,estimator,figure,value\n";
  for (const auto& t : trials)
    os << t.n << ',' << t.rep << ',' << t.estimator << ',' << t.figure << ','
       << format_double(t.value) << '\n';
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRecord>& rows) {
  os << "N,estimator,figure,mean,stderr,R\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.estimator << ',' << r.figure << ',' << format_double(r.mean) << ','
       << format_double(r.stderr_) << ',' << r.count << '\n';
}

void write_experiment(const std::string& prefix, const ExperimentResult& result) {
  const std::filesystem::path base(prefix);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  std::ofstream raw(prefix + ".csv", std::ios::binary);
  std::ofstream agg(prefix + "_aggregate.csv", std::ios::binary);
  if (!raw || !agg) throw ValidationError("cannot write output files with prefix " + prefix);
  write_trials_csv(raw, result.trials);
  write_aggregate_csv(agg, result.aggregate);
}

CMatrix haar_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = {normal(rng), normal(rng)};
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const auto d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : std::complex<double>(1.0, 0.0);
  }
  return q;
}

HaarStats haar_average(const std::function<RVector(const CMatrix&)>& quantity,
                       const RVector& spectrum, int samples, std::uint64_t seed, int threads) {
  if (samples < 1) throw ValidationError("need at least one sample");
  const auto d = static_cast<int>(spectrum.size());
  const CMatrix diag = spectrum.cast<std::complex<double>>().asDiagonal();
  std::vector<RVector> values(static_cast<std::size_t>(samples));
  parallel_for(values.size(), resolve_threads(threads, values.size()), [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    const CMatrix u = haar_unitary(d, rng);
    CMatrix rho = u * diag * u.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    values[i] = quantity(rho);
  });
  HaarStats out;
  out.samples = samples;
  out.mean = RVector::Zero(values.front().size());
  for (const auto& v : values) out.mean += v;
  out.mean /= samples;
  RVector ss = RVector::Zero(out.mean.size());
  for (const auto& v : values) ss += (v - out.mean).cwiseAbs2();
  out.stderr_ = RVector::Zero(ss.size());
  if (samples > 1) out.stderr_ = (ss / (samples - 1.0) / samples).cwiseSqrt();
  return out;
}

std::pair<double, double> haar_average(const std::function<double(const CMatrix&)>& quantity,
                                       const RVector& spectrum, int samples, std::uint64_t seed,
                                       int threads) {
  const auto stats = haar_average(
      [&](const CMatrix& rho) {
        RVector v(1);
        v(0) = quantity(rho);
        return v;
      },
      spectrum, samples, seed, threads);
  return {stats.mean(0), stats.stderr_(0)};
}

RVector qubit_spectrum(double s) {
  if (s < 0.0 || s > 1.0) throw ValidationError("Bloch radius must lie in [0, 1]");
  RVector lam(2);
  lam << 0.5 * (1.0 + s), 0.5 * (1.0 - s);
  return lam;
}

PointFigures point_figures(const Povm& povm, const CMatrix& rho, bool optimal) {
  const Superoperator c =
      optimal ? blue_mse_matrix(povm, rho) : mse_matrix(povm, canonical_recon(povm), rho);
  PointFigures f;
  f.mse = c.trace();
  f.msb = wmse(c, weight_superop(rho, WeightSpec::bures()));
  f.log_volume = log_ellipsoid_volume(c);
  return f;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope needs two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("log-log slope needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ExperimentConfig fig1_config(std::uint64_t seed, int reps) {
  ExperimentConfig c;
  c.povm = "builtin:cube";
  c.state = StateSpec::from_bloch({0.6886, 0.1137, -0.5025});
  c.estimators = {EstimatorKind::cle, EstimatorKind::blue_oracle, EstimatorKind::blue_plugin,
                  EstimatorKind::mle};
  c.n_grid.clear();
  for (int k = 0; k <= 6; ++k)
    c.n_grid.push_back(static_cast<std::uint64_t>(std::llround(std::pow(10.0, 2.0 + 0.5 * k))));
  c.reps = reps;
  c.seed = seed;
  c.figures = {"mse"};
  c.pairwise = true;
  return c;
}

}  // namespace qtomo
