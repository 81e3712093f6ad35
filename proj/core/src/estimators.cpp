#include "qtomo/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qtomo {

namespace {

// Relative eigenvalue floor below which a frame superoperator is singular.
constexpr double kSingularRtol = 1e-12;

Superoperator checked_inverse(const Superoperator& f, const char* what) {
  Eigen::SelfAdjointEigenSolver<Superoperator> es(0.5 * (f + f.transpose()));
  const RVector& w = es.eigenvalues();
  if (!(w(0) > kSingularRtol * w(w.size() - 1)))
    throw NotInformationallyComplete(std::string(what) +
                                     ": frame superoperator is singular, measurement is not "
                                     "informationally complete");
  return es.eigenvectors() * w.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

ReconstructionSet from_kets(const Povm& povm, std::vector<OperatorKet> kets,
                            ReconstructionMode mode) {
  const auto& basis = gell_mann_basis(povm.dim());
  ReconstructionSet set;
  set.mode = mode;
  set.operators.reserve(kets.size());
  for (const auto& k : kets) set.operators.push_back(basis.devectorize(k));
  set.kets = std::move(kets);
  return set;
}

void check_sizes(const Povm& povm, const Frequencies& freqs) {
  if (freqs.size() != povm.size())
    throw ValidationError("got " + std::to_string(freqs.size()) + " counts for a POVM with " +
                          std::to_string(povm.size()) + " outcomes");
}

}  // namespace

Frequencies::Frequencies(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw ValidationError("empty count vector");
  shots_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  if (shots_ == 0) throw ValidationError("counts sum to zero");
  values_.resize(static_cast<Eigen::Index>(counts_.size()));
  for (std::size_t k = 0; k < counts_.size(); ++k)
    values_(static_cast<Eigen::Index>(k)) =
        static_cast<double>(counts_[k]) / static_cast<double>(shots_);
}

Frequencies Frequencies::exact(const RVector& probabilities, std::uint64_t nominal_shots) {
  if (probabilities.size() == 0) throw ValidationError("empty probability vector");
  if ((probabilities.array() < -1e-12).any())
    throw ValidationError("negative probability");
  if (std::abs(probabilities.sum() - 1.0) > 1e-10)
    throw ValidationError("probabilities do not sum to 1");
  Frequencies f;
  f.shots_ = nominal_shots;
  f.values_ = probabilities.cwiseMax(0.0);
  f.counts_.resize(static_cast<std::size_t>(probabilities.size()));
  for (Eigen::Index k = 0; k < probabilities.size(); ++k)
    f.counts_[static_cast<std::size_t>(k)] = static_cast<std::uint64_t>(
        std::llround(f.values_(k) * static_cast<double>(nominal_shots)));
  return f;
}

bool Frequencies::has_zero() const {
  return std::any_of(counts_.begin(), counts_.end(), [](auto c) { return c == 0; }) ||
         (values_.array() <= 0.0).any();
}

std::string_view to_string(ReconstructionMode mode) {
  switch (mode) {
    case ReconstructionMode::canonical: return "canonical";
    case ReconstructionMode::blue_oracle: return "blue_oracle";
    case ReconstructionMode::blue_plugin: return "blue_plugin";
    case ReconstructionMode::blue_twostep: return "blue_twostep";
    case ReconstructionMode::incomplete: return "incomplete";
  }
  return "canonical";
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::cle: return "cle";
    case EstimatorKind::blue_oracle: return "blue_oracle";
    case EstimatorKind::blue_plugin: return "blue_plugin";
    case EstimatorKind::blue_twostep: return "blue_twostep";
    case EstimatorKind::mle: return "mle";
  }
  return "cle";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "cle") return EstimatorKind::cle;
  if (name == "blue_oracle" || name == "blue1") return EstimatorKind::blue_oracle;
  if (name == "blue_plugin" || name == "blue2" || name == "blue") return EstimatorKind::blue_plugin;
  if (name == "blue_twostep") return EstimatorKind::blue_twostep;
  if (name == "mle") return EstimatorKind::mle;
  throw ValidationError("unknown estimator '" + std::string(name) + "'");
}

CMatrix ReconstructionSet::estimate(const RVector& frequencies) const {
  if (frequencies.size() != static_cast<Eigen::Index>(operators.size()))
    throw ValidationError("frequency vector does not match the reconstruction set");
  CMatrix rho = CMatrix::Zero(operators.front().rows(), operators.front().cols());
  for (std::size_t k = 0; k < operators.size(); ++k)
    rho += frequencies(static_cast<Eigen::Index>(k)) * operators[k];
  return 0.5 * (rho + rho.adjoint());
}

double ReconstructionSet::unbiasedness_residual(const Povm& povm) const {
  const int n = povm.dim() * povm.dim();
  Superoperator s = Superoperator::Zero(n, n);
  for (std::size_t k = 0; k < kets.size(); ++k) s += kets[k] * povm.kets()[k].transpose();
  return (s - Superoperator::Identity(n, n)).cwiseAbs().maxCoeff();
}

ReconstructionSet canonical_recon(const Povm& povm) {
  const Superoperator finv = checked_inverse(frame_superop(povm), "canonical_recon");
  std::vector<OperatorKet> kets;
  kets.reserve(povm.size());
  for (std::size_t k = 0; k < povm.size(); ++k)
    kets.push_back(povm.dim() * finv * povm.kets()[k] / povm.weights()[k]);
  return from_kets(povm, std::move(kets), ReconstructionMode::canonical);
}

ReconstructionSet weighted_recon(const Povm& povm, const RVector& q, ReconstructionMode mode,
                                 double eps) {
  const Superoperator finv = checked_inverse(frame_superop_from(povm, q, eps), "optimal_recon");
  std::vector<OperatorKet> kets;
  kets.reserve(povm.size());
  for (std::size_t k = 0; k < povm.size(); ++k)
    kets.push_back(finv * povm.kets()[k] / q(static_cast<Eigen::Index>(k)));
  return from_kets(povm, std::move(kets), mode);
}

ReconstructionSet optimal_recon(const Povm& povm, const CMatrix& rho_ref, double eps) {
  return weighted_recon(povm, povm.probabilities(rho_ref), ReconstructionMode::blue_oracle, eps);
}

EstimationResult cle(const Povm& povm, const Frequencies& freqs) {
  check_sizes(povm, freqs);
  EstimationResult r;
  r.kind = EstimatorKind::cle;
  r.estimate = canonical_recon(povm).estimate(freqs.values());
  return r;
}

EstimationResult blue(const Povm& povm, const Frequencies& freqs, const BlueOptions& options) {
  check_sizes(povm, freqs);
  const auto& f = freqs.values();
  const auto K = static_cast<double>(povm.size());
  const auto N = static_cast<double>(freqs.shots());
  EstimationResult r;
  r.kind = options.mode;

  switch (options.mode) {
    case EstimatorKind::blue_oracle: {
      if (!options.rho_true)
        throw ValidationError("blue oracle mode needs the true state");
      const CMatrix& rho = *options.rho_true;
      require_state(rho, "true state", 1e-10);
      if (hermitian_eigenvalues(rho).minCoeff() <= 1e-10)
        throw BoundaryStateError("blue oracle: true state is on the boundary of the state space");
      r.estimate = optimal_recon(povm, rho, options.eps).estimate(f);
      r.scaled_mse_matrix = blue_mse_matrix(povm, rho, options.eps);
      return r;
    }
    case EstimatorKind::blue_plugin: {
      RVector q = f;
      if (freqs.has_zero()) {
        if (options.zero_policy == ZeroFrequencyPolicy::error)
          throw BoundaryStateError("blue plugin: some outcome has zero frequency");
        for (Eigen::Index k = 0; k < q.size(); ++k)
          q(k) = (f(k) * N + 0.5) / (N + 0.5 * K);
      }
      r.estimate = weighted_recon(povm, q, ReconstructionMode::blue_plugin, options.eps).estimate(f);
      return r;
    }
    case EstimatorKind::blue_twostep: {
      const CMatrix pre = canonical_recon(povm).estimate(f);
      RVector p = povm.probabilities(pre);
      // Shrink the pre-estimate toward 1/d until every outcome probability
      // reaches the floor used for zero-frequency regularization.
      const double floor = 0.5 / (N + 0.5 * K);
      double t = 0.0;
      for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double w = povm.weights()[static_cast<std::size_t>(k)] / povm.dim();
        const double floor_k = std::min(floor, 0.5 * w);
        if (p(k) < floor_k) t = std::max(t, (floor_k - p(k)) / (w - p(k)));
      }
      CMatrix ref = pre;
      if (t > 0.0) ref = (1.0 - t) * pre + t * maximally_mixed(povm.dim());
      r.estimate = weighted_recon(povm, povm.probabilities(ref), ReconstructionMode::blue_twostep,
                                  options.eps)
                       .estimate(f);
      return r;
    }
    default:
      throw ValidationError("blue: mode must be blue_oracle, blue_plugin or blue_twostep");
  }
}

double mean_log_likelihood(const Povm& povm, const RVector& frequencies, const CMatrix& rho) {
  const RVector p = povm.probabilities(rho);
  double ll = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (frequencies(k) <= 0.0) continue;
    if (!(p(k) > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += frequencies(k) * std::log(p(k));
  }
  return ll;
}

EstimationResult mle(const Povm& povm, const Frequencies& freqs, const MleOptions& options) {
  check_sizes(povm, freqs);
  const int d = povm.dim();
  const RVector& f = freqs.values();
  const CMatrix id = CMatrix::Identity(d, d);

  CMatrix rho = maximally_mixed(d);
  double ll = mean_log_likelihood(povm, f, rho);
  double eps = options.dilution;

  auto r_operator = [&](const CMatrix& state) {
    const RVector p = povm.probabilities(state);
    CMatrix r = CMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < p.size(); ++k)
      if (f(k) > 0.0) r += (f(k) / p(k)) * povm[static_cast<std::size_t>(k)];
    return r;
  };

  EstimationResult result;
  result.kind = EstimatorKind::mle;
  result.converged = false;
  int it = 0;
  CMatrix r = r_operator(rho);
  for (; it < options.max_iter; ++it) {
    const CMatrix step = id + eps * r;
    CMatrix next = step * rho * step;
    next = 0.5 * (next + next.adjoint());
    next /= next.trace().real();
    const double ll_next = mean_log_likelihood(povm, f, next);
    if (ll_next >= ll) {
      const double gain = ll_next - ll;
      rho = std::move(next);
      ll = ll_next;
      r = r_operator(rho);
      if (gain < options.tol) {
        result.converged = true;
        ++it;
        break;
      }
    } else {
      eps *= 0.5;
      if (eps < 1e-12) {
        result.converged = true;
        break;
      }
    }
  }
  result.iterations = it;
  result.estimate = rho;
  result.log_likelihood = ll;
  result.residual = (r * rho - rho).cwiseAbs().maxCoeff();
  return result;
}

Superoperator mse_matrix(const Povm& povm, const ReconstructionSet& recon, const CMatrix& rho) {
  if (recon.kets.size() != povm.size())
    throw ValidationError("reconstruction set does not match the POVM");
  const RVector p = povm.probabilities(rho);
  const OperatorKet r = gell_mann_basis(povm.dim()).vectorize(rho);
  Superoperator c = -r * r.transpose();
  for (std::size_t k = 0; k < povm.size(); ++k)
    c.noalias() += p(static_cast<Eigen::Index>(k)) * recon.kets[k] * recon.kets[k].transpose();
  return 0.5 * (c + c.transpose());
}

Superoperator blue_mse_matrix(const Povm& povm, const CMatrix& rho, double eps) {
  const Superoperator finv = checked_inverse(frame_superop_at(povm, rho, eps), "blue_mse_matrix");
  const OperatorKet r = gell_mann_basis(povm.dim()).vectorize(rho);
  Superoperator c = finv - r * r.transpose();
  return 0.5 * (c + c.transpose());
}

RMatrix fisher_matrix(const Povm& povm, const CMatrix& rho, const HermitianBasis& basis,
                      double eps) {
  if (basis.dim() != povm.dim()) throw ValidationError("fisher_matrix: basis dimension mismatch");
  const RVector p = povm.probabilities(rho);
  const int m = basis.size() - 1;
  RMatrix info = RMatrix::Zero(m, m);
  RVector v(m);
  for (std::size_t k = 0; k < povm.size(); ++k) {
    const double pk = p(static_cast<Eigen::Index>(k));
    if (!(pk > eps))
      throw BoundaryStateError("boundary state: outcome " + std::to_string(k) +
                                   " has probability " + std::to_string(pk),
                               static_cast<std::ptrdiff_t>(k));
    for (int j = 0; j < m; ++j) v(j) = (basis[j + 1] * povm[k]).trace().real();
    info.noalias() += v * v.transpose() / pk;
  }
  return info;
}

IncompleteReconstruction incomplete_recon(const Povm& povm, const CMatrix& rho, double eps) {
  const Superoperator f = frame_superop_at(povm, rho, eps);
  const Superoperator fplus = pinv(f, 1e-10);
  const RVector p = povm.probabilities(rho);
  std::vector<OperatorKet> kets;
  kets.reserve(povm.size());
  for (std::size_t k = 0; k < povm.size(); ++k)
    kets.push_back(fplus * povm.kets()[k] / p(static_cast<Eigen::Index>(k)));
  IncompleteReconstruction out;
  out.recon = from_kets(povm, std::move(kets), ReconstructionMode::incomplete);
  out.restricted_mse = pinv(bar_restrict(f), 1e-10);
  out.restricted_mse_trace = out.restricted_mse.trace();
  return out;
}

}  // namespace qtomo
