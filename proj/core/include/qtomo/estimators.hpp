#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qtomo/opspace.hpp"
#include "qtomo/povm.hpp"

namespace qtomo {

/// Outcome counts n_k of N shots and the frequencies f_k = n_k / N.
class Frequencies {
 public:
  /// Throws ValidationError when the counts are empty or sum to zero.
  explicit Frequencies(std::vector<std::uint64_t> counts);

  /// Exact probabilities as "frequencies" with a nominal shot count. Used by
  /// consistency checks where f_k = p_k.
  static Frequencies exact(const RVector& probabilities, std::uint64_t nominal_shots = 1);

  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t shots() const noexcept { return shots_; }
  std::size_t size() const noexcept { return values_.size(); }
  const RVector& values() const noexcept { return values_; }
  bool has_zero() const;

 private:
  Frequencies() = default;
  std::vector<std::uint64_t> counts_;
  std::uint64_t shots_ = 0;
  RVector values_;
};

enum class ReconstructionMode { canonical, blue_oracle, blue_plugin, blue_twostep, incomplete };

std::string_view to_string(ReconstructionMode mode);

/// Reconstruction operators Theta_k; the linear estimate is sum_k f_k Theta_k.
struct ReconstructionSet {
  std::vector<CMatrix> operators;
  std::vector<OperatorKet> kets;
  ReconstructionMode mode = ReconstructionMode::canonical;

  CMatrix estimate(const RVector& frequencies) const;

  /// Max entrywise deviation of sum_k |Theta_k>><<Pi_k| from the identity
  /// superoperator.
  double unbiasedness_residual(const Povm& povm) const;
};

/// Theta_k = d F^{-1}|Pi_k>> / tr(Pi_k). Throws NotInformationallyComplete
/// when the frame superoperator is singular.
ReconstructionSet canonical_recon(const Povm& povm);

/// Theta_k = p_k^{-1} F(rho_ref)^{-1} |Pi_k>> with p_k = tr(Pi_k rho_ref).
ReconstructionSet optimal_recon(const Povm& povm, const CMatrix& rho_ref,
                                double eps = kBoundaryEps);

/// Same construction with arbitrary positive weights q_k in place of p_k.
ReconstructionSet weighted_recon(const Povm& povm, const RVector& q, ReconstructionMode mode,
                                 double eps = kBoundaryEps);

enum class EstimatorKind { cle, blue_oracle, blue_plugin, blue_twostep, mle };

std::string_view to_string(EstimatorKind kind);
/// Accepts cle, blue_oracle (blue1), blue_plugin (blue2), blue_twostep, mle.
EstimatorKind parse_estimator(std::string_view name);

struct EstimationResult {
  CMatrix estimate;
  EstimatorKind kind = EstimatorKind::cle;
  /// Analytic scaled MSE matrix at the reference state, when one is known.
  std::optional<Superoperator> scaled_mse_matrix;
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
  double log_likelihood = 0.0;
};

/// Canonical linear estimator. The estimate has unit trace but need not be
/// positive semidefinite.
EstimationResult cle(const Povm& povm, const Frequencies& freqs);

enum class ZeroFrequencyPolicy { regularize, error };

struct BlueOptions {
  EstimatorKind mode = EstimatorKind::blue_plugin;
  /// Required for blue_oracle.
  std::optional<CMatrix> rho_true;
  /// Plug-in mode only: with `regularize`, when any count is zero the weights
  /// become (n_k + 1/2)/(N + K/2) before building F.
  ZeroFrequencyPolicy zero_policy = ZeroFrequencyPolicy::regularize;
  double eps = kBoundaryEps;
};

/// Best linear unbiased estimator with the optimal reconstruction operators
/// built from the true state (oracle), the frequencies (plugin) or a CLE
/// pre-estimate (twostep).
EstimationResult blue(const Povm& povm, const Frequencies& freqs, const BlueOptions& options);

struct MleOptions {
  int max_iter = 10000;
  /// Stop once an accepted step improves the per-shot log-likelihood by less
  /// than this.
  double tol = 1e-12;
  /// Initial dilution parameter; halved whenever a step would lower the
  /// likelihood.
  double dilution = 1.0;
};

/// sum_k f_k ln p_k(rho), terms with f_k = 0 omitted.
double mean_log_likelihood(const Povm& povm, const RVector& frequencies, const CMatrix& rho);

/// Maximum likelihood by the diluted R rho R iteration from the maximally
/// mixed state. Non-convergence is reported through `converged`, not thrown.
EstimationResult mle(const Povm& povm, const Frequencies& freqs, const MleOptions& options = {});

/// C(rho) = sum_k |Theta_k>> p_k <<Theta_k| - |rho>><<rho|.
Superoperator mse_matrix(const Povm& povm, const ReconstructionSet& recon, const CMatrix& rho);

/// Scaled MSE matrix of the BLUE: F(rho)^{-1} - |rho>><<rho|.
Superoperator blue_mse_matrix(const Povm& povm, const CMatrix& rho, double eps = kBoundaryEps);

/// Fisher information in the traceless elements E_1..E_{d^2-1} of `basis`:
/// I_jk = sum_k tr(E_j Pi) tr(Pi E_k) / p.
RMatrix fisher_matrix(const Povm& povm, const CMatrix& rho, const HermitianBasis& basis,
                      double eps = kBoundaryEps);

struct IncompleteReconstruction {
  ReconstructionSet recon;
  /// C_R = F_bar(rho)^+, the scaled MSE matrix on the reconstruction subspace.
  Superoperator restricted_mse;
  /// Tr C_R.
  double restricted_mse_trace = 0.0;
};

/// Theta_k = p_k^{-1} F(rho)^+ |Pi_k>>; works for measurements that are not
/// informationally complete.
IncompleteReconstruction incomplete_recon(const Povm& povm, const CMatrix& rho,
                                          double eps = kBoundaryEps);

}  // namespace qtomo
