#pragma once

#include <map>
#include <span>
#include <vector>

#include "seatcast/dirichlet.hpp"
#include "seatcast/election_models.hpp"
#include "seatcast/survey.hpp"

namespace seatcast {

/// q(Y | Z) = Dir(Y1 | alpha) Dir(Y2 | beta), fitted from L simulated surveys of Z.
struct SyntheticLikelihood {
  DirichletParams alpha;  ///< vote-share factor
  DirichletParams beta;   ///< seat-share factor
  int n_inner_samples = 0;
  double smoothing = kFitSmoothing;  ///< smoothing used for the fit, reused at evaluation
  bool alpha_degenerate = false;     ///< fit replaced by the capped-precision fallback
  bool beta_degenerate = false;

  double vote_log_likelihood(const ShareVector& y1) const { return log_density(alpha, y1, smoothing); }
  double seat_log_likelihood(const ShareVector& y2) const { return log_density(beta, y2, smoothing); }
  double log_likelihood(const SurveyProjection& y) const {
    return vote_log_likelihood(y.vote_share) + seat_log_likelihood(y.seat_share);
  }
};

struct SynlikFitOptions {
  MleOptions mle;
  /// When the L projections are (numerically) identical the ML estimate does not
  /// exist. A positive value replaces such a fit by mean * degenerate_precision;
  /// zero propagates the FitError instead.
  double degenerate_precision = 1000.0;
};

/// Thrown when a fit fails and no fallback applies. `component()` is "alpha" or "beta".
class SyntheticLikelihoodError : public FitError {
 public:
  SyntheticLikelihoodError(const FitError& cause, std::string component)
      : FitError(cause.kind(), "synthetic likelihood (" + component + "): " + cause.what(), cause.last_iterate(),
                 cause.iterations()),
        component_(std::move(component)) {}
  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

SyntheticLikelihood fit_survey_likelihood(const CompleteElection& z, const SurveyParams& survey_params, int n_inner,
                                          Rng& rng, const SynlikFitOptions& options = {});

/// Fits from already simulated projections.
SyntheticLikelihood fit_projection_likelihood(std::span<const SurveyProjection> projections,
                                              const SynlikFitOptions& options = {});

enum class SeatKernel {
  kSoft,  ///< f(X2 | Z) = exp(-KL(X2, seats(Z)) / tau)
  kHard,  ///< f(X2 | Z) = 1 if KL(X2, seats(Z)) < hard_epsilon, else 0
};

struct PosteriorConfig {
  ElectionConfig election;  ///< size of the simulated elections Z_i
  ElectionModel model = SpmModel{0.9, 100};
  SurveyParams survey;
  DirichletParams prior;  ///< g(X1)
  int n_elections = 200;     ///< M
  int n_inner_samples = 100; ///< L
  SeatKernel seat_kernel = SeatKernel::kSoft;
  double seat_tau = 0.05;
  double seat_hard_epsilon = 1e-3;
  SynlikFitOptions fit;
  unsigned workers = 1;
};

void validate(const PosteriorConfig& cfg);

/// One simulated election Z_i for a candidate vote share.
struct EnsembleMember {
  ShareVector seat_share;
  SyntheticLikelihood likelihood;
};

/// The M elections Z_i ~ h(Z | X1) with their fitted synthetic likelihoods. Depends
/// only on X1 and the seed, so every candidate sharing X1 reuses it.
struct ElectionEnsemble {
  ShareVector vote_share;
  std::vector<EnsembleMember> members;
};

/// Member i uses the stream derive_seed(seed, i); results do not depend on cfg.workers.
ElectionEnsemble build_ensemble(const ShareVector& vote_share, const PosteriorConfig& cfg, std::uint64_t seed);

/// log f(X2 | Z_i) under the configured kernel.
double log_seat_weight(const ShareVector& candidate_seats, const ShareVector& simulated_seats,
                       const PosteriorConfig& cfg);

/// log[(1/M) sum_i q(surveys | Z_i) f(X2 | Z_i)] + log g(X1). Returns -infinity
/// when every Z_i has zero seat weight.
double log_posterior_density(const OutcomeCandidate& x, const ElectionEnsemble& ensemble,
                             std::span<const SurveyProjection> surveys, const PosteriorConfig& cfg);

/// Builds the ensemble from a seed drawn from `rng` and evaluates it.
double log_posterior_density(const OutcomeCandidate& x, std::span<const SurveyProjection> surveys,
                             const PosteriorConfig& cfg, Rng& rng);

struct RankedCandidate {
  std::size_t index = 0;  ///< position in the input list
  OutcomeCandidate candidate;
  double log_density = 0;
};

/// Evaluates candidates with common random numbers: every ensemble is built from
/// the same seed, and ensembles are cached per distinct vote share.
class PosteriorEvaluator {
 public:
  PosteriorEvaluator(PosteriorConfig cfg, std::uint64_t seed);

  const PosteriorConfig& config() const { return cfg_; }
  const ElectionEnsemble& ensemble(const ShareVector& vote_share);
  double log_density(const OutcomeCandidate& x, std::span<const SurveyProjection> surveys);
  /// Sorted by descending log density; ties keep input order.
  std::vector<RankedCandidate> rank(std::span<const OutcomeCandidate> candidates,
                                    std::span<const SurveyProjection> surveys);
  std::size_t cached_ensembles() const { return cache_.size(); }

 private:
  PosteriorConfig cfg_;
  std::uint64_t seed_;
  std::map<std::vector<double>, ElectionEnsemble> cache_;
};

std::vector<RankedCandidate> rank_candidates(std::span<const OutcomeCandidate> candidates,
                                             std::span<const SurveyProjection> surveys, const PosteriorConfig& cfg,
                                             Rng& rng);

/// log(sum exp(v)), -infinity for an empty or all -infinity input.
double log_sum_exp(std::span<const double> values);

}  // namespace seatcast
