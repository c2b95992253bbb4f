#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "seatcast/synlik.hpp"

namespace seatcast {

enum class AbcReference {
  kMedian,      ///< compare against the median projection of the observed surveys
  kAllSurveys,  ///< every observed survey must pass individually
};

struct AbcConfig {
  double vote_tolerance = 0.05;  ///< on KL(simulated Y1, observed Y1)
  double seat_tolerance = 0.05;  ///< on KL(simulated Y2, observed Y2)
  bool require_rank_agreement = true;
  AbcReference reference = AbcReference::kMedian;
  int target_accepted = 100;
  long max_attempts = 0;  ///< 0 means 100 * target_accepted
  int block_size = 64;    ///< attempts evaluated per parallel round

  long attempt_limit() const { return max_attempts > 0 ? max_attempts : 100L * target_accepted; }
};

void validate(const AbcConfig& cfg);

/// Outcome of a single prior-predictive attempt.
struct AbcAttempt {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  OutcomeCandidate candidate;   ///< realized (X1, X2) of the simulated election
  ShareVector simulated_vote;   ///< surveyed Y1
  ShareVector simulated_seat;   ///< surveyed Y2
  double vote_distance = 0;     ///< worst KL over the references
  double seat_distance = 0;
  bool ranks_agree = true;
  bool accepted = false;
};

struct AbcSamples {
  std::vector<AbcAttempt> accepted;  ///< in attempt order
  long attempts = 0;
  bool exhausted = false;  ///< attempt limit reached before target_accepted
  double closest_vote_distance = 0;
  double closest_seat_distance = 0;

  double acceptance_rate() const { return attempts > 0 ? static_cast<double>(accepted.size()) / attempts : 0.0; }
  std::vector<OutcomeCandidate> candidates() const;
};

/// Thrown when no attempt passes. Carries the smallest distances seen.
class AbcExhaustedError : public std::runtime_error {
 public:
  AbcExhaustedError(long attempts, double vote_distance, double seat_distance);
  long attempts() const { return attempts_; }
  double closest_vote_distance() const { return vote_distance_; }
  double closest_seat_distance() const { return seat_distance_; }

 private:
  long attempts_;
  double vote_distance_;
  double seat_distance_;
};

/// Weak order agreement: no pair of parties is strictly ordered one way in `a`
/// and strictly the other way in `b`.
bool rank_orders_agree(const ShareVector& a, const ShareVector& b);

/// Runs attempt `index` of the stream rooted at `master_seed`. Deterministic, so
/// any accepted sample can be replayed from its recorded index.
AbcAttempt abc_attempt(std::span<const SurveyProjection> references, const PosteriorConfig& cfg, const AbcConfig& abc,
                       std::uint64_t master_seed, std::uint64_t index);

/// Rejection sampler over outcomes. Attempts are evaluated in blocks on cfg.workers
/// threads; acceptance is decided in attempt order so output does not depend on
/// the worker count.
AbcSamples abc_sample(std::span<const SurveyProjection> surveys, const PosteriorConfig& cfg, const AbcConfig& abc,
                      Rng& rng);

/// References the attempts are compared against under `abc.reference`.
std::vector<SurveyProjection> abc_references(std::span<const SurveyProjection> surveys, const AbcConfig& abc);

struct PosteriorFit {
  DirichletParams vote_params;  ///< fitted on accepted X1
  DirichletParams seat_params;  ///< fitted on accepted X2
  std::vector<OutcomeCandidate> accepted;
  double acceptance_rate = 1.0;
};

PosteriorFit fit_posterior(std::span<const OutcomeCandidate> accepted, double acceptance_rate = 1.0,
                           const MleOptions& options = {});

/// Beta marginals (vote, seat) of party k.
std::pair<BetaParams, BetaParams> party_marginals(const PosteriorFit& fit, Index k);

}  // namespace seatcast
