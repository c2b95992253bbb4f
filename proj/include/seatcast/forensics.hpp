#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "seatcast/synlik.hpp"

namespace seatcast {

struct ForensicsConfig {
  int n_reference_samples = 5000;  ///< N prior-predictive draws
  double eps_vote = 0.01;          ///< KL threshold between survey vote shares
  double eps_seat = 0.05;          ///< KL threshold between survey seat shares
  double x_match_vote_eps = 0.02;  ///< KL closeness of X^c_1 to the observed X1
  double x_match_seat_eps = 0.05;  ///< KL closeness of X^c_2 to the observed X2
  int min_conditioning_samples = 5;
  DirichletParams prior;
  ElectionConfig election;
  ElectionModel model = SpmModel{0.9, 1};
  SurveyParams survey;
  int mode_elections = 20;             ///< elections consistent with x used to fit p(Y | x)
  int mode_surveys_per_election = 20;  ///< surveys per such election
  long mode_max_attempts = 0;          ///< 0 means 500 * mode_elections
  SynlikFitOptions fit;
  unsigned workers = 1;
};

void validate(const ForensicsConfig& cfg);

/// One prior-predictive draw: the realized outcome and one survey of it.
struct ReferenceSample {
  OutcomeCandidate x;
  ShareVector y_vote;
  ShareVector y_seat;
};

/// Shared by the marginal and conditional estimators.
struct ReferenceCache {
  std::vector<ReferenceSample> samples;
  std::uint64_t seed = 0;
};

/// Sample i uses the stream derive_seed(seed, i).
ReferenceCache build_reference_cache(const ForensicsConfig& cfg, Rng& rng);

struct DensityEstimate {
  double value = 0;          ///< matched / pool
  std::size_t matched = 0;
  std::size_t pool = 0;      ///< samples the fraction is taken over
  bool low_confidence = false;  ///< no sample matched
};

bool survey_matches(const ReferenceSample& sample, const SurveyProjection& y, const ForensicsConfig& cfg);

/// Fraction of cached surveys within (eps_vote, eps_seat) of y.
DensityEstimate marginal_p_y(const SurveyProjection& y, const ReferenceCache& cache, const ForensicsConfig& cfg);

/// Builds a fresh cache and evaluates p(y) on it.
std::pair<DensityEstimate, ReferenceCache> estimate_marginal_p_y(const SurveyProjection& y,
                                                                 const ForensicsConfig& cfg, Rng& rng);

class InsufficientConditioningError : public std::runtime_error {
 public:
  InsufficientConditioningError(std::size_t found, std::size_t required);
  std::size_t found() const { return found_; }
  std::size_t required() const { return required_; }

 private:
  std::size_t found_;
  std::size_t required_;
};

/// Cached samples whose outcome lies within the x-match thresholds of x.
std::vector<std::size_t> conditioning_set(const OutcomeCandidate& x, const ReferenceCache& cache,
                                          const ForensicsConfig& cfg);

/// Same indicator fraction restricted to the conditioning set. Throws
/// InsufficientConditioningError when that set is smaller than min_conditioning_samples.
DensityEstimate estimate_conditional_p_y_given_x(const SurveyProjection& y, const OutcomeCandidate& x,
                                                 const ReferenceCache& cache, const ForensicsConfig& cfg);

/// Synthetic likelihood p(Y | x) and the log density at its maximum.
struct ModeReference {
  SyntheticLikelihood likelihood;
  double vote_log_max = 0;
  double seat_log_max = 0;
  bool empirical_max = false;  ///< some parameter <= 1, maximum taken over the fitting samples
  Eigen::MatrixXd vote_samples;
  Eigen::MatrixXd seat_samples;
  int elections_used = 0;
  long attempts = 0;
};

/// Fits p(Y | x) from surveys of elections simulated from x.vote_share whose
/// realized outcome lies within the x-match thresholds of x.
ModeReference build_mode_reference(const OutcomeCandidate& x, const ForensicsConfig& cfg, Rng& rng);

/// Fits p(Y | x) from surveys of a known complete election.
ModeReference build_mode_reference(const CompleteElection& z, const ForensicsConfig& cfg, Rng& rng);

struct ModeRatio {
  double value = 0;
  bool empirical_max = false;
};

/// p(y | x) / max_Y p(Y | x), in [0, 1].
ModeRatio likelihood_mode_ratio(const SurveyProjection& y, const ModeReference& reference);

struct SurveyVerdict {
  double nonparametric_ratio = 0;
  bool ratio_indeterminate = false;  ///< p(y) = 0 and p(y | x) = 0
  double mode_ratio = 0;
  bool mode_empirical_max = false;
  double p_y = 0;
  double p_y_given_x = 0;
  std::size_t matched_joint = 0;     ///< conditioning samples matching y
  std::size_t matched_marginal = 0;  ///< all samples matching y
  std::size_t conditioning = 0;
  std::size_t total = 0;
};

/// Nonparametric part of the verdict; mode_ratio is left at 0.
SurveyVerdict nonparametric_likelihood_ratio(const SurveyProjection& y, const OutcomeCandidate& x,
                                             const ReferenceCache& cache, const ForensicsConfig& cfg);

SurveyVerdict nonparametric_likelihood_ratio(const SurveyProjection& y, const OutcomeCandidate& x,
                                             const ForensicsConfig& cfg, Rng& rng);

/// Both ratios for one survey.
SurveyVerdict evaluate_survey(const SurveyProjection& y, const OutcomeCandidate& x, const ReferenceCache& cache,
                              const ModeReference& reference, const ForensicsConfig& cfg);

/// X_fake ~ prior, Z_fake ~ election model, survey of Z_fake.
SurveyProjection generate_fake_survey(const ForensicsConfig& cfg, Rng& rng);

/// (1 - lambda) y_gen + lambda e_k for both shares; respondent counts are dropped.
SurveyProjection generate_malicious_survey(const SurveyProjection& y_gen, Index favored_party, double lambda);

/// Favored party drawn uniformly.
SurveyProjection generate_malicious_survey(const SurveyProjection& y_gen, double lambda, Rng& rng);

}  // namespace seatcast
