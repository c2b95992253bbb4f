#pragma once

#include <span>
#include <vector>

#include "seatcast/core.hpp"
#include "seatcast/random.hpp"

namespace seatcast {

enum class RespondentSampling {
  kMultinomial,     ///< respondents drawn with replacement (default)
  kHypergeometric,  ///< without replacement; a full census reproduces Z exactly
};

struct SurveyParams {
  double person_fraction = 0.1;    ///< f_n
  double district_fraction = 1.0;  ///< f_s
  RespondentSampling sampling = RespondentSampling::kMultinomial;
};

/// ceil(S * f_s), guarded against floating-point noise.
Index surveyed_district_count(const SurveyParams& params, Index n_districts);

/// round(N_j * f_n).
std::int64_t respondents_in_district(const SurveyParams& params, std::int64_t district_size);

/// Throws std::invalid_argument when the parameters are out of range or leave a
/// surveyed district without respondents.
void validate(const SurveyParams& params, const ElectionConfig& config);

/// Projected result Y = (Y1, Y2) of one survey together with its raw data.
struct SurveyProjection {
  ShareVector vote_share;  ///< Y1
  ShareVector seat_share;  ///< Y2
  CountMatrix respondent_counts;  ///< W_jk, one row per surveyed district; empty for aggregates
  std::vector<Index> surveyed_districts;
  SurveyParams params;

  bool has_counts() const { return respondent_counts.size() > 0; }
};

/// Builds Y1 and Y2 from per-district respondent counts (plurality ties to the lowest index).
SurveyProjection projection_from_counts(CountMatrix respondent_counts, std::vector<Index> surveyed_districts,
                                        const SurveyParams& params);

/// Surveys ceil(S f_s) districts chosen uniformly without replacement and
/// round(N_j f_n) respondents in each.
SurveyProjection run_survey(const CompleteElection& z, const SurveyParams& params, Rng& rng);

/// Component-wise median of Y1 and Y2, each renormalised. Counts are dropped.
SurveyProjection median_projection(std::span<const SurveyProjection> projections);

/// Fraction of n_trials surveys whose projected seat share lies within
/// `error_limit` of the true seat share in every component (0 = exact match).
/// Per-trial seeds are drawn up front so the result does not depend on `workers`.
double accurate_projection_rate(const CompleteElection& z, const SurveyParams& params, int n_trials,
                                double error_limit, Rng& rng, unsigned workers = 1);

/// Same trials evaluated at several error limits at once.
std::vector<double> accurate_projection_rates(const CompleteElection& z, const SurveyParams& params, int n_trials,
                                              std::span<const double> error_limits, Rng& rng,
                                              unsigned workers = 1);

}  // namespace seatcast
