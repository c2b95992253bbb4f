#pragma once

#include <span>
#include <utility>

#include "seatcast/dirichlet.hpp"
#include "seatcast/survey.hpp"

namespace seatcast {

/// Dirichlet-Multinomial conjugate baseline. Vote and seat shares get independent
/// posteriors, optionally with tempered counts.
struct BaselineConfig {
  DirichletParams vote_prior;
  DirichletParams seat_prior;
  double vote_scale = 1.0;
  double seat_scale = 1.0;
};

void validate(const BaselineConfig& cfg);

struct BaselinePosterior {
  DirichletParams vote;
  DirichletParams seat;
};

/// Conjugate update from raw respondent counts (rows = surveyed districts).
/// Seat pseudo-counts are plurality wins among districts with respondents.
BaselinePosterior baseline_posterior(const CountMatrix& respondent_counts, const BaselineConfig& cfg);

/// Throws std::invalid_argument when y carries no respondent counts.
BaselinePosterior baseline_posterior(const SurveyProjection& y, const BaselineConfig& cfg,
                                     const ElectionConfig& election_cfg);

/// Independent surveys: counts are pooled.
BaselinePosterior baseline_posterior(std::span<const SurveyProjection> surveys, const BaselineConfig& cfg,
                                     const ElectionConfig& election_cfg);

double baseline_log_density(const OutcomeCandidate& x, const BaselinePosterior& posterior);

}  // namespace seatcast
