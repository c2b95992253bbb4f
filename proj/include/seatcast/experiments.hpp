#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "seatcast/dirichlet.hpp"
#include "seatcast/election_models.hpp"
#include "seatcast/survey.hpp"

namespace seatcast {

struct Realization {
  CompleteElection election;
  std::uint64_t seed = 0;  ///< stream the election was simulated from
  long tries = 0;
};

/// Simulates with seeds derive_seed(master, 0), derive_seed(master, 1), ... and
/// returns the first election accepted by `accept`, or nothing after max_tries.
std::optional<Realization> find_realization(const ElectionModel& model, const ElectionConfig& config,
                                            const ShareVector& target,
                                            const std::function<bool(const CompleteElection&)>& accept,
                                            std::uint64_t master, long max_tries);

/// Predicate: seat counts equal `seats` exactly.
std::function<bool(const CompleteElection&)> seats_equal(CountVector seats);

OutcomeCandidate outcome_of(const CompleteElection& z);

/// n outcomes of elections simulated from prior draws.
std::vector<OutcomeCandidate> prior_candidates(const DirichletParams& prior, const ElectionModel& model,
                                               const ElectionConfig& config, int n, Rng& rng);

std::vector<SurveyProjection> run_surveys(const CompleteElection& z, const SurveyParams& params, int n, Rng& rng);

/// KL between two outcomes: vote term plus seat term.
double outcome_kl(const OutcomeCandidate& a, const OutcomeCandidate& b);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace seatcast
