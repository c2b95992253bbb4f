#pragma once

#include <variant>

#include "seatcast/core.hpp"
#include "seatcast/random.hpp"

namespace seatcast {

/// Seatwise polarization model: voters in a district follow local popularity with
/// probability gamma, the target vote share otherwise.
struct SpmParams {
  double gamma = 0.9;
  ElectionConfig config;
  ShareVector target_vote_share;
};

/// Partywise concentration model: a party-k voter joins a district holding other
/// party-k voters with probability gamma_k, a uniformly chosen district otherwise.
struct PcmParams {
  Eigen::VectorXd gammas;
  ElectionConfig config;
  CountVector party_totals;
};

struct BatchConfig {
  std::int64_t batch_size = 100;
};

CompleteElection simulate_spm(const SpmParams& params, Rng& rng);

/// Freezes the choice distribution for each block of `batch_size` voters and draws
/// the block from one multinomial. batch_size 1 consumes the stream exactly like simulate_spm.
CompleteElection simulate_spm_batched(const SpmParams& params, const BatchConfig& batch, Rng& rng);

CompleteElection simulate_pcm(const PcmParams& params, Rng& rng);

/// Rounds N * share to integers summing to N (largest remainder).
CountVector apportion_totals(const ShareVector& share, std::int64_t n_voters);

/// Model selector used by the inference modules: an election is always generated
/// from a vote share X1 and an ElectionConfig.
struct SpmModel {
  double gamma = 0.9;
  std::int64_t batch_size = 1;  ///< 1 = exact sequential process
};

struct PcmModel {
  Eigen::VectorXd gammas;
};

using ElectionModel = std::variant<SpmModel, PcmModel>;

void validate(const ElectionModel& model, Index n_parties);

/// Z ~ h(Z | X1). For PCM the party totals are apportion_totals(X1, N).
CompleteElection simulate_election(const ElectionModel& model, const ElectionConfig& config,
                                   const ShareVector& vote_share, Rng& rng);

}  // namespace seatcast
