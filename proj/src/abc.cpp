#include "seatcast/abc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seatcast/parallel.hpp"

namespace seatcast {

void validate(const AbcConfig& cfg) {
  if (!(cfg.vote_tolerance > 0) || !(cfg.seat_tolerance > 0)) {
    throw std::invalid_argument("AbcConfig: tolerances must be positive");
  }
  if (cfg.target_accepted < 2) throw std::invalid_argument("AbcConfig: target_accepted must be >= 2");
  if (cfg.max_attempts < 0) throw std::invalid_argument("AbcConfig: max_attempts must be >= 0");
  if (cfg.block_size < 1) throw std::invalid_argument("AbcConfig: block_size must be >= 1");
}

AbcExhaustedError::AbcExhaustedError(long attempts, double vote_distance, double seat_distance)
    : std::runtime_error("abc_sample: no acceptance in " + std::to_string(attempts) +
                         " attempts; closest vote KL " + std::to_string(vote_distance) + ", closest seat KL " +
                         std::to_string(seat_distance)),
      attempts_(attempts),
      vote_distance_(vote_distance),
      seat_distance_(seat_distance) {}

std::vector<OutcomeCandidate> AbcSamples::candidates() const {
  std::vector<OutcomeCandidate> out;
  out.reserve(accepted.size());
  for (const AbcAttempt& a : accepted) out.push_back(a.candidate);
  return out;
}

bool rank_orders_agree(const ShareVector& a, const ShareVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("rank_orders_agree: dimension mismatch");
  for (Index i = 0; i < a.size(); ++i) {
    for (Index j = 0; j < a.size(); ++j) {
      if (a[i] > a[j] + kShareTolerance && b[i] < b[j] - kShareTolerance) return false;
    }
  }
  return true;
}

std::vector<SurveyProjection> abc_references(std::span<const SurveyProjection> surveys, const AbcConfig& abc) {
  if (surveys.empty()) throw std::invalid_argument("abc_sample: need at least one survey");
  if (abc.reference == AbcReference::kMedian) return {median_projection(surveys)};
  return {surveys.begin(), surveys.end()};
}

AbcAttempt abc_attempt(std::span<const SurveyProjection> references, const PosteriorConfig& cfg, const AbcConfig& abc,
                       std::uint64_t master_seed, std::uint64_t index) {
  AbcAttempt out;
  out.index = index;
  out.seed = derive_seed(master_seed, index);
  Rng rng = make_rng(out.seed);
  const ShareVector target(sample(cfg.prior, rng));
  const CompleteElection z = simulate_election(cfg.model, cfg.election, target, rng);
  out.candidate = OutcomeCandidate{vote_share_from_election(z), seat_share_from_election(z)};
  const SurveyProjection y = run_survey(z, cfg.survey, rng);
  out.simulated_vote = y.vote_share;
  out.simulated_seat = y.seat_share;
  for (const SurveyProjection& ref : references) {
    out.vote_distance = std::max(out.vote_distance, kl_divergence(y.vote_share, ref.vote_share));
    out.seat_distance = std::max(out.seat_distance, kl_divergence(y.seat_share, ref.seat_share));
    if (abc.require_rank_agreement) {
      out.ranks_agree = out.ranks_agree && rank_orders_agree(y.vote_share, ref.vote_share) &&
                        rank_orders_agree(y.seat_share, ref.seat_share);
    }
  }
  out.accepted = out.vote_distance < abc.vote_tolerance && out.seat_distance < abc.seat_tolerance && out.ranks_agree;
  return out;
}

AbcSamples abc_sample(std::span<const SurveyProjection> surveys, const PosteriorConfig& cfg, const AbcConfig& abc,
                      Rng& rng) {
  validate(abc);
  validate(cfg);
  const std::vector<SurveyProjection> references = abc_references(surveys, abc);
  const std::uint64_t master = draw_seed(rng);
  const long limit = abc.attempt_limit();

  AbcSamples out;
  out.closest_vote_distance = std::numeric_limits<double>::infinity();
  out.closest_seat_distance = std::numeric_limits<double>::infinity();
  std::vector<AbcAttempt> block;
  while (out.attempts < limit && static_cast<int>(out.accepted.size()) < abc.target_accepted) {
    const long start = out.attempts;
    const long count = std::min<long>(abc.block_size, limit - start);
    block.assign(static_cast<std::size_t>(count), AbcAttempt{});
    parallel_for(block.size(), cfg.workers, [&](std::size_t i) {
      block[i] = abc_attempt(references, cfg, abc, master, static_cast<std::uint64_t>(start) + i);
    });
    for (AbcAttempt& a : block) {
      ++out.attempts;
      out.closest_vote_distance = std::min(out.closest_vote_distance, a.vote_distance);
      out.closest_seat_distance = std::min(out.closest_seat_distance, a.seat_distance);
      if (a.accepted) {
        out.accepted.push_back(std::move(a));
        if (static_cast<int>(out.accepted.size()) == abc.target_accepted) break;
      }
    }
  }
  if (out.accepted.empty()) {
    throw AbcExhaustedError(out.attempts, out.closest_vote_distance, out.closest_seat_distance);
  }
  out.exhausted = static_cast<int>(out.accepted.size()) < abc.target_accepted;
  return out;
}

PosteriorFit fit_posterior(std::span<const OutcomeCandidate> accepted, double acceptance_rate,
                           const MleOptions& options) {
  if (accepted.size() < 2) {
    throw FitError(FitError::Kind::kTooFewSamples, "fit_posterior: need at least 2 accepted samples");
  }
  const Index k = accepted.front().vote_share.size();
  const auto n = static_cast<Index>(accepted.size());
  Eigen::MatrixXd votes(n, k);
  Eigen::MatrixXd seats(n, k);
  for (Index i = 0; i < n; ++i) {
    votes.row(i) = accepted[static_cast<std::size_t>(i)].vote_share.values().transpose();
    seats.row(i) = accepted[static_cast<std::size_t>(i)].seat_share.values().transpose();
  }
  return PosteriorFit{mle_fit(votes, options), mle_fit(seats, options), {accepted.begin(), accepted.end()},
                      acceptance_rate};
}

std::pair<BetaParams, BetaParams> party_marginals(const PosteriorFit& fit, Index k) {
  return {beta_marginal(fit.vote_params, k), beta_marginal(fit.seat_params, k)};
}

}  // namespace seatcast
