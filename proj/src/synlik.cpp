#include "seatcast/synlik.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "seatcast/parallel.hpp"

namespace seatcast {

namespace {

DirichletParams fit_component(const Eigen::MatrixXd& rows, const SynlikFitOptions& options, const char* component,
                              bool& degenerate) {
  try {
    return mle_fit(rows, options.mle);
  } catch (const FitError& e) {
    if (e.kind() == FitError::Kind::kTooFewSamples || options.degenerate_precision <= 0) {
      throw SyntheticLikelihoodError(e, component);
    }
    degenerate = true;
    const double k = static_cast<double>(rows.cols());
    const double eps = options.mle.smoothing;
    const Eigen::VectorXd mean = ((rows.array() + eps) / (1.0 + k * eps)).colwise().mean().transpose();
    return DirichletParams(mean * options.degenerate_precision);
  }
}

}  // namespace

SyntheticLikelihood fit_projection_likelihood(std::span<const SurveyProjection> projections,
                                              const SynlikFitOptions& options) {
  if (projections.size() < 2) {
    throw SyntheticLikelihoodError(FitError(FitError::Kind::kTooFewSamples, "need at least 2 projections"),
                                   "alpha");
  }
  const Index k = projections.front().vote_share.size();
  const auto n = static_cast<Index>(projections.size());
  Eigen::MatrixXd votes(n, k);
  Eigen::MatrixXd seats(n, k);
  for (Index i = 0; i < n; ++i) {
    votes.row(i) = projections[static_cast<std::size_t>(i)].vote_share.values().transpose();
    seats.row(i) = projections[static_cast<std::size_t>(i)].seat_share.values().transpose();
  }
  SyntheticLikelihood out;
  out.n_inner_samples = static_cast<int>(n);
  out.smoothing = options.mle.smoothing;
  out.alpha = fit_component(votes, options, "alpha", out.alpha_degenerate);
  out.beta = fit_component(seats, options, "beta", out.beta_degenerate);
  return out;
}

SyntheticLikelihood fit_survey_likelihood(const CompleteElection& z, const SurveyParams& survey_params, int n_inner,
                                          Rng& rng, const SynlikFitOptions& options) {
  if (n_inner < 2) throw std::invalid_argument("fit_survey_likelihood: need L >= 2");
  std::vector<SurveyProjection> projections;
  projections.reserve(static_cast<std::size_t>(n_inner));
  for (int j = 0; j < n_inner; ++j) projections.push_back(run_survey(z, survey_params, rng));
  return fit_projection_likelihood(projections, options);
}

void validate(const PosteriorConfig& cfg) {
  if (cfg.n_elections < 1) throw std::invalid_argument("PosteriorConfig: M must be >= 1");
  if (cfg.n_inner_samples < 2) throw std::invalid_argument("PosteriorConfig: L must be >= 2");
  if (cfg.prior.size() != cfg.election.n_parties()) {
    throw std::invalid_argument("PosteriorConfig: prior dimension differs from party count");
  }
  if (!(cfg.seat_tau > 0) || !(cfg.seat_hard_epsilon > 0)) {
    throw std::invalid_argument("PosteriorConfig: seat kernel parameters must be positive");
  }
  seatcast::validate(cfg.model, cfg.election.n_parties());
  seatcast::validate(cfg.survey, cfg.election);
}

ElectionEnsemble build_ensemble(const ShareVector& vote_share, const PosteriorConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  if (vote_share.size() != cfg.election.n_parties()) {
    throw std::invalid_argument("build_ensemble: vote share dimension differs from party count");
  }
  std::vector<std::optional<EnsembleMember>> slots(static_cast<std::size_t>(cfg.n_elections));
  parallel_for(slots.size(), cfg.workers, [&](std::size_t i) {
    Rng rng = make_rng(derive_seed(seed, i));
    const CompleteElection z = simulate_election(cfg.model, cfg.election, vote_share, rng);
    slots[i].emplace(EnsembleMember{seat_share_from_election(z),
                                    fit_survey_likelihood(z, cfg.survey, cfg.n_inner_samples, rng, cfg.fit)});
  });
  ElectionEnsemble out{vote_share, {}};
  out.members.reserve(slots.size());
  for (auto& slot : slots) out.members.push_back(std::move(*slot));
  return out;
}

double log_seat_weight(const ShareVector& candidate_seats, const ShareVector& simulated_seats,
                       const PosteriorConfig& cfg) {
  const double kl = kl_divergence(candidate_seats, simulated_seats);
  if (cfg.seat_kernel == SeatKernel::kHard) {
    return kl < cfg.seat_hard_epsilon ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return -kl / cfg.seat_tau;
}

double log_sum_exp(std::span<const double> values) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, v);
  if (!std::isfinite(top)) return top;
  double acc = 0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

double log_posterior_density(const OutcomeCandidate& x, const ElectionEnsemble& ensemble,
                             std::span<const SurveyProjection> surveys, const PosteriorConfig& cfg) {
  if (surveys.empty()) throw std::invalid_argument("log_posterior_density: need at least one survey");
  if (ensemble.members.empty()) throw std::invalid_argument("log_posterior_density: empty ensemble");
  std::vector<double> terms;
  terms.reserve(ensemble.members.size());
  for (const EnsembleMember& member : ensemble.members) {
    double term = log_seat_weight(x.seat_share, member.seat_share, cfg);
    if (std::isinf(term)) {
      terms.push_back(term);
      continue;
    }
    for (const SurveyProjection& y : surveys) term += member.likelihood.log_likelihood(y);
    terms.push_back(term);
  }
  const double mixture = log_sum_exp(terms);
  if (std::isinf(mixture)) return mixture;
  return mixture - std::log(static_cast<double>(ensemble.members.size())) +
         log_density(cfg.prior, x.vote_share, kDensitySmoothing);
}

double log_posterior_density(const OutcomeCandidate& x, std::span<const SurveyProjection> surveys,
                             const PosteriorConfig& cfg, Rng& rng) {
  const ElectionEnsemble ensemble = build_ensemble(x.vote_share, cfg, draw_seed(rng));
  return log_posterior_density(x, ensemble, surveys, cfg);
}

PosteriorEvaluator::PosteriorEvaluator(PosteriorConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), seed_(seed) {
  validate(cfg_);
}

const ElectionEnsemble& PosteriorEvaluator::ensemble(const ShareVector& vote_share) {
  std::vector<double> key(vote_share.values().data(), vote_share.values().data() + vote_share.size());
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(std::move(key), build_ensemble(vote_share, cfg_, seed_)).first;
  return it->second;
}

double PosteriorEvaluator::log_density(const OutcomeCandidate& x, std::span<const SurveyProjection> surveys) {
  return log_posterior_density(x, ensemble(x.vote_share), surveys, cfg_);
}

std::vector<RankedCandidate> PosteriorEvaluator::rank(std::span<const OutcomeCandidate> candidates,
                                                      std::span<const SurveyProjection> surveys) {
  std::vector<RankedCandidate> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.push_back(RankedCandidate{i, candidates[i], log_density(candidates[i], surveys)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) { return a.log_density > b.log_density; });
  return out;
}

std::vector<RankedCandidate> rank_candidates(std::span<const OutcomeCandidate> candidates,
                                             std::span<const SurveyProjection> surveys, const PosteriorConfig& cfg,
                                             Rng& rng) {
  if (candidates.empty()) throw std::invalid_argument("rank_candidates: no candidates");
  PosteriorEvaluator evaluator(cfg, draw_seed(rng));
  return evaluator.rank(candidates, surveys);
}

}  // namespace seatcast
