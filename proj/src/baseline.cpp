#include "seatcast/baseline.hpp"

#include <stdexcept>

namespace seatcast {

void validate(const BaselineConfig& cfg) {
  if (cfg.vote_prior.size() == 0 || cfg.vote_prior.size() != cfg.seat_prior.size()) {
    throw std::invalid_argument("BaselineConfig: priors must be set and share one dimension");
  }
  if (!(cfg.vote_scale > 0 && cfg.vote_scale <= 1) || !(cfg.seat_scale > 0 && cfg.seat_scale <= 1)) {
    throw std::invalid_argument("BaselineConfig: scales must lie in (0,1]");
  }
}

namespace {

struct Tally {
  Eigen::VectorXd votes;
  Eigen::VectorXd seats;
};

void add_counts(Tally& t, const CountMatrix& counts) {
  if (counts.cols() != t.votes.size()) throw std::invalid_argument("baseline_posterior: party count mismatch");
  t.votes += counts.colwise().sum().transpose().cast<double>();
  for (Index j = 0; j < counts.rows(); ++j) {
    if (counts.row(j).sum() > 0) t.seats(plurality_winner(counts.row(j))) += 1.0;
  }
}

BaselinePosterior finish(const Tally& t, const BaselineConfig& cfg) {
  return BaselinePosterior{DirichletParams(cfg.vote_prior.alpha() + cfg.vote_scale * t.votes),
                           DirichletParams(cfg.seat_prior.alpha() + cfg.seat_scale * t.seats)};
}

Tally empty_tally(Index k) { return Tally{Eigen::VectorXd::Zero(k), Eigen::VectorXd::Zero(k)}; }

}  // namespace

BaselinePosterior baseline_posterior(const CountMatrix& respondent_counts, const BaselineConfig& cfg) {
  validate(cfg);
  Tally t = empty_tally(cfg.vote_prior.size());
  add_counts(t, respondent_counts);
  return finish(t, cfg);
}

BaselinePosterior baseline_posterior(const SurveyProjection& y, const BaselineConfig& cfg,
                                     const ElectionConfig& election_cfg) {
  return baseline_posterior(std::span<const SurveyProjection>(&y, 1), cfg, election_cfg);
}

BaselinePosterior baseline_posterior(std::span<const SurveyProjection> surveys, const BaselineConfig& cfg,
                                     const ElectionConfig& election_cfg) {
  validate(cfg);
  if (cfg.vote_prior.size() != election_cfg.n_parties()) {
    throw std::invalid_argument("baseline_posterior: prior dimension differs from party count");
  }
  Tally t = empty_tally(election_cfg.n_parties());
  for (const SurveyProjection& y : surveys) {
    if (!y.has_counts()) throw std::invalid_argument("baseline_posterior: survey carries no respondent counts");
    add_counts(t, y.respondent_counts);
  }
  return finish(t, cfg);
}

double baseline_log_density(const OutcomeCandidate& x, const BaselinePosterior& posterior) {
  return log_density(posterior.vote, x.vote_share) + log_density(posterior.seat, x.seat_share);
}

}  // namespace seatcast
