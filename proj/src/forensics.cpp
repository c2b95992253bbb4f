#include "seatcast/forensics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "seatcast/parallel.hpp"

namespace seatcast {

void validate(const ForensicsConfig& cfg) {
  if (cfg.n_reference_samples < 100) throw std::invalid_argument("ForensicsConfig: need at least 100 reference samples");
  if (!(cfg.eps_vote > 0) || !(cfg.eps_seat > 0) || !(cfg.x_match_vote_eps > 0) || !(cfg.x_match_seat_eps > 0)) {
    throw std::invalid_argument("ForensicsConfig: thresholds must be positive");
  }
  if (cfg.min_conditioning_samples < 1) throw std::invalid_argument("ForensicsConfig: min_conditioning_samples >= 1");
  if (cfg.mode_elections < 1 || cfg.mode_elections * cfg.mode_surveys_per_election < 2) {
    throw std::invalid_argument("ForensicsConfig: mode reference needs at least 2 surveys");
  }
  if (cfg.prior.size() != cfg.election.n_parties()) {
    throw std::invalid_argument("ForensicsConfig: prior dimension differs from party count");
  }
  seatcast::validate(cfg.model, cfg.election.n_parties());
  seatcast::validate(cfg.survey, cfg.election);
}

ReferenceCache build_reference_cache(const ForensicsConfig& cfg, Rng& rng) {
  validate(cfg);
  ReferenceCache cache;
  cache.seed = draw_seed(rng);
  std::vector<std::optional<ReferenceSample>> slots(static_cast<std::size_t>(cfg.n_reference_samples));
  parallel_for(slots.size(), cfg.workers, [&](std::size_t i) {
    Rng r = make_rng(derive_seed(cache.seed, i));
    const ShareVector target = sample(cfg.prior, r);
    const CompleteElection z = simulate_election(cfg.model, cfg.election, target, r);
    const SurveyProjection y = run_survey(z, cfg.survey, r);
    slots[i].emplace(ReferenceSample{{vote_share_from_election(z), seat_share_from_election(z)},
                                     y.vote_share, y.seat_share});
  });
  cache.samples.reserve(slots.size());
  for (auto& s : slots) cache.samples.push_back(std::move(*s));
  return cache;
}

bool survey_matches(const ReferenceSample& sample, const SurveyProjection& y, const ForensicsConfig& cfg) {
  return kl_divergence(sample.y_vote, y.vote_share) < cfg.eps_vote &&
         kl_divergence(sample.y_seat, y.seat_share) < cfg.eps_seat;
}

DensityEstimate marginal_p_y(const SurveyProjection& y, const ReferenceCache& cache, const ForensicsConfig& cfg) {
  if (cache.samples.empty()) throw std::invalid_argument("marginal_p_y: empty reference cache");
  DensityEstimate out;
  out.pool = cache.samples.size();
  for (const ReferenceSample& s : cache.samples) out.matched += survey_matches(s, y, cfg) ? 1 : 0;
  out.value = static_cast<double>(out.matched) / static_cast<double>(out.pool);
  out.low_confidence = out.matched == 0;
  return out;
}

std::pair<DensityEstimate, ReferenceCache> estimate_marginal_p_y(const SurveyProjection& y,
                                                                 const ForensicsConfig& cfg, Rng& rng) {
  ReferenceCache cache = build_reference_cache(cfg, rng);
  DensityEstimate estimate = marginal_p_y(y, cache, cfg);
  return {estimate, std::move(cache)};
}

InsufficientConditioningError::InsufficientConditioningError(std::size_t found, std::size_t required)
    : std::runtime_error("conditional p(y|x): only " + std::to_string(found) + " reference samples near x, need " +
                         std::to_string(required) + "; raise n_reference_samples or loosen the x-match thresholds"),
      found_(found),
      required_(required) {}

std::vector<std::size_t> conditioning_set(const OutcomeCandidate& x, const ReferenceCache& cache,
                                          const ForensicsConfig& cfg) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cache.samples.size(); ++i) {
    const OutcomeCandidate& c = cache.samples[i].x;
    if (kl_divergence(c.vote_share, x.vote_share) < cfg.x_match_vote_eps &&
        kl_divergence(c.seat_share, x.seat_share) < cfg.x_match_seat_eps) {
      out.push_back(i);
    }
  }
  return out;
}

DensityEstimate estimate_conditional_p_y_given_x(const SurveyProjection& y, const OutcomeCandidate& x,
                                                 const ReferenceCache& cache, const ForensicsConfig& cfg) {
  const std::vector<std::size_t> near = conditioning_set(x, cache, cfg);
  const auto required = static_cast<std::size_t>(cfg.min_conditioning_samples);
  if (near.size() < required) throw InsufficientConditioningError(near.size(), required);
  DensityEstimate out;
  out.pool = near.size();
  for (std::size_t i : near) out.matched += survey_matches(cache.samples[i], y, cfg) ? 1 : 0;
  out.value = static_cast<double>(out.matched) / static_cast<double>(out.pool);
  out.low_confidence = out.matched == 0;
  return out;
}

namespace {

double component_log_max(const DirichletParams& params, const Eigen::MatrixXd& samples, double eps, bool& empirical) {
  if ((params.alpha().array() > 1.0).all()) return log_density(params, mode(params), eps);
  empirical = true;
  double best = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < samples.rows(); ++i) {
    best = std::max(best, log_density(params, samples.row(i).transpose(), eps));
  }
  return best;
}

ModeReference finish_reference(std::vector<SurveyProjection> projections, const ForensicsConfig& cfg) {
  ModeReference out;
  out.likelihood = fit_projection_likelihood(projections, cfg.fit);
  const Index k = cfg.election.n_parties();
  const auto n = static_cast<Index>(projections.size());
  out.vote_samples.resize(n, k);
  out.seat_samples.resize(n, k);
  for (Index i = 0; i < n; ++i) {
    out.vote_samples.row(i) = projections[static_cast<std::size_t>(i)].vote_share.values().transpose();
    out.seat_samples.row(i) = projections[static_cast<std::size_t>(i)].seat_share.values().transpose();
  }
  const double eps = out.likelihood.smoothing;
  out.vote_log_max = component_log_max(out.likelihood.alpha, out.vote_samples, eps, out.empirical_max);
  out.seat_log_max = component_log_max(out.likelihood.beta, out.seat_samples, eps, out.empirical_max);
  return out;
}

}  // namespace

ModeReference build_mode_reference(const OutcomeCandidate& x, const ForensicsConfig& cfg, Rng& rng) {
  validate(cfg);
  const long limit = cfg.mode_max_attempts > 0 ? cfg.mode_max_attempts : 500L * cfg.mode_elections;
  const std::uint64_t master = draw_seed(rng);
  std::vector<SurveyProjection> projections;
  int used = 0;
  long attempts = 0;
  const long block = std::max<long>(16, cfg.mode_elections);
  while (used < cfg.mode_elections && attempts < limit) {
    const long count = std::min(block, limit - attempts);
    std::vector<std::vector<SurveyProjection>> found(static_cast<std::size_t>(count));
    parallel_for(found.size(), cfg.workers, [&](std::size_t i) {
      Rng r = make_rng(derive_seed(master, static_cast<std::uint64_t>(attempts) + i));
      const CompleteElection z = simulate_election(cfg.model, cfg.election, x.vote_share, r);
      if (kl_divergence(vote_share_from_election(z), x.vote_share) >= cfg.x_match_vote_eps ||
          kl_divergence(seat_share_from_election(z), x.seat_share) >= cfg.x_match_seat_eps) {
        return;
      }
      for (int j = 0; j < cfg.mode_surveys_per_election; ++j) found[i].push_back(run_survey(z, cfg.survey, r));
    });
    for (auto& f : found) {
      ++attempts;
      if (f.empty()) continue;
      projections.insert(projections.end(), f.begin(), f.end());
      if (++used == cfg.mode_elections) break;
    }
  }
  if (projections.size() < 2) {
    throw InsufficientConditioningError(static_cast<std::size_t>(used), static_cast<std::size_t>(cfg.mode_elections));
  }
  ModeReference out = finish_reference(std::move(projections), cfg);
  out.elections_used = used;
  out.attempts = attempts;
  return out;
}

ModeReference build_mode_reference(const CompleteElection& z, const ForensicsConfig& cfg, Rng& rng) {
  validate(cfg);
  const int n = cfg.mode_elections * cfg.mode_surveys_per_election;
  std::vector<SurveyProjection> projections;
  projections.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) projections.push_back(run_survey(z, cfg.survey, rng));
  ModeReference out = finish_reference(std::move(projections), cfg);
  out.elections_used = 1;
  out.attempts = 1;
  return out;
}

ModeRatio likelihood_mode_ratio(const SurveyProjection& y, const ModeReference& reference) {
  const SyntheticLikelihood& q = reference.likelihood;
  const double vote = q.vote_log_likelihood(y.vote_share);
  const double seat = q.seat_log_likelihood(y.seat_share);
  // The empirical maximum is a lower bound on the true one; y itself joins it.
  const double vote_max = reference.empirical_max ? std::max(reference.vote_log_max, vote) : reference.vote_log_max;
  const double seat_max = reference.empirical_max ? std::max(reference.seat_log_max, seat) : reference.seat_log_max;
  return ModeRatio{std::min(1.0, std::exp(vote + seat - vote_max - seat_max)), reference.empirical_max};
}

SurveyVerdict nonparametric_likelihood_ratio(const SurveyProjection& y, const OutcomeCandidate& x,
                                             const ReferenceCache& cache, const ForensicsConfig& cfg) {
  const DensityEstimate marginal = marginal_p_y(y, cache, cfg);
  const DensityEstimate conditional = estimate_conditional_p_y_given_x(y, x, cache, cfg);
  SurveyVerdict v;
  v.p_y = marginal.value;
  v.p_y_given_x = conditional.value;
  v.matched_marginal = marginal.matched;
  v.matched_joint = conditional.matched;
  v.conditioning = conditional.pool;
  v.total = marginal.pool;
  if (marginal.matched == 0) {
    v.ratio_indeterminate = true;
    v.nonparametric_ratio = 0;
  } else {
    v.nonparametric_ratio = conditional.value / marginal.value;
  }
  return v;
}

SurveyVerdict nonparametric_likelihood_ratio(const SurveyProjection& y, const OutcomeCandidate& x,
                                             const ForensicsConfig& cfg, Rng& rng) {
  const ReferenceCache cache = build_reference_cache(cfg, rng);
  return nonparametric_likelihood_ratio(y, x, cache, cfg);
}

SurveyVerdict evaluate_survey(const SurveyProjection& y, const OutcomeCandidate& x, const ReferenceCache& cache,
                              const ModeReference& reference, const ForensicsConfig& cfg) {
  SurveyVerdict v = nonparametric_likelihood_ratio(y, x, cache, cfg);
  const ModeRatio m = likelihood_mode_ratio(y, reference);
  v.mode_ratio = m.value;
  v.mode_empirical_max = m.empirical_max;
  return v;
}

SurveyProjection generate_fake_survey(const ForensicsConfig& cfg, Rng& rng) {
  validate(cfg);
  const ShareVector fake = sample(cfg.prior, rng);
  const CompleteElection z = simulate_election(cfg.model, cfg.election, fake, rng);
  return run_survey(z, cfg.survey, rng);
}

SurveyProjection generate_malicious_survey(const SurveyProjection& y_gen, Index favored_party, double lambda) {
  const Index k = y_gen.vote_share.size();
  if (favored_party < 0 || favored_party >= k) throw std::out_of_range("generate_malicious_survey: party index");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("generate_malicious_survey: lambda in [0,1]");
  const Eigen::VectorXd e = ShareVector::unit(k, favored_party).values();
  auto skew = [&](const ShareVector& s) {
    return ShareVector::normalized(((1.0 - lambda) * s.values() + lambda * e).eval());
  };
  return SurveyProjection{skew(y_gen.vote_share), skew(y_gen.seat_share), CountMatrix(), y_gen.surveyed_districts,
                          y_gen.params};
}

SurveyProjection generate_malicious_survey(const SurveyProjection& y_gen, double lambda, Rng& rng) {
  const Index k = y_gen.vote_share.size();
  const auto party = std::uniform_int_distribution<Index>(0, k - 1)(rng);
  return generate_malicious_survey(y_gen, party, lambda);
}

}  // namespace seatcast
