#include "seatcast/survey.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "seatcast/parallel.hpp"

namespace seatcast {

Index surveyed_district_count(const SurveyParams& params, Index n_districts) {
  return static_cast<Index>(std::ceil(static_cast<double>(n_districts) * params.district_fraction - 1e-9));
}

std::int64_t respondents_in_district(const SurveyParams& params, std::int64_t district_size) {
  return std::llround(static_cast<double>(district_size) * params.person_fraction);
}

void validate(const SurveyParams& params, const ElectionConfig& config) {
  if (!(params.person_fraction > 0.0 && params.person_fraction <= 1.0)) {
    throw std::invalid_argument("SurveyParams: person fraction must lie in (0,1]");
  }
  if (!(params.district_fraction > 0.0 && params.district_fraction <= 1.0)) {
    throw std::invalid_argument("SurveyParams: district fraction must lie in (0,1]");
  }
  if (surveyed_district_count(params, config.n_districts()) < 1) {
    throw std::invalid_argument("SurveyParams: no district would be surveyed");
  }
  if (respondents_in_district(params, config.district_sizes().minCoeff()) < 1) {
    throw std::invalid_argument("SurveyParams: person fraction leaves a district with zero respondents");
  }
}

SurveyProjection projection_from_counts(CountMatrix respondent_counts, std::vector<Index> surveyed_districts,
                                        const SurveyParams& params) {
  const Index k = respondent_counts.cols();
  const Eigen::VectorXd totals = respondent_counts.colwise().sum().transpose().cast<double>();
  Eigen::VectorXd wins = Eigen::VectorXd::Zero(k);
  Index contested = 0;
  for (Index j = 0; j < respondent_counts.rows(); ++j) {
    if (respondent_counts.row(j).sum() == 0) continue;
    wins(plurality_winner(respondent_counts.row(j))) += 1.0;
    ++contested;
  }
  if (contested == 0) throw std::invalid_argument("projection_from_counts: survey has no respondents");
  return SurveyProjection{ShareVector::normalized(totals), ShareVector::normalized(wins),
                          std::move(respondent_counts), std::move(surveyed_districts), params};
}

SurveyProjection run_survey(const CompleteElection& z, const SurveyParams& params, Rng& rng) {
  validate(params, z.config());
  const Index n_districts = z.n_districts();
  const Index chosen = surveyed_district_count(params, n_districts);

  std::vector<Index> districts(static_cast<std::size_t>(n_districts));
  std::iota(districts.begin(), districts.end(), Index{0});
  if (chosen < n_districts) {
    // Partial Fisher-Yates.
    for (Index i = 0; i < chosen; ++i) {
      const auto j = std::uniform_int_distribution<Index>(i, n_districts - 1)(rng);
      std::swap(districts[static_cast<std::size_t>(i)], districts[static_cast<std::size_t>(j)]);
    }
    districts.resize(static_cast<std::size_t>(chosen));
    std::sort(districts.begin(), districts.end());
  }

  CountMatrix respondents(chosen, z.n_parties());
  Eigen::VectorXd probs(z.n_parties());
  for (Index j = 0; j < chosen; ++j) {
    const Index s = districts[static_cast<std::size_t>(j)];
    const std::int64_t n = respondents_in_district(params, z.config().district_size(s));
    if (params.sampling == RespondentSampling::kHypergeometric) {
      respondents.row(j) = sample_multivariate_hypergeometric(n, z.counts().row(s).transpose(), rng).transpose();
    } else {
      probs = z.counts().row(s).transpose().cast<double>();
      respondents.row(j) = sample_multinomial(n, probs, rng).transpose();
    }
  }
  return projection_from_counts(std::move(respondents), std::move(districts), params);
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ShareVector median_share(std::span<const SurveyProjection> projections, bool seats) {
  const Index k = projections.front().vote_share.size();
  Eigen::VectorXd out(k);
  std::vector<double> column(projections.size());
  for (Index i = 0; i < k; ++i) {
    for (std::size_t p = 0; p < projections.size(); ++p) {
      const ShareVector& share = seats ? projections[p].seat_share : projections[p].vote_share;
      if (share.size() != k) throw std::invalid_argument("median_projection: projections differ in party count");
      column[p] = share[i];
    }
    out(i) = median_of(column);
  }
  return ShareVector::normalized(out);
}

}  // namespace

SurveyProjection median_projection(std::span<const SurveyProjection> projections) {
  if (projections.empty()) throw std::invalid_argument("median_projection: no projections");
  if (projections.size() == 1) return projections.front();
  return SurveyProjection{median_share(projections, false), median_share(projections, true), CountMatrix(), {},
                          projections.front().params};
}

std::vector<double> accurate_projection_rates(const CompleteElection& z, const SurveyParams& params, int n_trials,
                                              std::span<const double> error_limits, Rng& rng, unsigned workers) {
  if (n_trials < 1) throw std::invalid_argument("accurate_projection_rate: need at least one trial");
  for (double limit : error_limits) {
    if (!(limit >= 0)) throw std::invalid_argument("accurate_projection_rate: error limit must be >= 0");
  }
  validate(params, z.config());
  const ShareVector truth = seat_share_from_election(z);
  const std::uint64_t master = draw_seed(rng);
  // Largest per-party deviation of each trial.
  std::vector<double> deviation(static_cast<std::size_t>(n_trials));
  parallel_for(deviation.size(), workers, [&](std::size_t t) {
    Rng trial_rng = make_rng(derive_seed(master, t));
    const SurveyProjection y = run_survey(z, params, trial_rng);
    deviation[t] = (y.seat_share.values() - truth.values()).cwiseAbs().maxCoeff();
  });
  std::vector<double> rates;
  rates.reserve(error_limits.size());
  for (double limit : error_limits) {
    const auto hits = std::count_if(deviation.begin(), deviation.end(), [&](double d) { return d <= limit + 1e-12; });
    rates.push_back(static_cast<double>(hits) / n_trials);
  }
  return rates;
}

double accurate_projection_rate(const CompleteElection& z, const SurveyParams& params, int n_trials,
                                double error_limit, Rng& rng, unsigned workers) {
  const double limits[] = {error_limit};
  return accurate_projection_rates(z, params, n_trials, limits, rng, workers).front();
}

}  // namespace seatcast
