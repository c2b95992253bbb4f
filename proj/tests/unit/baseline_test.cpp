#include <doctest.h>

#include "seatcast/baseline.hpp"
#include "seatcast/election_models.hpp"

using namespace seatcast;

namespace {

BaselineConfig flat() { return BaselineConfig{DirichletParams{1, 1, 1}, DirichletParams{1, 1, 1}}; }

}  // namespace

TEST_CASE("conjugate update adds counts") {
  CountMatrix w(1, 3);
  w << 40, 35, 25;
  const BaselinePosterior post = baseline_posterior(w, flat());
  CHECK(post.vote.alpha() == Eigen::Vector3d(41, 36, 26));
  CHECK(post.seat.alpha() == Eigen::Vector3d(2, 1, 1));
}

TEST_CASE("no respondents leaves the prior") {
  const CountMatrix w = CountMatrix::Zero(2, 3);
  const BaselinePosterior post = baseline_posterior(w, flat());
  CHECK(post.vote.alpha() == flat().vote_prior.alpha());
  CHECK(post.seat.alpha() == flat().seat_prior.alpha());
}

TEST_CASE("tempered counts and seat wins") {
  CountMatrix w(3, 3);
  w << 10, 5, 1, 2, 9, 1, 8, 1, 1;
  BaselineConfig cfg = flat();
  cfg.vote_scale = 0.5;
  const BaselinePosterior post = baseline_posterior(w, cfg);
  CHECK(post.vote[0] == doctest::Approx(1 + 10));
  CHECK(post.seat.alpha() == Eigen::Vector3d(3, 2, 1));
}

TEST_CASE("posterior mean approaches observed proportions") {
  const Eigen::Vector3d p(0.5, 0.3, 0.2);
  double previous = 1;
  for (std::int64_t n : {10, 100, 1000, 100000}) {
    CountMatrix w(1, 3);
    w << n * 5 / 10, n * 3 / 10, n * 2 / 10;
    const BaselinePosterior post = baseline_posterior(w, flat());
    const Eigen::Vector3d analytic = (Eigen::Vector3d(1, 1, 1) + w.row(0).transpose().cast<double>()) /
                                     (3.0 + static_cast<double>(w.sum()));
    CHECK((post.vote.mean() - analytic).norm() < 1e-12);
    const double err = (post.vote.mean() - p).norm();
    CHECK(err < previous);
    previous = err;
  }
}

TEST_CASE("surveys without counts are rejected") {
  SurveyProjection y;
  y.vote_share = ShareVector{0.5, 0.3, 0.2};
  y.seat_share = ShareVector{1, 0, 0};
  CHECK_THROWS_AS(baseline_posterior(y, flat(), ElectionConfig::equal_split(100, 2, 3)), std::invalid_argument);
}

TEST_CASE("independent factors score a seat share the votes cannot produce") {
  // Surveys of a lopsided election: the baseline seat factor still rewards a
  // seat split that no election with these votes would give.
  const auto cfg = ElectionConfig::equal_split(20000, 20, 3);
  Rng rng = make_rng(3);
  const CompleteElection z = simulate_spm(SpmParams{0.0, cfg, ShareVector{0.5, 0.3, 0.2}}, rng);
  std::vector<SurveyProjection> ys;
  for (int i = 0; i < 3; ++i) ys.push_back(run_survey(z, SurveyParams{0.05, 0.25}, rng));
  const BaselinePosterior post = baseline_posterior(ys, flat(), cfg);
  const OutcomeCandidate truth{vote_share_from_election(z), seat_share_from_election(z)};
  const OutcomeCandidate mixed{truth.vote_share, ShareVector{0.5, 0.3, 0.2}};
  // With gamma 0 the leader takes every seat, yet the split candidate is not
  // penalized by its vote share: only the seat factor differs.
  const double gap = baseline_log_density(truth, post) - baseline_log_density(mixed, post);
  CHECK(gap == doctest::Approx(log_density(post.seat, truth.seat_share) - log_density(post.seat, mixed.seat_share)));
}
