#include <doctest.h>

#include <cmath>

#include "seatcast/core.hpp"
#include "seatcast/random.hpp"

using namespace seatcast;

namespace {

CompleteElection election(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  CountMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index r = 0;
  for (const auto& row : rows) {
    Index c = 0;
    for (auto v : row) m(r, c++) = v;
    ++r;
  }
  return CompleteElection::from_counts(m);
}

}  // namespace

TEST_CASE("election config splits voters evenly") {
  const auto cfg = ElectionConfig::equal_split(10, 3, 2);
  CHECK(cfg.district_size(0) == 4);
  CHECK(cfg.district_size(1) == 3);
  CHECK(cfg.district_size(2) == 3);
  CHECK(cfg.n_voters() == 10);
  CHECK_THROWS_AS(ElectionConfig::equal_split(10, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(ElectionConfig::equal_split(10, 0, 3), std::invalid_argument);
}

TEST_CASE("share vectors are validated") {
  CHECK_NOTHROW(ShareVector{0.4, 0.35, 0.25});
  CHECK_THROWS_AS((ShareVector{0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS((ShareVector{1.1, -0.1}), std::invalid_argument);
  const ShareVector n = ShareVector::normalized(Eigen::Vector3d(2, 1, 1));
  CHECK(n[0] == doctest::Approx(0.5));
  CHECK(ShareVector::unit(3, 2)[2] == 1.0);
}

TEST_CASE("complete election checks row sums") {
  CountMatrix m(2, 2);
  m << 3, 2, 2, 3;
  CHECK_NOTHROW(CompleteElection(m, ElectionConfig::equal_split(10, 2, 2)));
  CHECK_THROWS_AS(CompleteElection(m, ElectionConfig::equal_split(12, 2, 2)), std::invalid_argument);
  m(0, 0) = -1;
  CHECK_THROWS_AS(CompleteElection::from_counts(m), std::invalid_argument);
}

TEST_CASE("vote share is the column sum over N") {
  const auto z = election({{3, 2}, {3, 2}});
  const ShareVector v = vote_share_from_election(z);
  CHECK(v[0] == doctest::Approx(0.6));
  CHECK(v[1] == doctest::Approx(0.4));

  const ShareVector one = vote_share_from_election(election({{5, 0, 0}, {7, 0, 0}}));
  CHECK(one[0] == 1.0);
  CHECK(one[1] == 0.0);
}

TEST_CASE("vote share agrees with a scalar loop") {
  Rng rng = make_rng(3);
  CountMatrix m(5, 3);
  for (Index s = 0; s < 5; ++s) {
    for (Index k = 0; k < 3; ++k) m(s, k) = static_cast<std::int64_t>(rng() % 1000);
  }
  const ShareVector v = vote_share_from_election(CompleteElection::from_counts(m));
  double total = 0;
  double col[3] = {0, 0, 0};
  for (int s = 0; s < 5; ++s) {
    for (int k = 0; k < 3; ++k) {
      col[k] += static_cast<double>(m(s, k));
      total += static_cast<double>(m(s, k));
    }
  }
  for (int k = 0; k < 3; ++k) CHECK(v[k] == doctest::Approx(col[k] / total).epsilon(1e-14));
}

TEST_CASE("seat share uses plurality with ties to the lowest index") {
  const ShareVector s = seat_share_from_election(election({{3, 2}, {2, 3}}));
  CHECK(s[0] == 0.5);
  CHECK(s[1] == 0.5);

  const auto tie = election({{2, 2, 1}});
  CHECK(seat_share_from_election(tie)[0] == 1.0);
  CHECK(seat_counts_from_election(tie)(0) == 1);

  const auto z = election({{5, 1, 1}, {1, 5, 1}, {1, 1, 5}, {5, 1, 1}});
  const ShareVector x2 = seat_share_from_election(z);
  for (Index k = 0; k < 3; ++k) {
    const double scaled = x2[k] * 4;
    CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
  }
}

TEST_CASE("kl divergence") {
  const ShareVector p{0.4, 0.35, 0.25};
  CHECK(kl_divergence(p, p) == 0.0);

  // point mass against uniform: log 2 up to the smoothing
  CHECK(kl_divergence(ShareVector{1, 0}, ShareVector{0.5, 0.5}) == doctest::Approx(std::log(2.0)).epsilon(1e-8));

  // sum p log(p/q) evaluated independently (numpy, unsmoothed)
  const double oracle = 0.01619381265756678;
  CHECK(std::abs(kl_divergence(p, ShareVector{0.34, 0.33, 0.33}) - oracle) < 1e-9);

  // unsmoothed scalar loop agrees to 1e-12 when eps is tiny relative to entries
  const double eps = 1e-15;
  double loop = 0;
  const double q[3] = {0.34, 0.33, 0.33};
  for (int k = 0; k < 3; ++k) loop += p[k] * std::log(p[k] / q[k]);
  CHECK(std::abs(kl_divergence(p.values(), Eigen::Vector3d(0.34, 0.33, 0.33), eps) - loop) < 1e-12);

  CHECK(std::isfinite(kl_divergence(ShareVector{0, 1}, ShareVector{1, 0})));
  CHECK_THROWS_AS(kl_divergence(p.values(), Eigen::Vector2d(0.5, 0.5)), std::invalid_argument);
}

TEST_CASE("smoothing keeps points on the simplex") {
  const Eigen::Vector3d x(1, 0, 0);
  const Eigen::VectorXd s = smooth_simplex(x, 1e-3);
  CHECK(s.sum() == doctest::Approx(1.0));
  CHECK(s.minCoeff() > 0);
}

TEST_CASE("party ranking orders by share with ties by index") {
  const auto r = party_ranking(ShareVector{0.2, 0.4, 0.2, 0.2});
  CHECK(r == std::vector<Index>{1, 0, 2, 3});
}
