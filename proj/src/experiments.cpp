#include "seatcast/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace seatcast {

std::optional<Realization> find_realization(const ElectionModel& model, const ElectionConfig& config,
                                            const ShareVector& target,
                                            const std::function<bool(const CompleteElection&)>& accept,
                                            std::uint64_t master, long max_tries) {
  for (long i = 0; i < max_tries; ++i) {
    const std::uint64_t seed = derive_seed(master, static_cast<std::uint64_t>(i));
    Rng rng = make_rng(seed);
    CompleteElection z = simulate_election(model, config, target, rng);
    if (accept(z)) return Realization{std::move(z), seed, i + 1};
  }
  return std::nullopt;
}

std::function<bool(const CompleteElection&)> seats_equal(CountVector seats) {
  return [seats = std::move(seats)](const CompleteElection& z) { return seat_counts_from_election(z) == seats; };
}

OutcomeCandidate outcome_of(const CompleteElection& z) {
  return OutcomeCandidate{vote_share_from_election(z), seat_share_from_election(z)};
}

std::vector<OutcomeCandidate> prior_candidates(const DirichletParams& prior, const ElectionModel& model,
                                               const ElectionConfig& config, int n, Rng& rng) {
  std::vector<OutcomeCandidate> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    const ShareVector target = sample(prior, rng);
    out.push_back(outcome_of(simulate_election(model, config, target, rng)));
  }
  return out;
}

std::vector<SurveyProjection> run_surveys(const CompleteElection& z, const SurveyParams& params, int n, Rng& rng) {
  std::vector<SurveyProjection> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) out.push_back(run_survey(z, params, rng));
  return out;
}

double outcome_kl(const OutcomeCandidate& a, const OutcomeCandidate& b) {
  return kl_divergence(a.vote_share, b.vote_share) + kl_divergence(a.seat_share, b.seat_share);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const auto n = static_cast<Index>(a.size());
  const Eigen::Map<const Eigen::VectorXd> x(ra.data(), n);
  const Eigen::Map<const Eigen::VectorXd> y(rb.data(), n);
  const Eigen::VectorXd dx = x.array() - x.mean();
  const Eigen::VectorXd dy = y.array() - y.mean();
  const double denom = std::sqrt(dx.squaredNorm() * dy.squaredNorm());
  return denom > 0 ? dx.dot(dy) / denom : 0.0;
}

}  // namespace seatcast
