#include "seatcast/core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace seatcast {

ElectionConfig::ElectionConfig(CountVector district_sizes, Index n_parties)
    : district_sizes_(std::move(district_sizes)), n_parties_(n_parties) {
  if (n_parties_ < 2) throw std::invalid_argument("ElectionConfig: need at least 2 parties");
  if (district_sizes_.size() < 1) throw std::invalid_argument("ElectionConfig: need at least 1 district");
  if ((district_sizes_.array() <= 0).any()) {
    throw std::invalid_argument("ElectionConfig: district sizes must be positive");
  }
  n_voters_ = district_sizes_.sum();
}

ElectionConfig ElectionConfig::equal_split(std::int64_t n_voters, Index n_districts, Index n_parties) {
  if (n_districts < 1 || n_voters < n_districts) {
    throw std::invalid_argument("ElectionConfig::equal_split: need 1 <= S <= N");
  }
  CountVector sizes = CountVector::Constant(n_districts, n_voters / n_districts);
  const std::int64_t remainder = n_voters % n_districts;
  for (Index s = 0; s < remainder; ++s) sizes(s) += 1;
  return ElectionConfig(std::move(sizes), n_parties);
}

ShareVector::ShareVector(Eigen::VectorXd shares) : shares_(std::move(shares)) {
  if (shares_.size() < 1) throw std::invalid_argument("ShareVector: empty");
  if (!shares_.allFinite() || (shares_.array() < 0.0).any()) {
    throw std::invalid_argument("ShareVector: entries must be finite and non-negative");
  }
  if (std::abs(shares_.sum() - 1.0) > kShareTolerance) {
    throw std::invalid_argument("ShareVector: entries must sum to 1, got " + std::to_string(shares_.sum()));
  }
}

ShareVector::ShareVector(std::initializer_list<double> shares)
    : ShareVector(Eigen::Map<const Eigen::VectorXd>(shares.begin(), static_cast<Index>(shares.size()))) {}

ShareVector ShareVector::normalized(const Eigen::Ref<const Eigen::VectorXd>& weights) {
  const double total = weights.sum();
  if (!(total > 0) || (weights.array() < 0.0).any()) {
    throw std::invalid_argument("ShareVector::normalized: weights must be non-negative with a positive sum");
  }
  ShareVector out;
  out.shares_ = weights / total;
  return out;
}

ShareVector ShareVector::unit(Index n_parties, Index k) {
  if (k < 0 || k >= n_parties) throw std::out_of_range("ShareVector::unit: party index out of range");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n_parties);
  e(k) = 1.0;
  return ShareVector(std::move(e));
}

CompleteElection::CompleteElection(CountMatrix counts, ElectionConfig config)
    : counts_(std::move(counts)), config_(std::move(config)) {
  if (counts_.rows() != config_.n_districts() || counts_.cols() != config_.n_parties()) {
    throw std::invalid_argument("CompleteElection: count matrix shape does not match config");
  }
  if ((counts_.array() < 0).any()) throw std::invalid_argument("CompleteElection: negative vote count");
  const CountVector row_sums = counts_.rowwise().sum();
  if (row_sums != config_.district_sizes()) {
    throw std::invalid_argument("CompleteElection: district row sums differ from district sizes");
  }
}

CompleteElection CompleteElection::from_counts(CountMatrix counts) {
  CountVector sizes = counts.rowwise().sum();
  const Index k = counts.cols();
  return CompleteElection(std::move(counts), ElectionConfig(std::move(sizes), k));
}

ShareVector vote_share_from_election(const CompleteElection& z) {
  const Eigen::VectorXd totals = z.counts().colwise().sum().transpose().cast<double>();
  return ShareVector::normalized(totals);
}

CountVector seat_counts_from_election(const CompleteElection& z) {
  CountVector seats = CountVector::Zero(z.n_parties());
  for (Index s = 0; s < z.n_districts(); ++s) seats(plurality_winner(z.counts().row(s))) += 1;
  return seats;
}

ShareVector seat_share_from_election(const CompleteElection& z) {
  return ShareVector::normalized(seat_counts_from_election(z).cast<double>());
}

std::vector<Index> party_ranking(const ShareVector& shares) {
  std::vector<Index> order(static_cast<std::size_t>(shares.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return shares[a] > shares[b]; });
  return order;
}

std::string to_string(const ShareVector& shares, int precision) {
  std::ostringstream os;
  os.precision(precision);
  os << '(';
  for (Index k = 0; k < shares.size(); ++k) os << (k ? "," : "") << shares[k];
  os << ')';
  return os.str();
}

}  // namespace seatcast
