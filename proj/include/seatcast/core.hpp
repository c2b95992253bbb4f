#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace seatcast {

using Index = Eigen::Index;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
/// Row s holds the per-party vote counts of district s.
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kShareTolerance = 1e-9;
inline constexpr double kDefaultKlEpsilon = 1e-10;

/// Sizes of an election: N voters spread over S districts, K parties.
class ElectionConfig {
 public:
  ElectionConfig() = default;
  ElectionConfig(CountVector district_sizes, Index n_parties);

  /// N/S voters per district, remainder going to the first N mod S districts.
  static ElectionConfig equal_split(std::int64_t n_voters, Index n_districts, Index n_parties);

  std::int64_t n_voters() const { return n_voters_; }
  Index n_districts() const { return district_sizes_.size(); }
  Index n_parties() const { return n_parties_; }
  const CountVector& district_sizes() const { return district_sizes_; }
  std::int64_t district_size(Index s) const { return district_sizes_(s); }

  friend bool operator==(const ElectionConfig& a, const ElectionConfig& b) {
    return a.n_parties_ == b.n_parties_ && a.district_sizes_ == b.district_sizes_;
  }

 private:
  CountVector district_sizes_;
  std::int64_t n_voters_ = 0;
  Index n_parties_ = 0;
};

/// A point on the probability simplex (vote share or seat share).
class ShareVector {
 public:
  ShareVector() = default;
  /// Throws std::invalid_argument unless entries are >= 0 and sum to 1 within kShareTolerance.
  explicit ShareVector(Eigen::VectorXd shares);
  ShareVector(std::initializer_list<double> shares);

  /// Divides a non-negative vector by its sum.
  static ShareVector normalized(const Eigen::Ref<const Eigen::VectorXd>& weights);
  /// e_k: all mass on party k.
  static ShareVector unit(Index n_parties, Index k);

  const Eigen::VectorXd& values() const { return shares_; }
  Index size() const { return shares_.size(); }
  double operator[](Index k) const { return shares_(k); }

  friend bool operator==(const ShareVector& a, const ShareVector& b) { return a.shares_ == b.shares_; }

 private:
  Eigen::VectorXd shares_;
};

/// Full per-district result Z.
class CompleteElection {
 public:
  CompleteElection() = default;
  /// Validates row sums against the config's district sizes.
  CompleteElection(CountMatrix counts, ElectionConfig config);
  /// Infers the config from the row sums of `counts`.
  static CompleteElection from_counts(CountMatrix counts);

  const CountMatrix& counts() const { return counts_; }
  const ElectionConfig& config() const { return config_; }
  Index n_districts() const { return counts_.rows(); }
  Index n_parties() const { return counts_.cols(); }

  friend bool operator==(const CompleteElection& a, const CompleteElection& b) {
    return a.config_ == b.config_ && a.counts_ == b.counts_;
  }

 private:
  CountMatrix counts_;
  ElectionConfig config_;
};

/// Hypothesised full result X = (X1, X2).
struct OutcomeCandidate {
  ShareVector vote_share;
  ShareVector seat_share;
};

/// Party column totals divided by N.
ShareVector vote_share_from_election(const CompleteElection& z);

/// Index of the largest entry; ties go to the lowest index.
template <typename Derived>
Index plurality_winner(const Eigen::DenseBase<Derived>& row) {
  Index best = 0;
  for (Index k = 1; k < row.size(); ++k) {
    if (row(k) > row(best)) best = k;
  }
  return best;
}

/// Fraction of districts won by each party under plurality.
ShareVector seat_share_from_election(const CompleteElection& z);

/// Seats won by each party (seat share times S).
CountVector seat_counts_from_election(const CompleteElection& z);

/// (x + eps) / (1 + K eps), which keeps the result on the simplex.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> smooth_simplex(
    const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar eps) {
  using Scalar = typename Derived::Scalar;
  const auto k = static_cast<Scalar>(x.size());
  return (x.array() + eps).matrix() / (Scalar(1) + k * eps);
}

/// KL(p || q) after epsilon-smoothing both arguments.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar kl_divergence(const Eigen::MatrixBase<DerivedP>& p,
                                        const Eigen::MatrixBase<DerivedQ>& q,
                                        typename DerivedP::Scalar eps = kDefaultKlEpsilon) {
  using Scalar = typename DerivedP::Scalar;
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: dimension mismatch");
  if (!(eps > 0)) throw std::invalid_argument("kl_divergence: epsilon must be positive");
  const auto ps = smooth_simplex(p, eps);
  const auto qs = smooth_simplex(q.template cast<Scalar>(), eps);
  Scalar kl = 0;
  for (Index k = 0; k < ps.size(); ++k) kl += ps(k) * std::log(ps(k) / qs(k));
  // Rounding can leave a tiny negative residue when p == q.
  return kl < Scalar(0) ? Scalar(0) : kl;
}

inline double kl_divergence(const ShareVector& p, const ShareVector& q, double eps = kDefaultKlEpsilon) {
  return kl_divergence(p.values(), q.values(), eps);
}

/// Party indices sorted by descending share, ties by index.
std::vector<Index> party_ranking(const ShareVector& shares);

std::string to_string(const ShareVector& shares, int precision = 4);

}  // namespace seatcast
