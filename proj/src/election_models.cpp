#include "seatcast/election_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace seatcast {

namespace {

void validate_spm(const SpmParams& p) {
  if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) throw std::invalid_argument("SPM: gamma must lie in [0,1]");
  if (p.target_vote_share.size() != p.config.n_parties()) {
    throw std::invalid_argument("SPM: target vote share has the wrong number of parties");
  }
}

// One voter of the sequential process. Always consumes exactly two uniforms.
Index spm_voter(const CountVector& local, std::int64_t seen, double gamma, const Eigen::VectorXd& target, Rng& rng) {
  const double branch = uniform01(rng);
  if (branch < gamma) {
    // No local votes yet: local popularity falls back to the overall one.
    if (seen == 0) return sample_categorical(target, 1.0, rng);
    return sample_categorical(local, static_cast<double>(seen), rng);
  }
  return sample_categorical(target, 1.0, rng);
}

// Fenwick tree over district weights.
class Fenwick {
 public:
  explicit Fenwick(Index n) : tree_(static_cast<std::size_t>(n) + 1, 0) {}

  void add(Index i, std::int64_t delta) {
    total_ += delta;
    for (auto j = static_cast<std::size_t>(i) + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += delta;
  }

  std::int64_t total() const { return total_; }

  // Smallest index whose inclusive prefix sum exceeds target, for 0 <= target < total().
  Index find(std::int64_t target) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 < tree_.size()) step *= 2;
    for (; step > 0; step /= 2) {
      if (pos + step < tree_.size() && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    return static_cast<Index>(pos);
  }

 private:
  std::vector<std::int64_t> tree_;
  std::int64_t total_ = 0;
};

}  // namespace

CompleteElection simulate_spm(const SpmParams& params, Rng& rng) {
  validate_spm(params);
  const ElectionConfig& cfg = params.config;
  const Eigen::VectorXd& target = params.target_vote_share.values();
  CountMatrix counts = CountMatrix::Zero(cfg.n_districts(), cfg.n_parties());
  CountVector local(cfg.n_parties());
  for (Index s = 0; s < cfg.n_districts(); ++s) {
    local.setZero();
    const std::int64_t size = cfg.district_size(s);
    for (std::int64_t v = 0; v < size; ++v) local(spm_voter(local, v, params.gamma, target, rng)) += 1;
    counts.row(s) = local.transpose();
  }
  return CompleteElection(std::move(counts), cfg);
}

CompleteElection simulate_spm_batched(const SpmParams& params, const BatchConfig& batch, Rng& rng) {
  validate_spm(params);
  if (batch.batch_size < 1) throw std::invalid_argument("SPM: batch size must be >= 1");
  const ElectionConfig& cfg = params.config;
  const Index k = cfg.n_parties();
  const Eigen::VectorXd& target = params.target_vote_share.values();
  CountMatrix counts = CountMatrix::Zero(cfg.n_districts(), k);
  CountVector local(k);
  Eigen::VectorXd choice(k);
  for (Index s = 0; s < cfg.n_districts(); ++s) {
    local.setZero();
    const std::int64_t size = cfg.district_size(s);
    std::int64_t seen = 0;
    while (seen < size) {
      const std::int64_t block = std::min(batch.batch_size, size - seen);
      if (block == 1) {
        local(spm_voter(local, seen, params.gamma, target, rng)) += 1;
      } else {
        if (seen == 0) {
          choice = target;
        } else {
          choice = (params.gamma / static_cast<double>(seen)) * local.cast<double>() + (1.0 - params.gamma) * target;
        }
        // Binomial chain straight into the running counts; no temporaries per block.
        std::int64_t left = block;
        double mass = choice.sum();
        for (Index p = 0; p + 1 < k && left > 0 && mass > 0; ++p) {
          const std::int64_t n = sample_binomial(left, std::min(1.0, choice(p) / mass), rng);
          local(p) += n;
          left -= n;
          mass -= choice(p);
        }
        local(k - 1) += left;
      }
      seen += block;
    }
    counts.row(s) = local.transpose();
  }
  return CompleteElection(std::move(counts), cfg);
}

CompleteElection simulate_pcm(const PcmParams& params, Rng& rng) {
  const ElectionConfig& cfg = params.config;
  const Index k = cfg.n_parties();
  const Index n_districts = cfg.n_districts();
  if (params.gammas.size() != k || params.party_totals.size() != k) {
    throw std::invalid_argument("PCM: gammas and party totals need one entry per party");
  }
  if ((params.gammas.array() < 0.0).any() || (params.gammas.array() > 1.0).any()) {
    throw std::invalid_argument("PCM: every gamma_k must lie in [0,1]");
  }
  if ((params.party_totals.array() < 0).any() || params.party_totals.sum() != cfg.n_voters()) {
    throw std::invalid_argument("PCM: party totals must be non-negative and sum to N");
  }

  CountMatrix counts = CountMatrix::Zero(n_districts, k);
  CountVector filled = CountVector::Zero(n_districts);
  std::vector<Fenwick> supporters(static_cast<std::size_t>(k), Fenwick(n_districts));
  // Non-full districts with O(1) removal.
  std::vector<Index> open(static_cast<std::size_t>(n_districts));
  std::iota(open.begin(), open.end(), Index{0});
  std::vector<std::size_t> slot(open.size());
  std::iota(slot.begin(), slot.end(), std::size_t{0});

  CountVector remaining = params.party_totals;
  std::int64_t left = cfg.n_voters();
  while (left > 0) {
    for (Index party = 0; party < k; ++party) {
      if (remaining(party) == 0) continue;
      Fenwick& tree = supporters[static_cast<std::size_t>(party)];
      Index district;
      const bool follow = uniform01(rng) < params.gammas(party);
      if (follow && tree.total() > 0) {
        district = tree.find(std::uniform_int_distribution<std::int64_t>(0, tree.total() - 1)(rng));
      } else {
        const auto pick = std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng);
        district = open[pick];
      }
      counts(district, party) += 1;
      filled(district) += 1;
      tree.add(district, 1);
      if (filled(district) == cfg.district_size(district)) {
        for (Index j = 0; j < k; ++j) supporters[static_cast<std::size_t>(j)].add(district, -counts(district, j));
        const std::size_t at = slot[static_cast<std::size_t>(district)];
        open[at] = open.back();
        slot[static_cast<std::size_t>(open[at])] = at;
        open.pop_back();
      }
      remaining(party) -= 1;
      --left;
    }
  }
  return CompleteElection(std::move(counts), cfg);
}

CountVector apportion_totals(const ShareVector& share, std::int64_t n_voters) {
  const Index k = share.size();
  const Eigen::VectorXd exact = share.values() * static_cast<double>(n_voters);
  CountVector out(k);
  for (Index i = 0; i < k; ++i) out(i) = static_cast<std::int64_t>(std::floor(exact(i)));
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return exact(a) - std::floor(exact(a)) > exact(b) - std::floor(exact(b));
  });
  std::int64_t missing = n_voters - out.sum();
  for (std::size_t i = 0; missing > 0; i = (i + 1) % order.size(), --missing) out(order[i]) += 1;
  return out;
}

void validate(const ElectionModel& model, Index n_parties) {
  if (const auto* spm = std::get_if<SpmModel>(&model)) {
    if (!(spm->gamma >= 0.0 && spm->gamma <= 1.0)) throw std::invalid_argument("SPM: gamma must lie in [0,1]");
    if (spm->batch_size < 1) throw std::invalid_argument("SPM: batch size must be >= 1");
  } else {
    const auto& pcm = std::get<PcmModel>(model);
    if (pcm.gammas.size() != n_parties) throw std::invalid_argument("PCM: need one gamma per party");
    if ((pcm.gammas.array() < 0.0).any() || (pcm.gammas.array() > 1.0).any()) {
      throw std::invalid_argument("PCM: every gamma_k must lie in [0,1]");
    }
  }
}

CompleteElection simulate_election(const ElectionModel& model, const ElectionConfig& config,
                                   const ShareVector& vote_share, Rng& rng) {
  if (const auto* spm = std::get_if<SpmModel>(&model)) {
    SpmParams params{spm->gamma, config, vote_share};
    if (spm->batch_size == 1) return simulate_spm(params, rng);
    return simulate_spm_batched(params, BatchConfig{spm->batch_size}, rng);
  }
  const auto& pcm = std::get<PcmModel>(model);
  return simulate_pcm(PcmParams{pcm.gammas, config, apportion_totals(vote_share, config.n_voters())}, rng);
}

}  // namespace seatcast
