#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>

#include "seatcast/experiments.hpp"
#include "seatcast/io.hpp"
#include "seatcast/parallel.hpp"

namespace seatcast::cli {

namespace {

using nlohmann::json;

// Stream tags under the master seed.
enum Stream : std::uint64_t { kTruth = 0, kSurveys = 1, kCandidates = 2, kCompute = 3, kCategories = 4 };

Rng stream(const RunConfig& cfg, Stream s) { return make_rng(derive_seed(cfg.seed, s)); }

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }
std::vector<double> to_vec(const ShareVector& v) { return to_vec(v.values()); }
std::vector<std::int64_t> to_vec(const CountVector& v) { return {v.data(), v.data() + v.size()}; }

json outcome_json(const OutcomeCandidate& x) {
  return json{{"vote_share", to_vec(x.vote_share)}, {"seat_share", to_vec(x.seat_share)}};
}

json header(const std::string& command, const RunConfig& cfg) {
  return json{{"schema_version", kSchemaVersion}, {"command", command}, {"seed", cfg.seed}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << std::setprecision(12);
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }
  template <typename... T>
  void row(const T&... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << values, first = false), ...);
    out_ << '\n';
  }
  std::ostream& stream() { return out_; }

 private:
  std::ofstream out_;
};

std::vector<std::string> party_columns(const std::string& prefix, Index k) {
  std::vector<std::string> out;
  for (Index i = 0; i < k; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

void write_shares(std::ostream& out, const ShareVector& s) {
  for (Index i = 0; i < s.size(); ++i) out << ',' << s[i];
}

CompleteElection ground_truth(const RunConfig& cfg) {
  if (cfg.results_csv) {
    PartyMap map;
    if (cfg.party_map) map = load_party_map(*cfg.party_map);
    return ingest_results(*cfg.results_csv, cfg.party_map ? &map : nullptr).election;
  }
  if (!cfg.vote_share) throw ConfigError("need election.vote_share or input.results_csv");
  Rng rng = stream(cfg, kTruth);
  return simulate_election(cfg.model, cfg.election_config(), *cfg.vote_share, rng);
}

std::vector<OutcomeCandidate> candidate_set(const RunConfig& cfg, const CompleteElection& truth) {
  Rng rng = stream(cfg, kCandidates);
  std::vector<OutcomeCandidate> out{outcome_of(truth)};
  auto rest = prior_candidates(cfg.prior_or_flat(), cfg.model, truth.config(), cfg.n_candidates - 1, rng);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

void write_ranking(const std::filesystem::path& path, const std::vector<RankedCandidate>& ranked,
                   const OutcomeCandidate& truth) {
  const Index k = truth.vote_share.size();
  std::vector<std::string> cols{"rank", "candidate"};
  for (const auto& c : party_columns("vote_P", k)) cols.push_back(c);
  for (const auto& c : party_columns("seat_P", k)) cols.push_back(c);
  cols.insert(cols.end(), {"log_density", "kl_to_truth", "is_truth"});
  CsvWriter csv(path, cols);
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    auto& out = csv.stream();
    out << r + 1 << ',' << ranked[r].index;
    write_shares(out, ranked[r].candidate.vote_share);
    write_shares(out, ranked[r].candidate.seat_share);
    out << ',' << ranked[r].log_density << ',' << outcome_kl(ranked[r].candidate, truth) << ','
        << (ranked[r].index == 0 ? 1 : 0) << '\n';
  }
}

json ranking_summary(const std::vector<RankedCandidate>& ranked, const OutcomeCandidate& truth) {
  std::vector<double> density;
  std::vector<double> distance;
  std::size_t truth_rank = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (ranked[r].index == 0) truth_rank = r + 1;
    if (std::isfinite(ranked[r].log_density)) {
      density.push_back(ranked[r].log_density);
      distance.push_back(outcome_kl(ranked[r].candidate, truth));
    }
  }
  json top = json::array();
  for (std::size_t r = 0; r < std::min<std::size_t>(10, ranked.size()); ++r) {
    json item = outcome_json(ranked[r].candidate);
    item["log_density"] = ranked[r].log_density;
    item["candidate"] = ranked[r].index;
    top.push_back(item);
  }
  json out{{"truth", outcome_json(truth)}, {"truth_rank", truth_rank}, {"candidates", ranked.size()}, {"top", top}};
  out["spearman_density_vs_kl"] = density.size() >= 2 ? json(spearman(density, distance)) : json(nullptr);
  return out;
}

json dirichlet_json(const DirichletParams& p) { return to_vec(p.alpha()); }

}  // namespace

void cmd_simulate(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const CompleteElection z = ground_truth(cfg);
  write_snapshot(z, ctx.out_dir / "snapshot.csv");
  const Index k = z.n_parties();
  std::vector<std::string> cols{"district_id"};
  for (const auto& c : party_columns("share_P", k)) cols.push_back(c);
  cols.push_back("winner");
  CsvWriter csv(ctx.out_dir / "districts.csv", cols);
  for (Index s = 0; s < z.n_districts(); ++s) {
    auto& out = csv.stream();
    out << 'D' << s + 1;
    const Eigen::VectorXd share = z.counts().row(s).transpose().cast<double>() / static_cast<double>(z.counts().row(s).sum());
    for (Index i = 0; i < k; ++i) out << ',' << share(i);
    out << ",P" << plurality_winner(z.counts().row(s)) + 1 << '\n';
  }
  json doc = header("simulate", cfg);
  doc["n_voters"] = z.config().n_voters();
  doc["n_districts"] = z.n_districts();
  doc["outcome"] = outcome_json(outcome_of(z));
  doc["seat_counts"] = to_vec(seat_counts_from_election(z));
  doc["snapshot"] = "snapshot.csv";
  write_json(ctx.out_dir / "results.json", doc);
}

void cmd_survey(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const CompleteElection z = ground_truth(cfg);
  validate(cfg.survey, z.config());
  const ShareVector truth = seat_share_from_election(z);
  const auto surveyed = surveyed_district_count(cfg.survey, z.n_districts());
  const std::uint64_t master = derive_seed(cfg.seed, kSurveys);
  const auto trials = static_cast<std::size_t>(cfg.survey_trials);
  std::vector<double> deviation(trials);
  std::vector<std::vector<std::int64_t>> projected(trials);
  parallel_for(trials, cfg.workers, [&](std::size_t t) {
    Rng rng = make_rng(derive_seed(master, t));
    const SurveyProjection y = run_survey(z, cfg.survey, rng);
    deviation[t] = (y.seat_share.values() - truth.values()).cwiseAbs().maxCoeff();
    for (Index i = 0; i < z.n_parties(); ++i) {
      projected[t].push_back(std::llround(y.seat_share[i] * static_cast<double>(surveyed)));
    }
  });

  json rates = json::array();
  CsvWriter rate_csv(ctx.out_dir / "rates.csv", {"error_limit_seats", "rate"});
  for (double limit : cfg.error_limits_seats) {
    const double share_limit = limit / static_cast<double>(z.n_districts());
    const auto hits = std::count_if(deviation.begin(), deviation.end(),
                                    [&](double d) { return d <= share_limit + 1e-12; });
    const double rate = static_cast<double>(hits) / static_cast<double>(trials);
    rate_csv.row(limit, rate);
    rates.push_back(json{{"error_limit_seats", limit}, {"rate", rate}});
  }
  std::map<std::vector<std::int64_t>, int> frequency;
  for (const auto& p : projected) ++frequency[p];
  std::vector<std::string> cols = party_columns("seats_P", z.n_parties());
  cols.push_back("frequency");
  CsvWriter freq_csv(ctx.out_dir / "seat_projections.csv", cols);
  for (const auto& [seats, n] : frequency) {
    for (auto s : seats) freq_csv.stream() << s << ',';
    freq_csv.stream() << static_cast<double>(n) / static_cast<double>(trials) << '\n';
  }

  json doc = header("survey", cfg);
  doc["outcome"] = outcome_json(outcome_of(z));
  doc["seat_counts"] = to_vec(seat_counts_from_election(z));
  doc["surveyed_districts"] = surveyed;
  doc["trials"] = cfg.survey_trials;
  doc["accurate_projection_rates"] = rates;
  write_json(ctx.out_dir / "results.json", doc);
}

void cmd_posterior(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const CompleteElection z = ground_truth(cfg);
  Rng survey_rng = stream(cfg, kSurveys);
  const auto surveys = run_surveys(z, cfg.survey, cfg.survey_count, survey_rng);
  const auto candidates = candidate_set(cfg, z);
  Rng rng = stream(cfg, kCompute);
  const auto ranked = rank_candidates(candidates, surveys, cfg.posterior_config(z.config()), rng);
  write_ranking(ctx.out_dir / "candidates.csv", ranked, candidates.front());
  json doc = header("posterior", cfg);
  doc["surveys"] = cfg.survey_count;
  doc["n_elections"] = cfg.n_elections;
  doc["n_inner_samples"] = cfg.n_inner_samples;
  doc["ranking"] = ranking_summary(ranked, candidates.front());
  write_json(ctx.out_dir / "results.json", doc);
}

void cmd_abc(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const CompleteElection z = ground_truth(cfg);
  Rng survey_rng = stream(cfg, kSurveys);
  const auto surveys = run_surveys(z, cfg.survey, cfg.survey_count, survey_rng);
  Rng rng = stream(cfg, kCompute);
  const AbcSamples samples = abc_sample(surveys, cfg.posterior_config(z.config()), cfg.abc, rng);
  const Index k = z.n_parties();

  std::vector<std::string> cols{"attempt"};
  for (const auto& c : party_columns("vote_P", k)) cols.push_back(c);
  for (const auto& c : party_columns("seat_P", k)) cols.push_back(c);
  cols.insert(cols.end(), {"vote_kl", "seat_kl"});
  CsvWriter accepted(ctx.out_dir / "accepted.csv", cols);
  for (const AbcAttempt& a : samples.accepted) {
    accepted.stream() << a.index;
    write_shares(accepted.stream(), a.candidate.vote_share);
    write_shares(accepted.stream(), a.candidate.seat_share);
    accepted.stream() << ',' << a.vote_distance << ',' << a.seat_distance << '\n';
  }

  json doc = header("abc", cfg);
  doc["truth"] = outcome_json(outcome_of(z));
  doc["attempts"] = samples.attempts;
  doc["accepted"] = samples.accepted.size();
  doc["acceptance_rate"] = samples.acceptance_rate();
  doc["exhausted"] = samples.exhausted;
  if (samples.accepted.size() >= 2) {
    const auto candidates = samples.candidates();
    const PosteriorFit fit = fit_posterior(candidates, samples.acceptance_rate());
    doc["vote_params"] = dirichlet_json(fit.vote_params);
    doc["seat_params"] = dirichlet_json(fit.seat_params);
    CsvWriter curves(ctx.out_dir / "marginals.csv", {"party", "x", "vote_pdf", "seat_pdf"});
    json marginals = json::array();
    for (Index p = 0; p < k; ++p) {
      const auto [vote, seat] = party_marginals(fit, p);
      marginals.push_back(json{{"party", "P" + std::to_string(p + 1)},
                               {"vote", {{"a", vote.a}, {"b", vote.b}, {"mean", vote.mean()}}},
                               {"seat", {{"a", seat.a}, {"b", seat.b}, {"mean", seat.mean()}}}});
      for (int i = 1; i < 200; ++i) {
        const double x = i / 200.0;
        curves.row("P" + std::to_string(p + 1), x, std::exp(vote.log_pdf(x)), std::exp(seat.log_pdf(x)));
      }
    }
    doc["marginals"] = marginals;
  }
  write_json(ctx.out_dir / "results.json", doc);
}

void cmd_forensics(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const CompleteElection z = ground_truth(cfg);
  const ForensicsConfig fc = cfg.forensics_config(z.config());
  const OutcomeCandidate x = outcome_of(z);
  Rng rng = stream(cfg, kCompute);
  const ReferenceCache cache = build_reference_cache(fc, rng);
  const ModeReference reference = cfg.mode_reference == ModeReferenceKind::kActual
                                      ? build_mode_reference(z, fc, rng)
                                      : build_mode_reference(x, fc, rng);

  const char* names[] = {"genuine", "fake", "malicious"};
  std::ofstream jsonl(ctx.out_dir / "verdicts.jsonl");
  CsvWriter csv(ctx.out_dir / "verdicts.csv",
                {"category", "index", "nonparametric_ratio", "indeterminate", "mode_ratio", "p_y", "p_y_given_x"});
  json summary = json::object();
  for (std::uint64_t cat = 0; cat < 3; ++cat) {
    double ratio_sum = 0;
    double mode_sum = 0;
    int determinate = 0;
    for (int i = 0; i < cfg.surveys_per_category; ++i) {
      const std::uint64_t seed = derive_seed(cfg.seed, kCategories, cat * 1000003ULL + static_cast<std::uint64_t>(i));
      Rng r = make_rng(seed);
      SurveyProjection y = cat == 1 ? generate_fake_survey(fc, r) : run_survey(z, fc.survey, r);
      if (cat == 2) y = generate_malicious_survey(y, cfg.malicious_lambda, r);
      const SurveyVerdict v = evaluate_survey(y, x, cache, reference, fc);
      if (!v.ratio_indeterminate) {
        ratio_sum += v.nonparametric_ratio;
        ++determinate;
      }
      mode_sum += v.mode_ratio;
      json rec{{"category", names[cat]},
               {"index", i},
               {"seed", seed},
               {"nonparametric_ratio", v.ratio_indeterminate ? json(nullptr) : json(v.nonparametric_ratio)},
               {"indeterminate", v.ratio_indeterminate},
               {"mode_ratio", v.mode_ratio},
               {"mode_empirical_max", v.mode_empirical_max},
               {"p_y", v.p_y},
               {"p_y_given_x", v.p_y_given_x},
               {"counts", {{"matched_joint", v.matched_joint},
                           {"matched_marginal", v.matched_marginal},
                           {"conditioning", v.conditioning},
                           {"total", v.total}}},
               {"thresholds", {{"eps_vote", fc.eps_vote},
                               {"eps_seat", fc.eps_seat},
                               {"x_match_vote_eps", fc.x_match_vote_eps},
                               {"x_match_seat_eps", fc.x_match_seat_eps}}}};
      jsonl << rec.dump() << '\n';
      csv.row(names[cat], i, v.ratio_indeterminate ? std::string("") : std::to_string(v.nonparametric_ratio),
              v.ratio_indeterminate ? 1 : 0, v.mode_ratio, v.p_y, v.p_y_given_x);
    }
    summary[names[cat]] = json{
        {"mean_nonparametric_ratio", determinate ? json(ratio_sum / determinate) : json(nullptr)},
        {"determinate", determinate},
        {"mean_mode_ratio", mode_sum / cfg.surveys_per_category}};
  }
  json doc = header("forensics", cfg);
  doc["outcome"] = outcome_json(x);
  doc["reference_samples"] = cache.samples.size();
  doc["conditioning_samples"] = conditioning_set(x, cache, fc).size();
  doc["mode_reference"] = cfg.mode_reference == ModeReferenceKind::kActual ? "actual" : "ensemble";
  doc["mode_reference_elections"] = reference.elections_used;
  doc["surveys_per_category"] = cfg.surveys_per_category;
  doc["categories"] = summary;
  write_json(ctx.out_dir / "results.json", doc);
}

void cmd_baseline(const CommandContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const CompleteElection z = ground_truth(cfg);
  Rng survey_rng = stream(cfg, kSurveys);
  const auto surveys = run_surveys(z, cfg.survey, cfg.survey_count, survey_rng);
  const BaselinePosterior posterior = baseline_posterior(surveys, cfg.baseline_config(), z.config());
  const auto candidates = candidate_set(cfg, z);
  std::vector<RankedCandidate> ranked;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ranked.push_back(RankedCandidate{i, candidates[i], baseline_log_density(candidates[i], posterior)});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) { return a.log_density > b.log_density; });
  write_ranking(ctx.out_dir / "candidates.csv", ranked, candidates.front());
  json doc = header("baseline", cfg);
  doc["surveys"] = cfg.survey_count;
  doc["vote_posterior"] = dirichlet_json(posterior.vote);
  doc["seat_posterior"] = dirichlet_json(posterior.seat);
  doc["ranking"] = ranking_summary(ranked, candidates.front());
  write_json(ctx.out_dir / "results.json", doc);
}

void run_command(const std::string& name, const CommandContext& ctx) {
  validate(ctx.config);
  std::filesystem::create_directories(ctx.out_dir);
  if (name == "simulate") return cmd_simulate(ctx);
  if (name == "survey") return cmd_survey(ctx);
  if (name == "posterior") return cmd_posterior(ctx);
  if (name == "abc") return cmd_abc(ctx);
  if (name == "forensics") return cmd_forensics(ctx);
  if (name == "baseline") return cmd_baseline(ctx);
  throw std::invalid_argument("unknown command " + name);
}

}  // namespace seatcast::cli
