#include "run_config.hpp"

#include <fstream>
#include <set>

namespace seatcast::cli {

namespace {

using nlohmann::json;

// Reads keys from one JSON object and rejects any it did not consume.
class Section {
 public:
  Section(const json& obj, std::string name) : obj_(obj), name_(std::move(name)) {
    if (!obj_.is_object()) throw ConfigError(name_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    used_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name_ + "." + key + ": wrong type");
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }

  Section child(const char* key) {
    used_.insert(key);
    return Section(obj_.contains(key) ? obj_.at(key) : empty(), name_.empty() ? key : name_ + "." + key);
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!used_.count(item.key())) throw ConfigError("unknown key '" + prefix() + item.key() + "'");
    }
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  std::string prefix() const { return name_.empty() ? "" : name_ + "."; }

  const json& obj_;
  std::string name_;
  std::set<std::string> used_;
};

template <typename F>
auto checked(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

std::optional<DirichletParams> dirichlet_from(Section& s, const char* key) {
  std::vector<double> v;
  s.get(key, v);
  if (v.empty()) return std::nullopt;
  return checked(key, [&] { return DirichletParams(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()))); });
}

}  // namespace

DirichletParams RunConfig::prior_or_flat() const {
  return prior ? *prior : DirichletParams(Eigen::VectorXd::Ones(n_parties));
}

PosteriorConfig RunConfig::posterior_config(const ElectionConfig& election) const {
  PosteriorConfig pc;
  pc.election = election;
  pc.model = model;
  pc.survey = survey;
  pc.prior = prior_or_flat();
  pc.n_elections = n_elections;
  pc.n_inner_samples = n_inner_samples;
  pc.seat_kernel = seat_kernel;
  pc.seat_tau = seat_tau;
  pc.seat_hard_epsilon = seat_hard_epsilon;
  pc.fit.degenerate_precision = degenerate_precision;
  pc.workers = workers;
  return pc;
}

ForensicsConfig RunConfig::forensics_config(const ElectionConfig& election) const {
  ForensicsConfig fc = forensics;
  fc.prior = prior_or_flat();
  fc.election = election;
  fc.model = model;
  fc.survey = survey;
  fc.fit.degenerate_precision = degenerate_precision;
  fc.workers = workers;
  return fc;
}

BaselineConfig RunConfig::baseline_config() const {
  const DirichletParams flat(Eigen::VectorXd::Ones(n_parties));
  return BaselineConfig{baseline_vote_prior.value_or(flat), baseline_seat_prior.value_or(flat), baseline_vote_scale,
                        baseline_seat_scale};
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  Section root(doc, "");
  int schema = kSchemaVersion;
  root.get("schema_version", schema);
  if (schema != kSchemaVersion) throw ConfigError("unsupported schema_version " + std::to_string(schema));
  root.get("seed", cfg.seed);
  root.get("workers", cfg.workers);

  {
    Section e = root.child("election");
    e.get("n_voters", cfg.n_voters);
    e.get("n_districts", cfg.n_districts);
    e.get("n_parties", cfg.n_parties);
    std::vector<double> share;
    e.get("vote_share", share);
    if (!share.empty()) {
      cfg.vote_share = checked("election.vote_share", [&] {
        return ShareVector(Eigen::Map<Eigen::VectorXd>(share.data(), static_cast<Index>(share.size())));
      });
    }
    Section m = e.child("model");
    std::string type = "spm";
    m.get("type", type);
    if (type == "spm") {
      SpmModel spm{0.9, 1};
      m.get("gamma", spm.gamma);
      m.get("batch_size", spm.batch_size);
      cfg.model = spm;
    } else if (type == "pcm") {
      std::vector<double> g;
      m.get("gammas", g);
      cfg.model = PcmModel{Eigen::Map<Eigen::VectorXd>(g.data(), static_cast<Index>(g.size()))};
    } else {
      throw ConfigError("election.model.type must be 'spm' or 'pcm'");
    }
    m.finish();
    e.finish();
  }
  {
    Section in = root.child("input");
    std::string path;
    in.get("results_csv", path);
    if (!path.empty()) cfg.results_csv = base_dir / path;
    path.clear();
    in.get("party_map", path);
    if (!path.empty()) cfg.party_map = base_dir / path;
    in.finish();
  }
  {
    Section s = root.child("survey");
    s.get("person_fraction", cfg.survey.person_fraction);
    s.get("district_fraction", cfg.survey.district_fraction);
    std::string sampling = "multinomial";
    s.get("sampling", sampling);
    if (sampling == "multinomial") {
      cfg.survey.sampling = RespondentSampling::kMultinomial;
    } else if (sampling == "hypergeometric") {
      cfg.survey.sampling = RespondentSampling::kHypergeometric;
    } else {
      throw ConfigError("survey.sampling must be 'multinomial' or 'hypergeometric'");
    }
    s.get("trials", cfg.survey_trials);
    s.get("error_limits_seats", cfg.error_limits_seats);
    s.get("count", cfg.survey_count);
    s.finish();
  }
  cfg.prior = dirichlet_from(root, "prior");
  {
    Section p = root.child("posterior");
    p.get("n_elections", cfg.n_elections);
    p.get("n_inner_samples", cfg.n_inner_samples);
    std::string kernel = "soft";
    p.get("seat_kernel", kernel);
    if (kernel == "soft") {
      cfg.seat_kernel = SeatKernel::kSoft;
    } else if (kernel == "hard") {
      cfg.seat_kernel = SeatKernel::kHard;
    } else {
      throw ConfigError("posterior.seat_kernel must be 'soft' or 'hard'");
    }
    p.get("seat_tau", cfg.seat_tau);
    p.get("seat_hard_epsilon", cfg.seat_hard_epsilon);
    p.get("degenerate_precision", cfg.degenerate_precision);
    p.get("n_candidates", cfg.n_candidates);
    p.finish();
  }
  {
    Section a = root.child("abc");
    a.get("vote_tolerance", cfg.abc.vote_tolerance);
    a.get("seat_tolerance", cfg.abc.seat_tolerance);
    a.get("require_rank_agreement", cfg.abc.require_rank_agreement);
    std::string reference = "median";
    a.get("reference", reference);
    if (reference == "median") {
      cfg.abc.reference = AbcReference::kMedian;
    } else if (reference == "all") {
      cfg.abc.reference = AbcReference::kAllSurveys;
    } else {
      throw ConfigError("abc.reference must be 'median' or 'all'");
    }
    a.get("target_accepted", cfg.abc.target_accepted);
    a.get("max_attempts", cfg.abc.max_attempts);
    a.finish();
  }
  {
    Section f = root.child("forensics");
    f.get("n_reference_samples", cfg.forensics.n_reference_samples);
    f.get("eps_vote", cfg.forensics.eps_vote);
    f.get("eps_seat", cfg.forensics.eps_seat);
    f.get("x_match_vote_eps", cfg.forensics.x_match_vote_eps);
    f.get("x_match_seat_eps", cfg.forensics.x_match_seat_eps);
    f.get("min_conditioning_samples", cfg.forensics.min_conditioning_samples);
    f.get("mode_elections", cfg.forensics.mode_elections);
    f.get("mode_surveys_per_election", cfg.forensics.mode_surveys_per_election);
    f.get("surveys_per_category", cfg.surveys_per_category);
    f.get("malicious_lambda", cfg.malicious_lambda);
    std::string reference = "ensemble";
    f.get("mode_reference", reference);
    if (reference == "ensemble") {
      cfg.mode_reference = ModeReferenceKind::kEnsemble;
    } else if (reference == "actual") {
      cfg.mode_reference = ModeReferenceKind::kActual;
    } else {
      throw ConfigError("forensics.mode_reference must be 'ensemble' or 'actual'");
    }
    f.finish();
  }
  {
    Section b = root.child("baseline");
    cfg.baseline_vote_prior = dirichlet_from(b, "vote_prior");
    cfg.baseline_seat_prior = dirichlet_from(b, "seat_prior");
    b.get("vote_scale", cfg.baseline_vote_scale);
    b.get("seat_scale", cfg.baseline_seat_scale);
    b.finish();
  }
  root.finish();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

void validate(const RunConfig& cfg) {
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  if (cfg.n_parties < 2 || cfg.n_districts < 1 || cfg.n_voters < cfg.n_districts) {
    throw ConfigError("election: need n_parties >= 2, n_districts >= 1, n_voters >= n_districts");
  }
  if (cfg.vote_share && cfg.vote_share->size() != cfg.n_parties) {
    throw ConfigError("election.vote_share must have n_parties entries");
  }
  if (cfg.prior && cfg.prior->size() != cfg.n_parties) throw ConfigError("prior must have n_parties entries");
  if (cfg.survey_trials < 1 || cfg.survey_count < 1) throw ConfigError("survey: trials and count must be >= 1");
  for (double e : cfg.error_limits_seats) {
    if (!(e >= 0)) throw ConfigError("survey.error_limits_seats must be >= 0");
  }
  if (cfg.n_candidates < 1) throw ConfigError("posterior.n_candidates must be >= 1");
  if (cfg.surveys_per_category < 1) throw ConfigError("forensics.surveys_per_category must be >= 1");
  if (!(cfg.malicious_lambda >= 0 && cfg.malicious_lambda <= 1)) {
    throw ConfigError("forensics.malicious_lambda must lie in [0,1]");
  }
  const ElectionConfig election = checked("election", [&] { return cfg.election_config(); });
  checked("posterior", [&] {
    seatcast::validate(cfg.posterior_config(election));
    return 0;
  });
  checked("abc", [&] {
    seatcast::validate(cfg.abc);
    return 0;
  });
  checked("forensics", [&] {
    seatcast::validate(cfg.forensics_config(election));
    return 0;
  });
  checked("baseline", [&] {
    seatcast::validate(cfg.baseline_config());
    return 0;
  });
}

}  // namespace seatcast::cli
