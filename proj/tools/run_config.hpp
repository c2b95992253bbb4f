#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seatcast/abc.hpp"
#include "seatcast/baseline.hpp"
#include "seatcast/forensics.hpp"
#include "seatcast/synlik.hpp"

namespace seatcast::cli {

inline constexpr int kSchemaVersion = 1;

enum class ModeReferenceKind { kEnsemble, kActual };

struct RunConfig {
  std::uint64_t seed = 1;
  unsigned workers = 1;

  // Election used when no results file is given, and the size of simulated elections.
  std::int64_t n_voters = 10000;
  Index n_districts = 5;
  Index n_parties = 3;
  std::optional<ShareVector> vote_share;
  ElectionModel model = SpmModel{0.9, 1};

  std::optional<std::filesystem::path> results_csv;
  std::optional<std::filesystem::path> party_map;

  SurveyParams survey;
  int survey_trials = 1000;
  std::vector<double> error_limits_seats{0.0};
  int survey_count = 1;  ///< surveys per posterior/abc/baseline run

  std::optional<DirichletParams> prior;
  int n_elections = 200;
  int n_inner_samples = 100;
  SeatKernel seat_kernel = SeatKernel::kSoft;
  double seat_tau = 0.05;
  double seat_hard_epsilon = 1e-3;
  double degenerate_precision = 1000.0;
  int n_candidates = 50;

  AbcConfig abc;

  ForensicsConfig forensics;  ///< prior/election/model/survey filled in from the sections above
  int surveys_per_category = 100;
  double malicious_lambda = 0.3;
  ModeReferenceKind mode_reference = ModeReferenceKind::kEnsemble;

  std::optional<DirichletParams> baseline_vote_prior;
  std::optional<DirichletParams> baseline_seat_prior;
  double baseline_vote_scale = 1.0;
  double baseline_seat_scale = 1.0;

  ElectionConfig election_config() const { return ElectionConfig::equal_split(n_voters, n_districts, n_parties); }
  DirichletParams prior_or_flat() const;
  PosteriorConfig posterior_config(const ElectionConfig& election) const;
  ForensicsConfig forensics_config(const ElectionConfig& election) const;
  BaselineConfig baseline_config() const;
};

/// Thrown for malformed or out-of-range configuration, before any computation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Checks every numeric constraint of the sections a command will use.
void validate(const RunConfig& cfg);

}  // namespace seatcast::cli
