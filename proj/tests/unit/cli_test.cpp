#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

using namespace seatcast;
using namespace seatcast::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_config() {
  return json::parse(R"({
    "schema_version": 1,
    "seed": 3,
    "election": {"n_voters": 2000, "n_districts": 5, "n_parties": 3,
                 "vote_share": [0.45, 0.35, 0.2], "model": {"type": "spm", "gamma": 0.6}},
    "survey": {"person_fraction": 0.1, "trials": 50, "error_limits_seats": [0, 1], "count": 2},
    "prior": [2, 2, 2],
    "posterior": {"n_elections": 5, "n_inner_samples": 10, "n_candidates": 4},
    "abc": {"vote_tolerance": 1.0, "seat_tolerance": 5.0, "target_accepted": 5},
    "forensics": {"n_reference_samples": 200, "surveys_per_category": 3, "mode_elections": 2,
                  "mode_surveys_per_election": 5, "x_match_vote_eps": 0.5, "x_match_seat_eps": 5.0,
                  "min_conditioning_samples": 1}
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path out_dir(const std::string& name) { return fs::temp_directory_path() / "seatcast_cli_test" / name; }

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_run_config(base_config());
  CHECK(cfg.seed == 3);
  CHECK(cfg.n_voters == 2000);
  CHECK(std::get<SpmModel>(cfg.model).gamma == 0.6);
  CHECK(cfg.survey_count == 2);
  CHECK(cfg.prior->alpha() == Eigen::Vector3d(2, 2, 2));
  CHECK_NOTHROW(validate(cfg));

  json pcm = base_config();
  pcm["election"]["model"] = json::parse(R"({"type": "pcm", "gammas": [0.1, 0.2, 0.9]})");
  CHECK(std::holds_alternative<PcmModel>(parse_run_config(pcm).model));
}

TEST_CASE("config errors are caught before any work") {
  json unknown = base_config();
  unknown["survey"]["persons"] = 0.1;
  CHECK_THROWS_AS(parse_run_config(unknown), ConfigError);

  json version = base_config();
  version["schema_version"] = 2;
  CHECK_THROWS_AS(parse_run_config(version), ConfigError);

  json type = base_config();
  type["seed"] = "seven";
  CHECK_THROWS_AS(parse_run_config(type), ConfigError);

  json gamma = base_config();
  gamma["election"]["model"]["gamma"] = 1.5;
  CHECK_THROWS_AS(validate(parse_run_config(gamma)), ConfigError);

  json share = base_config();
  share["election"]["vote_share"] = json::array({0.5, 0.6, 0.1});
  CHECK_THROWS_AS(parse_run_config(share), ConfigError);

  json dims = base_config();
  dims["prior"] = json::array({1, 1});
  CHECK_THROWS_AS(validate(parse_run_config(dims)), ConfigError);

  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("every command writes a versioned result") {
  const RunConfig cfg = parse_run_config(base_config());
  for (const std::string name : {"simulate", "survey", "posterior", "abc", "forensics", "baseline"}) {
    CAPTURE(name);
    const fs::path dir = out_dir(name);
    fs::remove_all(dir);
    run_command(name, CommandContext{cfg, dir});
    const json doc = json::parse(slurp(dir / "results.json"));
    CHECK(doc.at("schema_version") == kSchemaVersion);
    CHECK(doc.at("command") == name);
    bool has_csv = false;
    for (const auto& entry : fs::directory_iterator(dir)) has_csv |= entry.path().extension() == ".csv";
    CHECK(has_csv);
  }
  CHECK_THROWS_AS(run_command("plot", CommandContext{cfg, out_dir("plot")}), std::invalid_argument);
}

TEST_CASE("results are reproducible and worker invariant") {
  RunConfig cfg = parse_run_config(base_config());
  run_command("posterior", CommandContext{cfg, out_dir("p1")});
  run_command("posterior", CommandContext{cfg, out_dir("p2")});
  cfg.workers = 3;
  run_command("posterior", CommandContext{cfg, out_dir("p3")});
  const std::string first = slurp(out_dir("p1") / "results.json");
  CHECK(first == slurp(out_dir("p2") / "results.json"));
  CHECK(first == slurp(out_dir("p3") / "results.json"));
  CHECK(slurp(out_dir("p1") / "candidates.csv") == slurp(out_dir("p3") / "candidates.csv"));
}

TEST_CASE("simulated snapshot re-ingests to the same election") {
  RunConfig cfg = parse_run_config(base_config());
  std::get<SpmModel>(cfg.model).gamma = 0.9;
  cfg.n_voters = 10000;
  run_command("simulate", CommandContext{cfg, out_dir("snap")});
  CHECK(slurp(out_dir("snap") / "snapshot.csv").rfind("district_id,party_id,votes\n", 0) == 0);

  json from_file = base_config();
  from_file["input"] = json{{"results_csv", (out_dir("snap") / "snapshot.csv").string()}};
  from_file["election"].erase("vote_share");
  run_command("simulate", CommandContext{parse_run_config(from_file), out_dir("snap2")});
  CHECK(slurp(out_dir("snap") / "snapshot.csv") == slurp(out_dir("snap2") / "snapshot.csv"));
}

TEST_CASE("survey rates follow the error limits") {
  const RunConfig cfg = parse_run_config(base_config());
  run_command("survey", CommandContext{cfg, out_dir("rates")});
  const json doc = json::parse(slurp(out_dir("rates") / "results.json"));
  const auto& rates = doc.at("accurate_projection_rates");
  REQUIRE(rates.size() == 2);
  CHECK(rates[0].at("rate").get<double>() <= rates[1].at("rate").get<double>());
}
