#include "seatcast/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_map>

namespace seatcast {

IngestError::IngestError(const std::string& path, std::size_t line, const std::string& what)
    : std::runtime_error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(trim(field));
  return out;
}

// Calls `row(line_number, fields)` for every non-empty data line after checking the header.
template <typename F>
void read_csv(const std::filesystem::path& path, const std::vector<std::string>& header, F&& row) {
  std::ifstream in(path);
  if (!in) throw IngestError(path.string(), 0, "cannot open file");
  std::string line;
  std::size_t number = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (!seen_header) {
      if (fields != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw IngestError(path.string(), number, "expected header '" + want + "'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw IngestError(path.string(), number, "expected " + std::to_string(header.size()) + " fields");
    }
    row(number, fields);
  }
  if (!seen_header) throw IngestError(path.string(), 0, "empty file");
}

bool canonical_labels(const std::vector<std::string>& parties) {
  std::set<std::string> expected;
  for (std::size_t k = 0; k < parties.size(); ++k) expected.insert("P" + std::to_string(k + 1));
  return std::set<std::string>(parties.begin(), parties.end()) == expected;
}

}  // namespace

PartyMap load_party_map(const std::filesystem::path& path) {
  PartyMap map;
  read_csv(path, {"source_party", "party"}, [&](std::size_t number, const std::vector<std::string>& f) {
    if (f[0].empty() || f[1].empty()) throw IngestError(path.string(), number, "empty party id");
    if (!map.emplace(f[0], f[1]).second) throw IngestError(path.string(), number, "duplicate source party " + f[0]);
  });
  return map;
}

IngestedElection ingest_results(const std::filesystem::path& path, const PartyMap* party_map) {
  std::vector<std::string> districts;
  std::vector<std::string> parties;
  std::unordered_map<std::string, Index> district_index;
  std::unordered_map<std::string, Index> party_index;
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<std::tuple<Index, Index, std::int64_t>> entries;

  read_csv(path, {"district_id", "party_id", "votes"}, [&](std::size_t number, const std::vector<std::string>& f) {
    const std::string& district = f[0];
    std::string party = f[1];
    if (district.empty() || party.empty()) throw IngestError(path.string(), number, "empty id");
    if (!seen.emplace(district, party).second) {
      throw IngestError(path.string(), number, "duplicate row for district " + district + ", party " + party);
    }
    std::int64_t votes = 0;
    const auto [end, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), votes);
    if (ec != std::errc() || end != f[2].data() + f[2].size() || votes < 0) {
      throw IngestError(path.string(), number, "votes must be a non-negative integer, got '" + f[2] + "'");
    }
    if (party_map) {
      const auto it = party_map->find(party);
      if (it == party_map->end()) throw IngestError(path.string(), number, "party " + party + " missing from party map");
      party = it->second;
    }
    auto [d, new_district] = district_index.emplace(district, static_cast<Index>(districts.size()));
    if (new_district) districts.push_back(district);
    auto [p, new_party] = party_index.emplace(party, static_cast<Index>(parties.size()));
    if (new_party) parties.push_back(party);
    entries.emplace_back(d->second, p->second, votes);
  });
  if (entries.empty()) throw IngestError(path.string(), 0, "no data rows");

  const auto s = static_cast<Index>(districts.size());
  const auto k = static_cast<Index>(parties.size());
  CountMatrix raw = CountMatrix::Zero(s, k);
  for (const auto& [d, p, v] : entries) raw(d, p) += v;

  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  if (canonical_labels(parties)) {
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      return std::stoi(parties[static_cast<std::size_t>(a)].substr(1)) <
             std::stoi(parties[static_cast<std::size_t>(b)].substr(1));
    });
  } else {
    const CountVector totals = raw.colwise().sum().transpose();
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return totals(a) > totals(b); });
  }
  CountMatrix counts(s, k);
  std::vector<std::string> source;
  for (Index j = 0; j < k; ++j) {
    counts.col(j) = raw.col(order[static_cast<std::size_t>(j)]);
    source.push_back(parties[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])]);
  }
  try {
    return IngestedElection{CompleteElection::from_counts(std::move(counts)), std::move(districts), std::move(source)};
  } catch (const std::invalid_argument& e) {
    throw IngestError(path.string(), 0, e.what());
  }
}

void write_snapshot(const CompleteElection& z, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path.string());
  out << "district_id,party_id,votes\n";
  for (Index s = 0; s < z.n_districts(); ++s) {
    for (Index k = 0; k < z.n_parties(); ++k) {
      out << 'D' << s + 1 << ",P" << k + 1 << ',' << z.counts()(s, k) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write_snapshot: write failed for " + path.string());
}

}  // namespace seatcast
