#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "seatcast/core.hpp"

namespace seatcast {

/// Parse failure; line() is 1-based, 0 when the problem is not tied to a line.
class IngestError : public std::runtime_error {
 public:
  IngestError(const std::string& path, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Raw party id -> consolidated party id.
using PartyMap = std::map<std::string, std::string>;

/// Reads a two-column CSV with header source_party,party.
PartyMap load_party_map(const std::filesystem::path& path);

struct IngestedElection {
  CompleteElection election;
  std::vector<std::string> district_ids;  ///< row order, first appearance in the file
  std::vector<std::string> source_parties;  ///< original id of P1..PK
};

/// Reads a district_id,party_id,votes CSV. Parties are ordered by descending total
/// votes and relabeled P1..PK, unless the file already uses exactly the labels
/// P1..PK, in which case that order is kept. Missing (district, party) pairs count
/// as zero votes. With a party map every raw party must be mapped; mapped votes are summed.
IngestedElection ingest_results(const std::filesystem::path& path, const PartyMap* party_map = nullptr);

/// Writes the snapshot CSV with district ids D1..DS and party ids P1..PK, one row
/// per (district, party) including zero rows.
void write_snapshot(const CompleteElection& z, const std::filesystem::path& path);

}  // namespace seatcast
