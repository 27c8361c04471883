#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "ibptc/turbo.hpp"

namespace ibptc {

inline constexpr const char* kToolVersion = "1.0.0";

// Enum <-> string codecs shared by the manifest and the CLI.
std::string to_string(Variant v);
std::string to_string(CodeRate r);
std::string to_string(SisoAlgo a);
std::string to_string(IntraKind k);
std::string to_string(BoundaryMode b);
Variant variant_from_string(const std::string& s);
CodeRate rate_from_string(const std::string& s);
SisoAlgo algo_from_string(const std::string& s);
IntraKind intra_from_string(const std::string& s);
BoundaryMode boundary_from_string(const std::string& s);

nlohmann::json to_json(const TurboConfig& cfg);
TurboConfig turbo_config_from_json(const nlohmann::json& j);

// Everything needed to reproduce one result file bit-exactly, plus wall-time
// bookkeeping (which is the one intentionally nondeterministic part and
// therefore lives here, not in the CSV).
struct RunManifest {
  std::string command;        // ber | exit | evolve | cov | interleaver-...
  nlohmann::json config;      // resolved TurboConfig (when applicable)
  nlohmann::json experiment;  // grids, stopping rule, trial counts, ...
  std::uint64_t master_seed = 0;
  std::string tool_version = kToolVersion;
  std::string started_at;   // ISO 8601 UTC
  std::string finished_at;
  nlohmann::json timing;    // seconds, per grid point where applicable
  std::string output;       // the result file this manifest accompanies
};

void save_manifest(const RunManifest& m, const std::string& path);
RunManifest load_manifest(const std::string& path);

// Manifest path that accompanies a result file.
std::string manifest_path_for(const std::string& output_path);

// Deterministic CSV number formatting: identical doubles always produce
// identical bytes.
std::string csv_double(double v);

std::string utc_timestamp();

}  // namespace ibptc
