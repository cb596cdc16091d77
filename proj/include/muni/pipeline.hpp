#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace muni::pipeline {

/// Flat key=value configuration. Keys use the long flag names
/// (`federal-tax-csv`); underscores are accepted and normalized to hyphens.
using Config = std::map<std::string, std::string>;

std::string_view tool_version();

Config normalize(const Config& raw);
/// Loads a key=value file and normalizes its keys.
Config load_config(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::filesystem::path& path);

struct RunSummary {
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> outputs;
  std::map<std::string, std::string> stats;
};

// Each command reads only the inputs named in its config, writes into
// `out`, and records a `<command>.manifest` with the config hash, input and
// output digests and the tool version. Errors surface as muni::Error.
RunSummary cmd_clean(const Config& config);
RunSummary cmd_aggregate(const Config& config);
RunSummary cmd_spreads(const Config& config);
RunSummary cmd_liquidity(const Config& config);
RunSummary cmd_match(const Config& config);
RunSummary cmd_fit(const Config& config);
RunSummary cmd_event_study(const Config& config);
/// `out` is optional here; stats always carry both numbers.
RunSummary cmd_impact(const Config& config);
RunSummary cmd_synth(const Config& config);

}  // namespace muni::pipeline
