#pragma once

// Declarative experiment runs: a config names the experiment and its inputs,
// run() executes it and writes CSV/JSON/SVG artifacts plus manifest.json
// (inputs, seed, version, wall time and a SHA-256 per output file).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dcx {

inline constexpr const char* kVersion = "1.0.0";

/// Exit statuses of run() and the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitPrecondition = 2, kExitInconclusive = 3 };

struct ExperimentConfig {
  /// generate | classify | cx-chain | spectral | perc-sweep | path-bound |
  /// coverage | crossing
  std::string experiment;
  std::vector<std::string> generators;
  std::vector<std::string> laws;
  std::vector<double> window_lower{0.0, 0.0};
  std::vector<double> window_upper{10.0, 10.0};
  /// Radius grid (perc-sweep), disk radii (spectral), or a single grain
  /// radius (path-bound, coverage, crossing).
  std::vector<double> radii;
  std::vector<int> ks;
  std::vector<int> orders{2, 3};
  double m = 2.0;
  std::size_t reps = 1000;
  /// Mandatory; there is no clock-based default.
  std::optional<std::uint64_t> seed;
  std::string out = "dcxlab-out";
  unsigned threads = 1;
  double tol = 1e-6;
  double crossing_level = 0.5;
  std::size_t probes_per_axis = 128;

  nlohmann::json to_json() const;
  /// ParseError naming the offending field on wrong types or unknown keys.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);

  bool operator==(const ExperimentConfig&) const = default;
};

const std::vector<std::string>& experiment_names();

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::filesystem::path manifest;
  nlohmann::json summary;
};

/// Validation and library errors are caught and reported as exit status 2
/// with a message naming the offending field; statistically inconclusive
/// results give status 3 (the artifacts are still written).
RunOutcome run(const ExperimentConfig& config);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace dcx
