#pragma once

// Subcommand dispatch, run manifests and report emission for the ipslab tool.

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ipslab::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfigError = 2;

/// Named tolerance set frozen into every report.
struct ToleranceProfile {
  std::string name;
  double structural = 1e-10;
  double slack = 1e-6;
  double mc_sigmas = 4.0;
};

/// "default" (1e-10, 1e-6, 4 sigma) or "relaxed" (1e-8, 1e-4, 5 sigma).
/// Throws ConfigLoadError for other names.
ToleranceProfile tolerance_profile(std::string_view name);

struct RunFlags {
  std::optional<std::string> config;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out = ".";
  std::optional<std::string> tolerance;  // overrides the config's profile
  double t = 1.0;                        // simulate
  std::size_t samples = 10000;           // simulate
  std::size_t n = 4;                     // trees
  std::optional<std::size_t> functions;  // random test functions per check
  std::optional<std::string> timestamp;
};

/// Everything needed to re-execute a run. `out` is deliberately absent: the
/// report bytes do not depend on where they are written.
struct RunManifest {
  std::string config_hash;  // SHA-256 of the config bytes, "none" without config
  std::uint64_t seed = 0;
  std::string tolerance_profile;
  std::string subcommand;
  std::string timestamp;
  std::string tool_version;
  nlohmann::json flags;

  [[nodiscard]] nlohmann::json to_json() const;
  /// Throws ConfigLoadError on a malformed manifest.
  static RunManifest from_json(const nlohmann::json& j);
};

struct RunResult {
  int exit_code = kExitPass;
  nlohmann::json report;
  std::string witness_csv;  // empty when the subcommand has no witnesses
};

const std::vector<std::string>& subcommands();

/// Runs a subcommand in-process and writes report.json, plus witness.csv
/// when there are witnesses, into flags.out. Never throws for bad input:
/// config and flag errors yield kExitConfigError with the itemized message
/// on `log`.
RunResult run(const std::string& subcommand, const RunFlags& flags, std::ostream& log);

/// Re-executes the manifest stored in `path` (a report.json or a bare
/// manifest). When `path` is a report, the new report must match it byte
/// for byte, otherwise the exit code is kExitFail.
RunResult replay(const std::string& path, const std::string& out, std::ostream& log);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// The exact bytes written to report.json.
std::string report_bytes(const nlohmann::json& report);

}  // namespace ipslab::cli
