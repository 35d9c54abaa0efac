#pragma once

// JSON model configuration: schema validation with itemized errors and
// construction of the model, its events and its parameter family.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipslab/influence.hpp"

namespace ipslab {

inline constexpr int kConfigSchemaVersion = 1;

/// One problem in a config file, located by JSON pointer ("" is the root).
struct ConfigIssue {
  std::string pointer;
  std::string message;
};

/// Raised with every issue found; what() lists one issue per line.
class ConfigLoadError : public Error {
 public:
  explicit ConfigLoadError(std::vector<ConfigIssue> issues);
  ConfigLoadError(std::string pointer, std::string message);
  [[nodiscard]] const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct LabConfig {
  int version = kConfigSchemaVersion;
  std::string description;
  std::string tolerance = "default";
  std::optional<Model> model;
  /// Events in file order. Formula events are certified increasing.
  std::vector<Event> events;
  std::optional<ParamFamily> family;
};

/// Validates and builds. Unknown keys are errors. Throws ConfigLoadError.
LabConfig parse_config(std::string_view text);
/// Reads the file and calls parse_config. Throws ConfigLoadError.
LabConfig load_config(const std::filesystem::path& path);

}  // namespace ipslab
