#pragma once

// The verification sections behind each subcommand. Internal to the CLI.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "ipslab/cli.hpp"
#include "ipslab/config.hpp"
#include "ipslab/constants.hpp"

namespace ipslab::cli {

struct WitnessColumn {
  std::string section;
  std::string name;
  FunctionOnOmega values;
};

struct Section {
  nlohmann::json body;
  bool pass = true;
  std::vector<WitnessColumn> witness;
};

struct AuditedConstants {
  double kappa = 0.0;
  ConstantsReport upper;
  LogSobolevAudit audit;
};

/// Shared state of one run; the generator and audited constants are built
/// on first use and reused across the sections of `all`.
class CheckContext {
 public:
  CheckContext(const LabConfig* config, ToleranceProfile tolerance, RunFlags flags);

  [[nodiscard]] bool has_model() const noexcept { return config_ != nullptr && config_->model.has_value(); }
  /// Throws ConfigLoadError without a config.
  [[nodiscard]] const LabConfig& config() const;
  [[nodiscard]] const Model& model() const;
  const Generator& generator();
  const AuditedConstants& constants();
  [[nodiscard]] const ToleranceProfile& tolerance() const noexcept { return tolerance_; }
  [[nodiscard]] const RunFlags& flags() const noexcept { return flags_; }
  [[nodiscard]] std::size_t functions_or(std::size_t fallback) const { return flags_.functions.value_or(fallback); }

 private:
  const LabConfig* config_;
  ToleranceProfile tolerance_;
  RunFlags flags_;
  std::optional<Generator> generator_;
  std::optional<AuditedConstants> constants_;
};

Section constants_section(CheckContext& ctx);
Section talagrand_section(CheckContext& ctx);
Section commutation_section(CheckContext& ctx);
Section reverse_section(CheckContext& ctx);
Section russo_section(CheckContext& ctx);
Section kkl_section(CheckContext& ctx);
Section threshold_section(CheckContext& ctx);
Section simulate_section(CheckContext& ctx);
Section trees_section(CheckContext& ctx);

/// Model summary embedded in every report that has a model.
nlohmann::json model_summary(const Model& model);

}  // namespace ipslab::cli
