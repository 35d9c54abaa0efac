#include "ipslab/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "checks.hpp"

#ifndef IPSLAB_VERSION
#define IPSLAB_VERSION "0.0.0"
#endif

namespace ipslab::cli {

using nlohmann::json;

namespace {

using SectionFn = Section (*)(CheckContext&);

const std::vector<std::pair<std::string, SectionFn>>& section_table() {
  static const std::vector<std::pair<std::string, SectionFn>> table{
      {"constants", constants_section}, {"talagrand", talagrand_section}, {"commutation", commutation_section},
      {"reverse", reverse_section},     {"russo", russo_section},         {"kkl", kkl_section},
      {"threshold", threshold_section}, {"simulate", simulate_section},   {"trees", trees_section},
  };
  return table;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigLoadError("", "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << bytes;
}

// SOURCE_DATE_EPOCH keeps reports reproducible when a timestamp is wanted;
// without it the epoch is used.
std::string default_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json flags_json(const RunFlags& f) {
  json j = {{"seed", f.seed}, {"workers", f.workers}, {"t", f.t}, {"samples", f.samples}, {"n", f.n}};
  j["config"] = f.config ? json(*f.config) : json(nullptr);
  j["tolerance"] = f.tolerance ? json(*f.tolerance) : json(nullptr);
  j["functions"] = f.functions ? json(*f.functions) : json(nullptr);
  return j;
}

RunFlags flags_from_json(const json& j, const std::string& timestamp) {
  RunFlags f;
  f.seed = j.at("seed").get<std::uint64_t>();
  f.workers = j.at("workers").get<std::size_t>();
  f.t = j.at("t").get<double>();
  f.samples = j.at("samples").get<std::size_t>();
  f.n = j.at("n").get<std::size_t>();
  if (!j.at("config").is_null()) f.config = j.at("config").get<std::string>();
  if (!j.at("tolerance").is_null()) f.tolerance = j.at("tolerance").get<std::string>();
  if (!j.at("functions").is_null()) f.functions = j.at("functions").get<std::size_t>();
  f.timestamp = timestamp;
  return f;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Long format: one row per (section, column, state).
std::string witness_csv(const Model* model, const std::vector<WitnessColumn>& columns) {
  if (columns.empty() || model == nullptr) return {};
  std::ostringstream out;
  out << "section,column,state,configuration,value\n";
  const auto& space = model->space();
  for (const auto& c : columns) {
    for (std::size_t s = 0; s < space.size(); ++s) {
      out << c.section << ',' << c.name << ',' << s << ',';
      for (std::size_t x = 0; x < space.n_sites(); ++x) {
        if (x > 0) out << ' ';
        out << format_double(model->alphabet().value(space.digit(s, x)));
      }
      out << ',' << format_double(c.values[static_cast<Eigen::Index>(s)]) << '\n';
    }
  }
  return out.str();
}

std::vector<std::string> sections_for(const std::string& subcommand, const LabConfig* config) {
  if (subcommand != "all") return {subcommand};
  std::vector<std::string> out{"constants", "talagrand", "commutation", "reverse", "simulate"};
  const bool binary = config != nullptr && config->model && config->model->alphabet().is_binary01();
  if (binary) out.push_back("kkl");
  if (config != nullptr && config->family) {
    out.push_back("russo");
    out.push_back("threshold");
  }
  out.push_back("trees");
  return out;
}

}  // namespace

ToleranceProfile tolerance_profile(std::string_view name) {
  if (name == "default") return {"default", 1e-10, 1e-6, 4.0};
  if (name == "relaxed") return {"relaxed", 1e-8, 1e-4, 5.0};
  throw ConfigLoadError("/tolerance", "unknown tolerance profile '" + std::string(name) + "'");
}

json RunManifest::to_json() const {
  return {{"configHash", config_hash},         {"seed", seed},
          {"toleranceProfile", tolerance_profile}, {"subcommand", subcommand},
          {"timestamp", timestamp},            {"toolVersion", tool_version},
          {"flags", flags}};
}

RunManifest RunManifest::from_json(const json& j) {
  try {
    RunManifest m;
    m.config_hash = j.at("configHash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.tolerance_profile = j.at("toleranceProfile").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    m.tool_version = j.at("toolVersion").get<std::string>();
    m.flags = j.at("flags");
    return m;
  } catch (const json::exception& e) {
    throw ConfigLoadError("/manifest", std::string("malformed manifest: ") + e.what());
  }
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : section_table()) n.push_back(name);
    n.push_back("all");
    return n;
  }();
  return names;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string report_bytes(const json& report) { return report.dump(2) + "\n"; }

RunResult run(const std::string& subcommand, const RunFlags& flags, std::ostream& log) {
  RunResult result;
  try {
    const auto& names = subcommands();
    if (std::find(names.begin(), names.end(), subcommand) == names.end()) {
      throw ConfigLoadError("", "unknown subcommand '" + subcommand + "'");
    }
    if (flags.workers == 0) throw ConfigLoadError("", "--workers must be at least 1");

    std::optional<LabConfig> config;
    std::string config_hash = "none";
    if (flags.config) {
      const std::string bytes = read_file(*flags.config);
      config_hash = sha256_hex(bytes);
      config = parse_config(bytes);
    } else if (subcommand != "trees") {
      throw ConfigLoadError("", subcommand + " needs --config");
    }
    const ToleranceProfile tol =
        tolerance_profile(flags.tolerance ? *flags.tolerance : (config ? config->tolerance : "default"));

    RunManifest manifest;
    manifest.config_hash = config_hash;
    manifest.seed = flags.seed;
    manifest.tolerance_profile = tol.name;
    manifest.subcommand = subcommand;
    manifest.timestamp = flags.timestamp ? *flags.timestamp : default_timestamp();
    manifest.tool_version = IPSLAB_VERSION;
    manifest.flags = flags_json(flags);

    CheckContext ctx(config ? &*config : nullptr, tol, flags);
    json sections = json::object();
    std::vector<WitnessColumn> witness;
    bool pass = true;
    for (const auto& name : sections_for(subcommand, config ? &*config : nullptr)) {
      const auto it = std::find_if(section_table().begin(), section_table().end(),
                                   [&](const auto& e) { return e.first == name; });
      Section s = it->second(ctx);
      log << name << ": " << (s.pass ? "PASS" : "FAIL") << '\n';
      pass = pass && s.pass;
      sections[name] = std::move(s.body);
      witness.insert(witness.end(), s.witness.begin(), s.witness.end());
    }

    json& report = result.report;
    report["manifest"] = manifest.to_json();
    report["tolerance"] = {{"name", tol.name},
                           {"structural", tol.structural},
                           {"slack", tol.slack},
                           {"mcSigmas", tol.mc_sigmas}};
    if (config && config->model) report["model"] = model_summary(*config->model);
    report["results"] = std::move(sections);
    report["pass"] = pass;
    result.witness_csv = witness_csv(ctx.has_model() ? &ctx.model() : nullptr, witness);
    result.exit_code = pass ? kExitPass : kExitFail;

    const std::filesystem::path out(flags.out);
    std::filesystem::create_directories(out);
    write_file(out / "report.json", report_bytes(report));
    if (!result.witness_csv.empty()) write_file(out / "witness.csv", result.witness_csv);
  } catch (const Error& e) {
    // Library errors before or during a check mean the input does not meet
    // the preconditions of the requested run.
    log << "error: " << e.what() << '\n';
    result.exit_code = kExitConfigError;
  }
  return result;
}

RunResult replay(const std::string& path, const std::string& out, std::ostream& log) {
  RunResult result;
  RunFlags flags;
  std::string subcommand;
  std::string original;
  bool is_report = false;
  try {
    original = read_file(path);
    json j;
    try {
      j = json::parse(original);
    } catch (const json::parse_error& e) {
      throw ConfigLoadError("", e.what());
    }
    is_report = j.is_object() && j.contains("manifest");
    const RunManifest m = RunManifest::from_json(is_report ? j["manifest"] : j);
    try {
      flags = flags_from_json(m.flags, m.timestamp);
    } catch (const json::exception& e) {
      throw ConfigLoadError("/manifest/flags", e.what());
    }
    if (flags.seed != m.seed) throw ConfigLoadError("/manifest/seed", "disagrees with flags.seed");
    const std::string hash = flags.config ? sha256_hex(read_file(*flags.config)) : "none";
    if (hash != m.config_hash) {
      throw ConfigLoadError("/manifest/configHash", "config file no longer matches the recorded hash");
    }
    if (m.tool_version != IPSLAB_VERSION) {
      log << "warning: manifest was written by version " << m.tool_version << '\n';
    }
    subcommand = m.subcommand;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    result.exit_code = kExitConfigError;
    return result;
  }
  flags.out = out;
  result = run(subcommand, flags, log);
  if (result.exit_code == kExitConfigError) return result;
  if (is_report) {
    const bool same = report_bytes(result.report) == original;
    log << "replay: " << (same ? "reproduced" : "differs") << '\n';
    if (!same) result.exit_code = kExitFail;
  }
  return result;
}

}  // namespace ipslab::cli
