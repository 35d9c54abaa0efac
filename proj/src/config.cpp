#include "ipslab/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ipslab {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::ostringstream out;
  out << issues.size() << " config error(s)";
  for (const auto& i : issues) out << "\n  " << (i.pointer.empty() ? "/" : i.pointer) << ": " << i.message;
  return out.str();
}

std::string child(const std::string& ptr, std::string_view key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') {
      escaped += "~0";
    } else if (c == '/') {
      escaped += "~1";
    } else {
      escaped += c;
    }
  }
  return ptr + "/" + escaped;
}

std::string child(const std::string& ptr, std::size_t index) { return ptr + "/" + std::to_string(index); }

// Schema walker: every check appends to `issues` instead of throwing, so one
// pass reports everything that can be found before the model is built.
class Checker {
 public:
  std::vector<ConfigIssue> issues;

  void fail(const std::string& ptr, std::string msg) { issues.push_back({ptr, std::move(msg)}); }

  bool object(const json& j, const std::string& ptr, const std::set<std::string>& allowed,
              const std::set<std::string>& required) {
    if (!j.is_object()) {
      fail(ptr, "expected an object");
      return false;
    }
    for (const auto& [key, value] : j.items()) {
      if (!allowed.contains(key)) fail(child(ptr, key), "unknown key");
    }
    bool ok = true;
    for (const auto& key : required) {
      if (!j.contains(key)) {
        fail(child(ptr, key), "missing required key");
        ok = false;
      }
    }
    return ok;
  }

  std::optional<double> number(const json& j, const std::string& ptr) {
    if (!j.is_number()) {
      fail(ptr, "expected a number");
      return std::nullopt;
    }
    return j.get<double>();
  }

  std::optional<std::string> string(const json& j, const std::string& ptr) {
    if (!j.is_string()) {
      fail(ptr, "expected a string");
      return std::nullopt;
    }
    return j.get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& j, const std::string& ptr) {
    if (!j.is_array()) {
      fail(ptr, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto v = number(j[i], child(ptr, i));
      ok = ok && v.has_value();
      out.push_back(v.value_or(0.0));
    }
    if (!ok) return std::nullopt;
    return out;
  }
};

struct SiteIndex {
  std::vector<std::string> ids;
  std::map<std::string, std::size_t> index;

  std::optional<std::size_t> find(const json& j, const std::string& ptr, Checker& ck) const {
    const auto s = ck.string(j, ptr);
    if (!s) return std::nullopt;
    const auto it = index.find(*s);
    if (it == index.end()) {
      ck.fail(ptr, "unknown site '" + *s + "'");
      return std::nullopt;
    }
    return it->second;
  }
};

std::optional<Alphabet> read_alphabet(const json& j, Checker& ck) {
  const auto values = ck.numbers(j, "/alphabet");
  if (!values) return std::nullopt;
  if (values->size() < 2) {
    ck.fail("/alphabet", "needs at least two symbols");
    return std::nullopt;
  }
  std::set<double> seen(values->begin(), values->end());
  if (seen.size() != values->size()) {
    ck.fail("/alphabet", "symbols must be distinct");
    return std::nullopt;
  }
  return Alphabet(*values);
}

std::optional<SiteIndex> read_sites(const json& j, Checker& ck) {
  if (!j.is_array() || j.empty()) {
    ck.fail("/sites", "expected a nonempty array of site ids");
    return std::nullopt;
  }
  SiteIndex s;
  bool ok = true;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto id = ck.string(j[i], child("/sites", i));
    if (!id) {
      ok = false;
      continue;
    }
    if (s.index.contains(*id)) {
      ck.fail(child("/sites", i), "duplicate site '" + *id + "'");
      ok = false;
      continue;
    }
    s.index[*id] = s.ids.size();
    s.ids.push_back(*id);
  }
  if (!ok) return std::nullopt;
  return s;
}

std::optional<std::vector<std::vector<std::size_t>>> read_neighborhoods(const json& j, const SiteIndex& sites,
                                                                       bool include_self, Checker& ck) {
  const std::string ptr = "/neighborhoods";
  if (!j.is_object()) {
    ck.fail(ptr, "expected an object mapping site -> array of sites");
    return std::nullopt;
  }
  std::vector<std::vector<std::size_t>> out(sites.ids.size());
  bool ok = true;
  for (const auto& [key, value] : j.items()) {
    const auto it = sites.index.find(key);
    if (it == sites.index.end()) {
      ck.fail(child(ptr, key), "unknown site");
      ok = false;
      continue;
    }
    if (!value.is_array()) {
      ck.fail(child(ptr, key), "expected an array of sites");
      ok = false;
      continue;
    }
    for (std::size_t i = 0; i < value.size(); ++i) {
      const auto y = sites.find(value[i], child(child(ptr, key), i), ck);
      if (!y) {
        ok = false;
        continue;
      }
      if (*y == it->second && !include_self) {
        ck.fail(child(child(ptr, key), i), "site lists itself but neighborhoods_include_self is false");
        ok = false;
      }
      out[it->second].push_back(*y);
    }
  }
  for (std::size_t x = 0; x < sites.ids.size(); ++x) {
    if (!j.contains(sites.ids[x])) {
      ck.fail(child(ptr, sites.ids[x]), "missing neighborhood");
      ok = false;
    } else if (include_self && std::find(out[x].begin(), out[x].end(), x) == out[x].end()) {
      ck.fail(child(ptr, sites.ids[x]), "neighborhoods_include_self is true but the site is not listed");
      ok = false;
    }
  }
  if (!ok) return std::nullopt;
  return out;
}

std::optional<Hamiltonian> read_hamiltonian(const json& j, const std::string& ptr, const SiteIndex& sites,
                                            const Alphabet& alphabet, Checker& ck) {
  if (!ck.object(j, ptr, {"beta", "field", "couplings", "spins"}, {})) return std::nullopt;
  Hamiltonian h;
  bool ok = true;
  if (j.contains("beta")) {
    const auto b = ck.number(j["beta"], child(ptr, "beta"));
    ok = ok && b.has_value();
    h.beta = b.value_or(1.0);
  }
  if (j.contains("field")) {
    const json& f = j["field"];
    if (f.is_number()) {
      h.field.assign(sites.ids.size(), f.get<double>());
    } else if (const auto v = ck.numbers(f, child(ptr, "field"))) {
      if (v->size() != sites.ids.size()) {
        ck.fail(child(ptr, "field"), "needs one entry per site");
        ok = false;
      }
      h.field = *v;
    } else {
      ok = false;
    }
  }
  if (j.contains("couplings")) {
    const json& c = j["couplings"];
    const std::string cptr = child(ptr, "couplings");
    if (!c.is_array()) {
      ck.fail(cptr, "expected an array of [site, site, strength]");
      ok = false;
    } else {
      for (std::size_t i = 0; i < c.size(); ++i) {
        const std::string eptr = child(cptr, i);
        if (!c[i].is_array() || c[i].size() != 3) {
          ck.fail(eptr, "expected [site, site, strength]");
          ok = false;
          continue;
        }
        const auto a = sites.find(c[i][0], child(eptr, 0), ck);
        const auto b = sites.find(c[i][1], child(eptr, 1), ck);
        const auto s = ck.number(c[i][2], child(eptr, 2));
        if (!a || !b || !s) {
          ok = false;
          continue;
        }
        if (*a == *b) {
          ck.fail(eptr, "a coupling needs two distinct sites");
          ok = false;
          continue;
        }
        h.couplings.push_back({*a, *b, *s});
      }
    }
  }
  if (j.contains("spins")) {
    const auto v = ck.numbers(j["spins"], child(ptr, "spins"));
    if (v && v->size() != alphabet.size()) {
      ck.fail(child(ptr, "spins"), "needs one value per alphabet symbol");
      ok = false;
    }
    ok = ok && v.has_value();
    h.spin_values = v.value_or(std::vector<double>{});
  }
  if (!ok) return std::nullopt;
  return h;
}

std::optional<std::vector<std::vector<double>>> read_table(const json& j, const std::string& ptr,
                                                           const SiteIndex& sites, const StateSpace& space,
                                                           Checker& ck) {
  if (!j.is_object()) {
    ck.fail(ptr, "expected an object mapping site -> |Omega| rows of |E| probabilities");
    return std::nullopt;
  }
  std::vector<std::vector<double>> tables(sites.ids.size());
  bool ok = true;
  for (const auto& [key, rows] : j.items()) {
    const auto it = sites.index.find(key);
    const std::string sptr = child(ptr, key);
    if (it == sites.index.end()) {
      ck.fail(sptr, "unknown site");
      ok = false;
      continue;
    }
    if (!rows.is_array() || rows.size() != space.size()) {
      ck.fail(sptr, "expected " + std::to_string(space.size()) + " rows, one per configuration");
      ok = false;
      continue;
    }
    auto& table = tables[it->second];
    for (std::size_t s = 0; s < rows.size(); ++s) {
      const auto row = ck.numbers(rows[s], child(sptr, s));
      if (!row || row->size() != space.alphabet_size()) {
        if (row) ck.fail(child(sptr, s), "expected " + std::to_string(space.alphabet_size()) + " probabilities");
        ok = false;
        continue;
      }
      table.insert(table.end(), row->begin(), row->end());
    }
  }
  for (const auto& id : sites.ids) {
    if (!j.contains(id)) {
      ck.fail(child(ptr, id), "missing kernel table");
      ok = false;
    }
  }
  if (!ok) return std::nullopt;
  return tables;
}

std::optional<Formula> read_formula(const json& j, const std::string& ptr, const SiteIndex& sites, Checker& ck) {
  if (!j.is_object() || j.empty()) {
    ck.fail(ptr, "expected a formula object: site, and, or, threshold");
    return std::nullopt;
  }
  auto children = [&](const json& list, const std::string& lptr) -> std::optional<std::vector<Formula>> {
    if (!list.is_array() || list.empty()) {
      ck.fail(lptr, "expected a nonempty array of formulas");
      return std::nullopt;
    }
    std::vector<Formula> out;
    bool ok = true;
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto f = read_formula(list[i], child(lptr, i), sites, ck);
      ok = ok && f.has_value();
      if (f) out.push_back(std::move(*f));
    }
    if (!ok) return std::nullopt;
    return out;
  };
  if (j.contains("site")) {
    if (!ck.object(j, ptr, {"site"}, {"site"})) return std::nullopt;
    const auto x = sites.find(j["site"], child(ptr, "site"), ck);
    if (!x) return std::nullopt;
    return Formula::atom(*x);
  }
  if (j.contains("and")) {
    if (!ck.object(j, ptr, {"and"}, {"and"})) return std::nullopt;
    auto c = children(j["and"], child(ptr, "and"));
    if (!c) return std::nullopt;
    return Formula::all_of(std::move(*c));
  }
  if (j.contains("or")) {
    if (!ck.object(j, ptr, {"or"}, {"or"})) return std::nullopt;
    auto c = children(j["or"], child(ptr, "or"));
    if (!c) return std::nullopt;
    return Formula::any_of(std::move(*c));
  }
  if (j.contains("threshold")) {
    if (!ck.object(j, ptr, {"threshold", "of"}, {"threshold", "of"})) return std::nullopt;
    const json& k = j["threshold"];
    if (!k.is_number_unsigned()) {
      ck.fail(child(ptr, "threshold"), "expected a nonnegative integer");
      return std::nullopt;
    }
    auto c = children(j["of"], child(ptr, "of"));
    if (!c) return std::nullopt;
    return Formula::at_least(k.get<std::size_t>(), std::move(*c));
  }
  ck.fail(ptr, "expected one of the keys site, and, or, threshold");
  return std::nullopt;
}

struct EventDraft {
  std::string name;
  std::string ptr;
  std::optional<Formula> formula;
  std::vector<Configuration> states;
};

std::optional<std::vector<EventDraft>> read_events(const json& j, const SiteIndex& sites, const Alphabet& alphabet,
                                                   Checker& ck) {
  if (!j.is_array()) {
    ck.fail("/events", "expected an array");
    return std::nullopt;
  }
  std::vector<EventDraft> out;
  std::set<std::string> names;
  bool ok = true;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string ptr = child("/events", i);
    if (!ck.object(j[i], ptr, {"name", "formula", "states"}, {"name"})) {
      ok = false;
      continue;
    }
    EventDraft d;
    d.ptr = ptr;
    d.name = ck.string(j[i]["name"], child(ptr, "name")).value_or("");
    if (!d.name.empty() && !names.insert(d.name).second) ck.fail(child(ptr, "name"), "duplicate event name");
    const bool has_formula = j[i].contains("formula");
    if (has_formula == j[i].contains("states")) {
      ck.fail(ptr, "needs exactly one of formula, states");
      ok = false;
      continue;
    }
    if (has_formula) {
      d.formula = read_formula(j[i]["formula"], child(ptr, "formula"), sites, ck);
      ok = ok && d.formula.has_value();
    } else {
      const json& list = j[i]["states"];
      const std::string sptr = child(ptr, "states");
      if (!list.is_array()) {
        ck.fail(sptr, "expected an array of configurations");
        ok = false;
        continue;
      }
      for (std::size_t k = 0; k < list.size(); ++k) {
        const auto values = ck.numbers(list[k], child(sptr, k));
        if (!values) {
          ok = false;
          continue;
        }
        if (values->size() != sites.ids.size()) {
          ck.fail(child(sptr, k), "needs one symbol per site");
          ok = false;
          continue;
        }
        Configuration c;
        for (std::size_t x = 0; x < values->size(); ++x) {
          const auto idx = alphabet.index_of((*values)[x]);
          if (!idx) {
            ck.fail(child(child(sptr, k), x), "not an alphabet symbol");
            ok = false;
            break;
          }
          c.push_back(*idx);
        }
        if (c.size() == values->size()) d.states.push_back(std::move(c));
      }
    }
    out.push_back(std::move(d));
  }
  if (!ok) return std::nullopt;
  return out;
}

struct FamilyDraft {
  double a = 0.0;
  double b = 0.0;
  std::string type;
  double slope = 1.0;
  double offset = 0.0;
};

std::optional<FamilyDraft> read_family(const json& j, Checker& ck) {
  const std::string ptr = "/family";
  if (!ck.object(j, ptr, {"parameter", "type", "field_slope", "field_offset"}, {"parameter", "type"})) {
    return std::nullopt;
  }
  FamilyDraft d;
  bool ok = true;
  const auto range = ck.numbers(j["parameter"], child(ptr, "parameter"));
  if (!range || range->size() != 2 || !((*range)[0] < (*range)[1])) {
    if (range) ck.fail(child(ptr, "parameter"), "expected [a, b] with a < b");
    ok = false;
  } else {
    d.a = (*range)[0];
    d.b = (*range)[1];
  }
  d.type = ck.string(j["type"], child(ptr, "type")).value_or("");
  if (d.type != "bernoulli" && d.type != "hamiltonian") {
    ck.fail(child(ptr, "type"), "expected \"bernoulli\" or \"hamiltonian\"");
    ok = false;
  }
  for (const char* key : {"field_slope", "field_offset"}) {
    if (!j.contains(key)) continue;
    if (d.type != "hamiltonian") {
      ck.fail(child(ptr, key), "only applies to hamiltonian families");
      ok = false;
      continue;
    }
    const auto v = ck.number(j[key], child(ptr, key));
    ok = ok && v.has_value();
    (std::string_view(key) == "field_slope" ? d.slope : d.offset) = v.value_or(0.0);
  }
  if (!ok) return std::nullopt;
  return d;
}

}  // namespace

ConfigLoadError::ConfigLoadError(std::vector<ConfigIssue> issues)
    : Error(ErrorCode::ConfigError, join_issues(issues)), issues_(std::move(issues)) {}

ConfigLoadError::ConfigLoadError(std::string pointer, std::string message)
    : ConfigLoadError(std::vector<ConfigIssue>{{std::move(pointer), std::move(message)}}) {}

LabConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigLoadError("", e.what());
  }

  Checker ck;
  if (!ck.object(root, "",
                 {"version", "description", "alphabet", "sites", "neighborhoods", "neighborhoods_include_self",
                  "kernel", "measure", "tolerance", "events", "family"},
                 {"version", "alphabet", "sites", "kernel"})) {
    throw ConfigLoadError(ck.issues);
  }

  LabConfig cfg;
  if (!root["version"].is_number_integer() || root["version"].get<int>() != kConfigSchemaVersion) {
    ck.fail("/version", "unsupported schema version (expected " + std::to_string(kConfigSchemaVersion) + ")");
  }
  if (root.contains("description")) cfg.description = ck.string(root["description"], "/description").value_or("");
  if (root.contains("tolerance")) {
    cfg.tolerance = ck.string(root["tolerance"], "/tolerance").value_or("default");
  }

  const auto alphabet = read_alphabet(root["alphabet"], ck);
  const auto sites = read_sites(root["sites"], ck);
  bool include_self = false;
  if (root.contains("neighborhoods_include_self")) {
    if (root["neighborhoods_include_self"].is_boolean()) {
      include_self = root["neighborhoods_include_self"].get<bool>();
    } else {
      ck.fail("/neighborhoods_include_self", "expected a boolean");
    }
  }
  std::optional<std::vector<std::vector<std::size_t>>> neighborhoods;
  if (sites && root.contains("neighborhoods")) {
    neighborhoods = read_neighborhoods(root["neighborhoods"], *sites, include_self, ck);
  }

  std::optional<StateSpace> space;
  if (alphabet && sites) {
    try {
      space.emplace(alphabet->size(), sites->ids.size());
    } catch (const Error& e) {
      ck.fail("/sites", e.what());
    }
  }

  // Kernel section.
  std::string kernel_type;
  std::optional<Hamiltonian> hamiltonian;
  std::optional<std::vector<std::vector<double>>> table;
  const json& kernel = root["kernel"];
  if (ck.object(kernel, "/kernel", {"type", "hamiltonian", "table"}, {"type"})) {
    kernel_type = ck.string(kernel["type"], "/kernel/type").value_or("");
    if (kernel_type == "heat_bath") {
      if (kernel.contains("table")) ck.fail("/kernel/table", "only applies to table kernels");
      const bool has_h = kernel.contains("hamiltonian");
      if (has_h == root.contains("measure")) {
        ck.fail("/kernel", "heat_bath kernels need exactly one of kernel.hamiltonian, measure");
      }
      if (has_h && alphabet && sites) {
        hamiltonian = read_hamiltonian(kernel["hamiltonian"], "/kernel/hamiltonian", *sites, *alphabet, ck);
      }
    } else if (kernel_type == "table") {
      if (kernel.contains("hamiltonian")) ck.fail("/kernel/hamiltonian", "only applies to heat_bath kernels");
      if (!kernel.contains("table")) {
        ck.fail("/kernel/table", "missing required key");
      } else if (sites && space) {
        table = read_table(kernel["table"], "/kernel/table", *sites, *space, ck);
      }
    } else {
      ck.fail("/kernel/type", "expected \"heat_bath\" or \"table\"");
    }
  }

  std::optional<std::vector<double>> measure;
  if (root.contains("measure")) {
    measure = ck.numbers(root["measure"], "/measure");
    if (measure && space && measure->size() != space->size()) {
      ck.fail("/measure", "expected " + std::to_string(space->size()) + " weights, one per configuration");
      measure.reset();
    }
  }

  std::optional<std::vector<EventDraft>> events;
  if (root.contains("events") && sites && alphabet) events = read_events(root["events"], *sites, *alphabet, ck);
  std::optional<FamilyDraft> family;
  if (root.contains("family")) {
    family = read_family(root["family"], ck);
    if (family && family->type == "hamiltonian" && !root["kernel"].contains("hamiltonian")) {
      ck.fail("/family/type", "hamiltonian families need kernel.hamiltonian");
    }
  }
  if (!ck.issues.empty()) throw ConfigLoadError(ck.issues);

  // Every schema check passed; remaining failures are model invariants.
  auto with_pointer = [&](const std::string& ptr, auto&& build) {
    try {
      build();
    } catch (const ConfigLoadError&) {
      throw;
    } catch (const Error& e) {
      ck.fail(ptr, e.what());
    }
  };
  const SiteSet site_set = neighborhoods ? SiteSet(sites->ids, *neighborhoods, include_self)
                                         : SiteSet::complete(sites->ids);
  with_pointer("/kernel", [&] {
    if (kernel_type == "heat_bath") {
      const Measure mu = hamiltonian ? gibbs_measure(*space, *alphabet, *hamiltonian)
                                     : Measure(Eigen::Map<const Eigen::VectorXd>(
                                           measure->data(), static_cast<Eigen::Index>(measure->size())));
      cfg.model = neighborhoods ? heat_bath_model(*alphabet, site_set, mu) : heat_bath_model(*alphabet, sites->ids, mu);
    } else {
      const KernelFamily kernels = KernelFamily::from_table(*space, site_set, *table);
      const Measure mu = measure ? Measure(Eigen::Map<const Eigen::VectorXd>(
                                       measure->data(), static_cast<Eigen::Index>(measure->size())))
                                 : stationary_measure(*space, kernels);
      cfg.model.emplace(*alphabet, site_set, kernels, mu);
    }
  });
  if (!ck.issues.empty()) throw ConfigLoadError(ck.issues);

  if (events) {
    for (const auto& d : *events) {
      with_pointer(d.ptr, [&] {
        if (d.formula) {
          cfg.events.push_back(certify_increasing(*cfg.model, compile_formula(*cfg.model, *d.formula, d.name)));
        } else {
          cfg.events.push_back(event_from_states(*cfg.model, d.states, d.name));
        }
      });
    }
  }
  if (family) {
    with_pointer("/family", [&] {
      if (family->type == "bernoulli") {
        require_binary(*cfg.model);
        cfg.family = ParamFamily::bernoulli(sites->ids, family->a, family->b);
      } else {
        cfg.family = ParamFamily::gibbs_field(*alphabet, cfg.model->sites(), *hamiltonian, family->slope,
                                              family->offset, family->a, family->b);
        // Builds both endpoints so bad ranges surface at load time.
        (void)cfg.family->at(family->a);
        (void)cfg.family->at(family->b);
      }
    });
  }
  if (!ck.issues.empty()) throw ConfigLoadError(ck.issues);
  return cfg;
}

LabConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigLoadError("", "cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace ipslab
