#include "halfspace/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "halfspace/errors.hpp"

namespace halfspace {

using nlohmann::json;

namespace {

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw config_error(path, "expected a number");
  return j.get<double>();
}

std::uint64_t get_unsigned(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) throw config_error(path, "expected a non-negative integer");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  throw config_error(path, "expected a non-negative integer");
}

const json& require(const json& j, const char* key) {
  const json* v = find(j, key);
  if (!v) throw config_error(key, "missing required field");
  return *v;
}

template <class F>
auto with_field(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error(path, e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& prefix) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.contains(it.key())) throw config_error(prefix + it.key(), "unknown field");
  }
}

void parse_noise(const json& j, NoiseSpec& out) {
  if (j.is_string()) {
    out.kind = with_field("noise", [&] { return noise_kind_from_string(j.get<std::string>()); });
    return;
  }
  if (!j.is_object()) throw config_error("noise", "expected a string or an object");
  reject_unknown(j, {"kind", "nu", "region"}, "noise.");
  if (const json* k = find(j, "kind")) {
    if (!k->is_string()) throw config_error("noise.kind", "expected a string");
    out.kind = with_field("noise.kind", [&] { return noise_kind_from_string(k->get<std::string>()); });
  }
  if (const json* nu = find(j, "nu")) out.nu = as_double(*nu, "noise.nu");
  if (const json* r = find(j, "region")) {
    if (!r->is_object()) throw config_error("noise.region", "expected an object");
    reject_unknown(*r, {"direction", "lower", "upper"}, "noise.region.");
    if (const json* dir = find(*r, "direction")) {
      std::string name = dir->is_string() ? dir->get<std::string>() : "";
      if (name == "truth") out.region_direction = RegionDirection::truth;
      else if (name == "random") out.region_direction = RegionDirection::random;
      else throw config_error("noise.region.direction", "expected \"truth\" or \"random\"");
    }
    if (const json* lo = find(*r, "lower")) out.region_lower = as_double(*lo, "noise.region.lower");
    if (const json* hi = find(*r, "upper")) out.region_upper = as_double(*hi, "noise.region.upper");
  }
}

void parse_constants(const json& j, ConstantsConfig& c) {
  if (!j.is_object()) throw config_error("constants", "expected an object");
  reject_unknown(j, {"c_bar", "c_b", "c_alpha", "c_T", "c_m", "zeta", "b_init", "s_tilde_factor",
                     "paper_faithful", "averaging", "band_max_attempts"},
                 "constants.");
  auto num = [&](const char* key, double& dst) {
    if (const json* v = find(j, key)) dst = as_double(*v, std::string("constants.") + key);
  };
  num("c_bar", c.c_bar);
  num("c_b", c.c_b);
  num("c_alpha", c.c_alpha);
  num("c_T", c.c_T);
  num("c_m", c.c_m);
  num("zeta", c.zeta);
  num("b_init", c.b_init);
  num("s_tilde_factor", c.s_tilde_factor);
  if (const json* v = find(j, "paper_faithful")) {
    if (!v->is_boolean()) throw config_error("constants.paper_faithful", "expected a boolean");
    c.paper_faithful = v->get<bool>();
  }
  if (const json* v = find(j, "band_max_attempts")) {
    c.band_max_attempts = get_unsigned(*v, "constants.band_max_attempts");
  }
  if (const json* v = find(j, "averaging")) {
    if (!v->is_string()) throw config_error("constants.averaging", "expected a string");
    c.averaging = with_field("constants.averaging",
                             [&] { return averaging_mode_from_string(v->get<std::string>()); });
  }
}

template <class T, class F>
std::vector<T> parse_list(const json& j, const std::string& path, F&& item) {
  if (!j.is_array()) throw config_error(path, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::size_t as_size(const json& j, const std::string& path) {
  return static_cast<std::size_t>(get_unsigned(j, path));
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::active: return "active";
    case RunMode::passive: return "passive";
    case RunMode::baseline: return "baseline";
  }
  return "unknown";
}

RunMode run_mode_from_string(std::string_view name) {
  if (name == "active") return RunMode::active;
  if (name == "passive") return RunMode::passive;
  if (name == "baseline") return RunMode::baseline;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

std::vector<std::string> all_diag_suites() {
  return {"link_map", "band_mass", "noise_budget", "expansion", "regret_ledger"};
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw config_error("<root>", "expected a JSON object");
  reject_unknown(j, {"epsilon", "delta", "d", "s", "seeds", "master_seed", "marginal", "noise", "modes",
                     "constants", "metrics", "baseline", "workers", "sweep", "diag"},
                 "");
  RunConfig cfg;
  cfg.epsilon = as_double(require(j, "epsilon"), "epsilon");
  cfg.delta = as_double(require(j, "delta"), "delta");
  cfg.d = as_size(require(j, "d"), "d");
  cfg.s = as_size(require(j, "s"), "s");
  cfg.seeds = parse_list<std::uint64_t>(require(j, "seeds"), "seeds",
                                        [](const json& v, const std::string& p) { return get_unsigned(v, p); });

  if (const json* v = find(j, "master_seed")) cfg.master_seed = get_unsigned(*v, "master_seed");
  if (const json* v = find(j, "marginal")) {
    if (!v->is_string()) throw config_error("marginal", "expected a string");
    cfg.marginal = with_field("marginal", [&] { return marginal_kind_from_string(v->get<std::string>()); });
  }
  if (const json* v = find(j, "noise")) parse_noise(*v, cfg.noise);
  if (const json* v = find(j, "modes")) {
    cfg.modes = parse_list<RunMode>(*v, "modes", [](const json& m, const std::string& p) {
      if (!m.is_string()) throw config_error(p, "expected a string");
      return with_field(p, [&] { return run_mode_from_string(m.get<std::string>()); });
    });
  }
  if (const json* v = find(j, "constants")) parse_constants(*v, cfg.constants);
  if (const json* v = find(j, "metrics")) {
    if (!v->is_object()) throw config_error("metrics", "expected an object");
    reject_unknown(*v, {"n"}, "metrics.");
    if (const json* n = find(*v, "n")) cfg.metric_n = as_size(*n, "metrics.n");
  }
  if (const json* v = find(j, "baseline")) {
    if (!v->is_object()) throw config_error("baseline", "expected an object");
    reject_unknown(*v, {"m"}, "baseline.");
    if (const json* m = find(*v, "m")) cfg.baseline_m = as_size(*m, "baseline.m");
  }
  if (const json* v = find(j, "workers")) cfg.workers = as_size(*v, "workers");
  if (const json* v = find(j, "sweep")) {
    if (!v->is_object()) throw config_error("sweep", "expected an object");
    reject_unknown(*v, {"epsilon", "d", "s", "nu"}, "sweep.");
    if (const json* a = find(*v, "epsilon")) cfg.sweep.epsilon = parse_list<double>(*a, "sweep.epsilon", as_double);
    if (const json* a = find(*v, "d")) cfg.sweep.d = parse_list<std::size_t>(*a, "sweep.d", as_size);
    if (const json* a = find(*v, "s")) cfg.sweep.s = parse_list<std::size_t>(*a, "sweep.s", as_size);
    if (const json* a = find(*v, "nu")) cfg.sweep.nu = parse_list<double>(*a, "sweep.nu", as_double);
  }
  cfg.diag.suites = all_diag_suites();
  if (const json* v = find(j, "diag")) {
    if (!v->is_object()) throw config_error("diag", "expected an object");
    reject_unknown(*v, {"suites", "band_mass_c2", "n", "expansion_trials", "ledger_iterations"}, "diag.");
    if (const json* a = find(*v, "suites")) {
      cfg.diag.suites = parse_list<std::string>(*a, "diag.suites", [](const json& m, const std::string& p) {
        if (!m.is_string()) throw config_error(p, "expected a string");
        return m.get<std::string>();
      });
    }
    if (const json* c = find(*v, "band_mass_c2")) cfg.diag.band_mass_c2 = as_double(*c, "diag.band_mass_c2");
    if (const json* n = find(*v, "n")) cfg.diag.n = as_size(*n, "diag.n");
    if (const json* n = find(*v, "expansion_trials")) cfg.diag.expansion_trials = as_size(*n, "diag.expansion_trials");
    if (const json* n = find(*v, "ledger_iterations")) cfg.diag.ledger_iterations = as_size(*n, "diag.ledger_iterations");
  }
  validate(cfg);
  return cfg;
}

void validate(const RunConfig& cfg) {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  auto noise_rate = [](double v) { return v >= 0.0 && v < 0.5; };
  if (!open_unit(cfg.epsilon)) throw config_error("epsilon", "must lie in (0, 1)");
  if (!open_unit(cfg.delta)) throw config_error("delta", "must lie in (0, 1)");
  if (cfg.d < 1) throw config_error("d", "must be at least 1");
  if (cfg.s < 1 || cfg.s > cfg.d) throw config_error("s", "must satisfy 1 <= s <= d");
  if (cfg.seeds.empty()) throw config_error("seeds", "must list at least one seed");
  if (!noise_rate(cfg.noise.nu)) throw config_error("noise.nu", "must lie in [0, 0.5)");
  if (cfg.noise.kind == NoiseKind::region_flip && !(cfg.noise.region_lower <= cfg.noise.region_upper)) {
    throw config_error("noise.region", "lower must not exceed upper");
  }
  if (cfg.modes.empty()) throw config_error("modes", "must list at least one mode");
  try {
    cfg.constants.validate();
  } catch (const std::exception& e) {
    throw config_error("constants", e.what());
  }
  if (cfg.metric_n < 1) throw config_error("metrics.n", "must be at least 1");
  if (cfg.baseline_m < 1) throw config_error("baseline.m", "must be at least 1");
  if (cfg.workers < 1) throw config_error("workers", "must be at least 1");
  for (double e : cfg.sweep.epsilon) {
    if (!open_unit(e)) throw config_error("sweep.epsilon", "values must lie in (0, 1)");
  }
  for (std::size_t d : cfg.sweep.d) {
    if (d < 1) throw config_error("sweep.d", "values must be at least 1");
  }
  for (std::size_t s : cfg.sweep.s) {
    if (s < 1) throw config_error("sweep.s", "values must be at least 1");
  }
  const std::size_t max_s = cfg.sweep.s.empty() ? cfg.s : *std::max_element(cfg.sweep.s.begin(), cfg.sweep.s.end());
  const std::size_t min_d = cfg.sweep.d.empty() ? cfg.d : *std::min_element(cfg.sweep.d.begin(), cfg.sweep.d.end());
  if (max_s > min_d) throw config_error(cfg.sweep.s.empty() ? "sweep.d" : "sweep.s", "every sweep point needs s <= d");
  for (double nu : cfg.sweep.nu) {
    if (!noise_rate(nu)) throw config_error("sweep.nu", "values must lie in [0, 0.5)");
  }
  if (cfg.diag.suites.empty()) throw config_error("diag.suites", "must select at least one suite");
  const auto known = all_diag_suites();
  for (const std::string& name : cfg.diag.suites) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw config_error("diag.suites", "unknown suite '" + name + "'");
    }
  }
  if (!(cfg.diag.band_mass_c2 >= 0.0 && cfg.diag.band_mass_c2 <= 1.0)) {
    throw config_error("diag.band_mass_c2", "must lie in [0, 1]");
  }
  if (cfg.diag.n < 2) throw config_error("diag.n", "must be at least 2");
  if (cfg.diag.expansion_trials < 1) throw config_error("diag.expansion_trials", "must be at least 1");
  if (cfg.diag.ledger_iterations < 1) throw config_error("diag.ledger_iterations", "must be at least 1");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("<file>", "cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json canonical_json(const RunConfig& cfg) {
  json j;
  j["epsilon"] = cfg.epsilon;
  j["delta"] = cfg.delta;
  j["d"] = cfg.d;
  j["s"] = cfg.s;
  j["seeds"] = cfg.seeds;
  j["master_seed"] = cfg.master_seed;
  j["marginal"] = to_string(cfg.marginal);
  j["noise"] = {{"kind", to_string(cfg.noise.kind)},
                {"nu", cfg.noise.nu},
                {"region",
                 {{"direction", cfg.noise.region_direction == RegionDirection::truth ? "truth" : "random"},
                  {"lower", cfg.noise.region_lower},
                  {"upper", cfg.noise.region_upper}}}};
  json modes = json::array();
  for (RunMode m : cfg.modes) modes.push_back(to_string(m));
  j["modes"] = modes;
  const ConstantsConfig& c = cfg.constants;
  j["constants"] = {{"c_bar", c.c_bar},   {"c_b", c.c_b},       {"c_alpha", c.c_alpha},
                    {"c_T", c.c_T},       {"c_m", c.c_m},       {"zeta", c.zeta},
                    {"b_init", c.b_init}, {"s_tilde_factor", c.s_tilde_factor},
                    {"paper_faithful", c.paper_faithful},       {"averaging", to_string(c.averaging)},
                    {"band_max_attempts", c.band_max_attempts}};
  j["metrics"] = {{"n", cfg.metric_n}};
  j["baseline"] = {{"m", cfg.baseline_m}};
  j["sweep"] = {{"epsilon", cfg.sweep.epsilon}, {"d", cfg.sweep.d}, {"s", cfg.sweep.s}, {"nu", cfg.sweep.nu}};
  j["diag"] = {{"suites", cfg.diag.suites},
               {"band_mass_c2", cfg.diag.band_mass_c2},
               {"n", cfg.diag.n},
               {"expansion_trials", cfg.diag.expansion_trials},
               {"ledger_iterations", cfg.diag.ledger_iterations}};
  // workers only changes scheduling, never results
  return j;
}

std::string fingerprint(const RunConfig& cfg) {
  const std::string text = canonical_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace halfspace
