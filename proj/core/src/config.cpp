#include "thermvisc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "thermvisc/errors.hpp"
#include "thermvisc/format.hpp"

namespace thermvisc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("expected a finite number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& v) {
  long long x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError("expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::string one_of(const std::string& v, std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return v;
    list += (list.empty() ? "" : ", ") + std::string(a);
  }
  throw ConfigError("value '" + v + "' not one of: " + list);
}

using Setter = std::function<void(SimConfig&, const std::string&)>;
using Getter = std::function<std::string(const SimConfig&)>;
struct Key {
  Setter set;
  Getter get;
};

std::string b2s(bool b) { return b ? "true" : "false"; }

const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Key>>>>& schema() {
  static const auto table = [] {
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, Key>>>> t;
    t.push_back({"grid",
                 {{"d", {[](SimConfig& c, const std::string& v) { c.grid.d = static_cast<int>(to_int(v)); },
                         [](const SimConfig& c) { return std::to_string(c.grid.d); }}},
                  {"n", {[](SimConfig& c, const std::string& v) { c.grid.n = static_cast<int>(to_int(v)); },
                         [](const SimConfig& c) { return std::to_string(c.grid.n); }}},
                  {"L", {[](SimConfig& c, const std::string& v) { c.grid.L = to_double(v); },
                         [](const SimConfig& c) { return format_double(c.grid.L); }}}}});
    t.push_back({"material",
                 {{"name", {[](SimConfig& c, const std::string& v) { c.material = one_of(v, {"reference", "saturating"}); },
                            [](const SimConfig& c) { return c.material; }}},
                  {"g_inf", {[](SimConfig& c, const std::string& v) { c.g_inf = to_double(v); },
                             [](const SimConfig& c) { return format_double(c.g_inf); }}}}});
    std::vector<std::pair<std::string, Key>> eps;
    const std::pair<const char*, double EpsilonSet::*> eps_keys[] = {
        {"eps1", &EpsilonSet::eps1}, {"eps2", &EpsilonSet::eps2}, {"eps3", &EpsilonSet::eps3},
        {"eps4", &EpsilonSet::eps4}, {"eps5", &EpsilonSet::eps5}, {"eps6", &EpsilonSet::eps6},
        {"eps7", &EpsilonSet::eps7}, {"lambda", &EpsilonSet::lambda}};
    for (const auto& [name, member] : eps_keys) {
      auto mp = member;
      eps.push_back({name, {[mp](SimConfig& c, const std::string& v) { c.eps.*mp = to_double(v); },
                            [mp](const SimConfig& c) { return format_double(c.eps.*mp); }}});
    }
    eps.push_back({"eps7_diffusion", {[](SimConfig& c, const std::string& v) { c.eps.eps7_diffusion = to_bool(v); },
                                      [](const SimConfig& c) { return b2s(c.eps.eps7_diffusion); }}});
    t.push_back({"epsilons", eps});
    t.push_back(
        {"time",
         {{"dt", {[](SimConfig& c, const std::string& v) { c.dt = v == "auto" ? 0.0 : to_double(v); },
                  [](const SimConfig& c) { return c.dt == 0.0 ? std::string("auto") : format_double(c.dt); }}},
          {"t_end", {[](SimConfig& c, const std::string& v) { c.t_end = to_double(v); },
                     [](const SimConfig& c) { return format_double(c.t_end); }}},
          {"stepper", {[](SimConfig& c, const std::string& v) {
                         c.stepper = one_of(v, {"explicit_rk2", "imex"}) == "imex" ? Stepper::imex : Stepper::explicit_rk2;
                       },
                       [](const SimConfig& c) { return std::string(stepper_name(c.stepper)); }}},
          {"cfl_safety", {[](SimConfig& c, const std::string& v) { c.cfl_safety = to_double(v); },
                          [](const SimConfig& c) { return format_double(c.cfl_safety); }}},
          {"twin_B", {[](SimConfig& c, const std::string& v) { c.twin_B = to_bool(v); },
                      [](const SimConfig& c) { return b2s(c.twin_B); }}},
          {"transport", {[](SimConfig& c, const std::string& v) {
                           c.transport = one_of(v, {"upwind", "centered"}) == "upwind" ? TransportScheme::upwind
                                                                                      : TransportScheme::centered;
                         },
                         [](const SimConfig& c) { return std::string(transport_name(c.transport)); }}}}});
    t.push_back({"output",
                 {{"snapshot_every", {[](SimConfig& c, const std::string& v) { c.snapshot_every = static_cast<int>(to_int(v)); },
                                      [](const SimConfig& c) { return std::to_string(c.snapshot_every); }}},
                  {"csv_every", {[](SimConfig& c, const std::string& v) { c.csv_every = static_cast<int>(to_int(v)); },
                                 [](const SimConfig& c) { return std::to_string(c.csv_every); }}}}});
    auto str_key = [](std::string InitialSpec::*mp, std::initializer_list<const char*> allowed) {
      std::vector<std::string> al(allowed.begin(), allowed.end());
      return Key{[mp, al](SimConfig& c, const std::string& v) {
                   for (const auto& a : al)
                     if (v == a) {
                       c.initial.*mp = v;
                       return;
                     }
                   std::string list;
                   for (const auto& a : al) list += (list.empty() ? "" : ", ") + a;
                   throw ConfigError("value '" + v + "' not one of: " + list);
                 },
                 [mp](const SimConfig& c) { return c.initial.*mp; }};
    };
    auto num_key = [](double InitialSpec::*mp) {
      return Key{[mp](SimConfig& c, const std::string& v) { c.initial.*mp = to_double(v); },
                 [mp](const SimConfig& c) { return format_double(c.initial.*mp); }};
    };
    t.push_back({"initial",
                 {{"velocity", str_key(&InitialSpec::velocity, {"zero", "taylor_green", "random"})},
                  {"velocity_amplitude", num_key(&InitialSpec::velocity_amplitude)},
                  {"theta", str_key(&InitialSpec::theta, {"uniform", "bump", "cold_spot"})},
                  {"theta_base", num_key(&InitialSpec::theta_base)},
                  {"theta_amplitude", num_key(&InitialSpec::theta_amplitude)},
                  {"theta_patch", num_key(&InitialSpec::theta_patch)},
                  {"deformation",
                   str_key(&InitialSpec::deformation, {"identity", "uniform", "det_patch", "stretch_patch", "random"})},
                  {"deformation_scale", num_key(&InitialSpec::deformation_scale)},
                  {"deformation_patch_det", num_key(&InitialSpec::deformation_patch_det)},
                  {"seed", {[](SimConfig& c, const std::string& v) {
                              const long long s = to_int(v);
                              if (s < 0) throw ConfigError("seed must be nonnegative");
                              c.seed = static_cast<std::uint64_t>(s);
                            },
                            [](const SimConfig& c) { return std::to_string(c.seed); }}}}});
    return t;
  }();
  return table;
}

const Key* find_key(const std::string& section, const std::string& key, bool& section_known) {
  section_known = false;
  for (const auto& [sec, keys] : schema()) {
    if (sec != section) continue;
    section_known = true;
    for (const auto& [k, def] : keys)
      if (k == key) return &def;
  }
  return nullptr;
}

}  // namespace

const char* stepper_name(Stepper s) { return s == Stepper::imex ? "imex" : "explicit_rk2"; }
const char* transport_name(TransportScheme s) { return s == TransportScheme::upwind ? "upwind" : "centered"; }

void SimConfig::validate() const {
  if (grid.d != 2 && grid.d != 3) throw ConfigError("grid.d must be 2 or 3");
  if (grid.n < 8 || grid.n % 2 != 0) throw ConfigError("grid.n must be even and >= 8");
  if (!(grid.L > 0.0)) throw ConfigError("grid.L must be positive");
  if (!(g_inf > 0.0)) throw ConfigError("material.g_inf must be positive");
  eps.validate();
  if (eps.eps7 > 0.0 && eps.eps7 < grid.L / grid.n) throw ConfigError("eps7 must be at least the grid spacing");
  if (!(dt >= 0.0)) throw ConfigError("time.dt must be >= 0 (0 or auto selects the CFL step)");
  if (!(t_end >= 0.0)) throw ConfigError("time.t_end must be >= 0");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ConfigError("time.cfl_safety must lie in (0,1]");
  if (snapshot_every < 0) throw ConfigError("output.snapshot_every must be >= 0");
  if (csv_every < 1) throw ConfigError("output.csv_every must be >= 1");
  if (!(initial.theta_base > 0.0)) throw ConfigError("initial.theta_base must be positive");
  if (!(initial.theta_patch >= 0.0)) throw ConfigError("initial.theta_patch must be >= 0");
  if (!(initial.deformation_patch_det >= 0.0)) throw ConfigError("initial.deformation_patch_det must be >= 0");
}

void set_config_value(SimConfig& cfg, const std::string& section, const std::string& key, const std::string& value) {
  bool known = false;
  const Key* k = find_key(section, key, known);
  if (!known) throw ConfigError("unknown section [" + section + "]");
  if (!k) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  k->set(cfg, value);
}

SimConfig parse_config_text(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::set<std::pair<std::string, std::string>> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", lineno);
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      find_key(section, "", known);
      if (!known) throw ConfigError("unknown section [" + section + "]", lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + key + "' outside any section", lineno);
    if (!seen.insert({section, key}).second) throw ConfigError("duplicate key '" + key + "'", lineno);
    try {
      set_config_value(cfg, section, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), lineno);
    }
  }
  cfg.validate();
  return cfg;
}

SimConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string to_ini(const SimConfig& cfg) {
  std::string out;
  for (const auto& [sec, keys] : schema()) {
    out += "[" + sec + "]\n";
    for (const auto& [k, def] : keys) out += k + " = " + def.get(cfg) + "\n";
    out += "\n";
  }
  return out;
}

}  // namespace thermvisc
