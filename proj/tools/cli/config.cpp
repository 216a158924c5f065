#include "config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>

#include "nlqm/io.hpp"
#include "nlqm/states.hpp"

namespace nlqm::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a trailing "# comment": a '#' outside quotes that starts the line or
// follows whitespace. Densities never contain '#', so this is unambiguous.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) {
      return s.substr(0, i);
    }
  }
  return s;
}

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  const double v = parse_double(value);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw ConfigError(key + " must be a non-negative integer, got '" + value +
                      "'");
  }
  return static_cast<std::size_t>(v);
}

double parse_value(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

constexpr std::array kGlobalKeys{"potential", "mass", "out", "format"};

bool is_global_key(std::string_view key) {
  return std::ranges::find(kGlobalKeys, key) != kGlobalKeys.end();
}

void reject_unknown(const std::string& section,
                    const std::map<std::string, std::string>& keys,
                    const std::set<std::string, std::less<>>& allowed) {
  for (const auto& [key, value] : keys) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }
}

void require_keys(std::string_view kind, const ParamBindings& params,
                  const std::set<std::string, std::less<>>& allowed) {
  for (const auto& [key, value] : params) {
    if (!allowed.contains(key)) {
      throw ConfigError("state '" + std::string(kind) +
                        "' has no parameter '" + key + "'");
    }
  }
}

double get(const ParamBindings& p, std::string_view key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

}  // namespace

void ConfigFile::set(const std::string& section, const std::string& key,
                     std::string value) {
  sections[section][key] = std::move(value);
}

ConfigFile parse_config(std::istream& in, std::string_view source) {
  ConfigFile config;
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError(std::string(source) + ":" + std::to_string(lineno) +
                      ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view text = trim(strip_comment(line));
    if (text.empty() || text.front() == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail("unterminated section header");
      section = std::string(trim(text.substr(1, text.size() - 2)));
      if (section.empty()) fail("empty section name");
      config.sections[section];
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    const std::string key(trim(text.substr(0, eq)));
    if (key.empty()) fail("missing key");
    config.set(section, key, unquote(trim(text.substr(eq + 1))));
  }
  return config;
}

void apply_override(ConfigFile& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("--set expects key=value, got '" +
                      std::string(assignment) + "'");
  }
  const std::string_view lhs = trim(assignment.substr(0, eq));
  const std::string value = unquote(trim(assignment.substr(eq + 1)));
  const auto dot = lhs.find('.');
  if (dot != std::string_view::npos) {
    config.set(std::string(lhs.substr(0, dot)),
               std::string(lhs.substr(dot + 1)), value);
  } else if (is_global_key(lhs)) {
    config.set("", std::string(lhs), value);
  } else if (!lhs.empty()) {
    config.set("model", std::string(lhs), value);
  } else {
    throw ConfigError("--set has an empty key");
  }
}

RunConfig resolve(const ConfigFile& config) {
  RunConfig rc;
  for (const auto& [section, keys] : config.sections) {
    if (section.empty()) {
      reject_unknown("global", keys, {"potential", "mass", "out", "format"});
      for (const auto& [key, value] : keys) {
        if (key == "potential") rc.potential = value;
        if (key == "mass") rc.mass = parse_value(key, value);
        if (key == "out") rc.out = value;
        if (key == "format") rc.format = value;
      }
    } else if (section == "model") {
      for (const auto& [key, value] : keys) {
        if (key == "name") {
          rc.model_name = value;
        } else if (key == "density") {
          rc.density_text = value;
        } else if (key == "p_text") {
          rc.p_text = value;
        } else {
          rc.model_params[key] = parse_value(key, value);
        }
      }
    } else if (section == "state") {
      for (const auto& [key, value] : keys) {
        if (key == "name") {
          rc.state = value;
        } else if (key == "path") {
          rc.state_path = value;
        } else {
          rc.state_params[key] = parse_value(key, value);
        }
      }
    } else if (section == "grid") {
      reject_unknown(section, keys, {"x_min", "x_max", "n"});
      for (const auto& [key, value] : keys) {
        if (key == "x_min") rc.x_min = parse_value(key, value);
        if (key == "x_max") rc.x_max = parse_value(key, value);
        if (key == "n") rc.n = parse_count(key, value);
      }
    } else if (section == "evolve") {
      reject_unknown(section, keys,
                     {"dt", "n_steps", "t_end", "sample_every", "rho_floor",
                      "continuity"});
      EvolutionConfig& e = rc.evolution;
      for (const auto& [key, value] : keys) {
        if (key == "dt") e.dt = parse_value(key, value);
        if (key == "n_steps") e.n_steps = parse_count(key, value);
        if (key == "t_end") rc.t_end = parse_value(key, value);
        if (key == "sample_every") e.sample_every = parse_count(key, value);
        if (key == "rho_floor") e.rho_floor = parse_value(key, value);
        if (key == "continuity") {
          if (value == "hamiltonian") {
            e.continuity = ContinuityConvention::hamiltonian;
          } else if (value == "as_printed") {
            e.continuity = ContinuityConvention::as_printed;
          } else {
            throw ConfigError("continuity must be hamiltonian or as_printed");
          }
        }
      }
    } else {
      throw ConfigError("unknown section [" + section + "]");
    }
  }
  if (rc.format != "csv" && rc.format != "json") {
    throw ConfigError("format must be csv or json, got '" + rc.format + "'");
  }
  if (rc.state_path) {
    const auto& st = config.sections.at("state");
    if (st.contains("name") && rc.state != "file") {
      throw ConfigError("a state path only applies to state 'file'");
    }
    rc.state = "file";
  }
  return rc;
}

ModelSpec RunConfig::build_model() const {
  if (density_text) {
    const std::string name =
        model_name == "linear" ? std::string("custom") : model_name;
    return custom_model(name, *density_text, model_params);
  }
  return make_model(model_name, model_params, p_text);
}

Grid RunConfig::build_grid() const { return make_grid(x_min, x_max, n); }

MadelungField RunConfig::build_state(const Grid& grid) const {
  const ParamBindings& p = state_params;
  if (state == "reference") {
    require_keys(state, p, {});
    return reference_gaussian(grid);
  }
  if (state == "gaussian") {
    require_keys(state, p, {"sigma", "x_c", "k", "kappa"});
    GaussianParams g;
    g.sigma = get(p, "sigma", g.sigma);
    g.x_c = get(p, "x_c", g.x_c);
    g.k = get(p, "k", g.k);
    g.kappa = get(p, "kappa", g.kappa);
    return gaussian(g, grid);
  }
  if (state == "coherent") {
    require_keys(state, p, {"alpha", "delta", "omega", "t"});
    CoherentParams c;
    c.alpha_mod = get(p, "alpha", c.alpha_mod);
    c.delta = get(p, "delta", c.delta);
    c.omega = get(p, "omega", c.omega);
    c.t = get(p, "t", c.t);
    c.mass = mass;
    return coherent(c, grid);
  }
  if (state == "sho_ground") {
    require_keys(state, p, {"omega"});
    return sho_ground(get(p, "omega", 1.0), mass, grid);
  }
  if (state == "file") {
    require_keys(state, p, {});
    if (!state_path) throw ConfigError("state 'file' needs a path");
    std::ifstream in(*state_path);
    if (!in) throw ConfigError("cannot open state file '" + *state_path + "'");
    return read_state(in);
  }
  throw ConfigError("unknown state '" + state +
                    "' (expected reference, gaussian, coherent, sho_ground or "
                    "file)");
}

double RunConfig::state_time() const {
  return state == "coherent" ? get(state_params, "t", 0.0) : 0.0;
}

EvolutionConfig RunConfig::build_evolution() const {
  EvolutionConfig e = evolution;
  e.potential = potential;
  e.mass = mass;
  if (t_end) {
    if (!(e.dt > 0.0) || !(*t_end >= 0.0)) {
      throw ConfigError("t_end needs a positive dt and a non-negative t_end");
    }
    e.n_steps = static_cast<std::size_t>(std::llround(*t_end / e.dt));
  }
  return e;
}

}  // namespace nlqm::cli
