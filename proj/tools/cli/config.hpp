#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "nlqm/evolve.hpp"
#include "nlqm/grid.hpp"
#include "nlqm/models.hpp"

namespace nlqm::cli {

/// Raw key=value pairs by section; keys before the first header live in "".
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  void set(const std::string& section, const std::string& key,
           std::string value);
};

/// Parses the flat section syntax:
///
///   # comment
///   mass = 1
///   [model]
///   name = toy
///   a = 0.1   # trailing comment
///
/// Values may be double-quoted; '#' inside quotes is kept. Throws ConfigError
/// naming `source` and the line.
ConfigFile parse_config(std::istream& in, std::string_view source = "config");

/// Applies "section.key=value" or "key=value". A bare key is a global setting
/// if it is one of potential, mass, out, format; otherwise a model parameter.
void apply_override(ConfigFile& config, std::string_view assignment);

/// A fully resolved run description.
struct RunConfig {
  std::string model_name = "linear";
  std::optional<std::string> density_text;  // inline model
  std::optional<std::string> p_text;        // lstar phase polynomial
  ParamBindings model_params;

  std::string state = "reference";
  ParamBindings state_params;
  std::optional<std::string> state_path;

  double x_min = -16.0;
  double x_max = 16.0;
  std::size_t n = 2049;

  std::string potential = "0.5*x^2";
  double mass = 1.0;

  EvolutionConfig evolution;
  std::optional<double> t_end;

  std::string out;
  std::string format = "csv";

  ModelSpec build_model() const;
  Grid build_grid() const;
  /// The configured state on `grid`; a state file supplies its own grid.
  MadelungField build_state(const Grid& grid) const;
  /// Time stamp of the state (coherent t, otherwise 0).
  double state_time() const;
  EvolutionConfig build_evolution() const;
};

/// Validates section and key names and converts values. Throws ConfigError.
RunConfig resolve(const ConfigFile& config);

}  // namespace nlqm::cli
