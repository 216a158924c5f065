#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlqm/dsl.hpp"

namespace nlqm {

/// A named nonlinear Lagrangian density L_NL with bound parameters.
///
/// Integer shape parameters (exponents) are expanded into the density text
/// when the model is built; they are kept in `shape` for display only.
struct ModelSpec {
  std::string name;
  std::string density_text;
  ParamBindings params;
  std::map<std::string, int, std::less<>> shape;
  bool homogeneous_class = false;

  /// Parses density_text. Throws ParseError.
  DensityExpr density() const;
};

ModelSpec linear_model();
ModelSpec toy(double a = 0.1, double b = 0.05);
ModelSpec staruszkiewicz(double c = 0.2);
ModelSpec bbm(double c1 = 0.3, double c2 = 1.0);
ModelSpec dg_restricted(double c1 = 0.2);
ModelSpec phase_power(double c1 = 0.1, int n = 2);

struct HomogeneousParams {
  double b0 = 1.0, b1 = 0.1;
  double a1 = 0.1, a2 = 0.1, a3 = 0.05;
  int n1 = 1, n2 = 2, n3 = 1, n4 = 1;
};
ModelSpec homogeneous_general(const HomogeneousParams& p = {});

ModelSpec q1(double b1 = 0.1, int m = 1);
ModelSpec q2(double b2 = 0.1, int n = 2);
ModelSpec q3(double b3 = 0.1, int m = 1, int n = 1);

/// (p)*(R^2 + b1*dR^2 + b2*ddR^2) for a phase polynomial p(S) whose own
/// parameters are given in p_params.
ModelSpec lstar(std::string_view p_text = "a1*dS^2 + a2*ddS",
                const ParamBindings& p_params = {{"a1", 0.1}, {"a2", 0.1}},
                double b1 = 0.1, double b2 = 0.0);

ModelSpec cubic();
ModelSpec nonhom_phase(double c = 0.1, int k = 2);
ModelSpec nonhom_amp(double c = 0.1, int l = 1);

/// A user-supplied density. Checks that it parses and that every parameter
/// it references is bound.
ModelSpec custom_model(std::string name, std::string density_text,
                       ParamBindings params);

/// All fourteen built-in models at their default parameters.
std::vector<ModelSpec> catalog();

std::vector<std::string> catalog_names();

/// Builds a catalog model by name with parameter overrides. Integer shape
/// parameters (n, m, k, l, n1..n4) must carry integral values. `p_text`
/// replaces the phase polynomial of lstar. Throws ConfigError on unknown
/// names, unknown parameters or invalid domains.
ModelSpec make_model(std::string_view name, const ParamBindings& overrides = {},
                     std::optional<std::string> p_text = std::nullopt);

struct ValidationReport {
  std::string model;
  bool ok = false;             // parsed, bound, evaluated without error
  double homogeneity_defect = 0.0;
  bool measured_homogeneous = false;  // defect <= kHomogeneityTol
  bool flag_matches = false;
  std::string message;
};

inline constexpr double kHomogeneityTol = 1e-10;

/// Parses, binds and evaluates the model on the reference Gaussian on the
/// default grid, and compares the measured homogeneity with the flag.
/// Never throws for model errors; they are reported in `message`.
ValidationReport validate(const ModelSpec& model);

}  // namespace nlqm
