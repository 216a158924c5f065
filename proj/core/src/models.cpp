#include "nlqm/models.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "nlqm/energy.hpp"
#include "nlqm/error.hpp"
#include "nlqm/states.hpp"

namespace nlqm {

DensityExpr ModelSpec::density() const { return parse(density_text); }

namespace {

void require_nonnegative(std::string_view model, std::string_view key, int v) {
  if (v < 0) {
    throw ConfigError(std::string(model) + ": " + std::string(key) +
                      " must be a non-negative integer, got " +
                      std::to_string(v));
  }
}

// base^k as a product factor; empty when k == 0.
std::string power(std::string_view base, int k) {
  if (k == 0) return {};
  if (k == 1) return std::string(base);
  return std::string(base) + "^" + std::to_string(k);
}

std::string product(std::initializer_list<std::string> factors) {
  std::string out;
  for (const auto& f : factors) {
    if (f.empty()) continue;
    if (!out.empty()) out += '*';
    out += f;
  }
  return out.empty() ? "1" : out;
}

}  // namespace

ModelSpec linear_model() { return {"linear", "0", {}, {}, true}; }

ModelSpec toy(double a, double b) {
  return {"toy", "a*dS^2 + b*(dR/R)^2", {{"a", a}, {"b", b}}, {}, false};
}

ModelSpec staruszkiewicz(double c) {
  return {"staruszkiewicz", "0.5*c*ddS^2", {{"c", c}}, {}, false};
}

ModelSpec bbm(double c1, double c2) {
  if (!(c2 > 0.0)) throw ConfigError("bbm: c2 must be positive");
  return {"bbm", "c1*R^2*(ln(c2*R^2) - 1)", {{"c1", c1}, {"c2", c2}}, {}, false};
}

ModelSpec dg_restricted(double c1) {
  return {"dg_restricted", "c1*R^2*ddS", {{"c1", c1}}, {}, true};
}

ModelSpec phase_power(double c1, int n) {
  require_nonnegative("phase_power", "n", n);
  return {"phase_power", product({"c1", "R^2", power("ddS", n)}),
          {{"c1", c1}}, {{"n", n}}, true};
}

ModelSpec homogeneous_general(const HomogeneousParams& p) {
  for (auto [key, v] : {std::pair{"n1", p.n1}, std::pair{"n2", p.n2},
                        std::pair{"n3", p.n3}, std::pair{"n4", p.n4}}) {
    require_nonnegative("homogeneous_general", key, v);
  }
  const std::string phase = product({"a1", power("dS", 2 * p.n1)}) + " + " +
                            product({"a2", power("ddS", p.n2)}) + " + " +
                            product({"a3", power("dS", 2 * p.n3),
                                     power("ddS", p.n4)});
  return {"homogeneous_general",
          "(b0 + b1*(dR/R)^2)*(" + phase + ")*R^2",
          {{"b0", p.b0}, {"b1", p.b1}, {"a1", p.a1}, {"a2", p.a2}, {"a3", p.a3}},
          {{"n1", p.n1}, {"n2", p.n2}, {"n3", p.n3}, {"n4", p.n4}},
          true};
}

ModelSpec q1(double b1, int m) {
  require_nonnegative("q1", "m", m);
  return {"q1", product({"b1", power("(dR/R)", 2 * m), "R^2"}),
          {{"b1", b1}}, {{"m", m}}, m <= 1};
}

ModelSpec q2(double b2, int n) {
  require_nonnegative("q2", "n", n);
  return {"q2", product({"b2", power("(ddR/R)", n), "R^2"}),
          {{"b2", b2}}, {{"n", n}}, n == 0};
}

ModelSpec q3(double b3, int m, int n) {
  require_nonnegative("q3", "m", m);
  require_nonnegative("q3", "n", n);
  return {"q3",
          product({"b3", power("(dR/R)", 2 * m), power("(ddR/R)", n), "R^2"}),
          {{"b3", b3}}, {{"m", m}, {"n", n}}, n == 0 && m <= 1};
}

ModelSpec lstar(std::string_view p_text, const ParamBindings& p_params,
                double b1, double b2) {
  const DensityExpr p = parse(p_text);
  for (Slot s : {Slot::R, Slot::dR, Slot::ddR, Slot::x}) {
    if (p.references(s)) {
      throw ConfigError("lstar: the phase polynomial may not reference '" +
                        std::string(slot_name(s)) + "'");
    }
  }
  ParamBindings params = p_params;
  for (const auto& [key, v] : {std::pair{"b1", b1}, std::pair{"b2", b2}}) {
    if (!params.emplace(key, v).second) {
      throw ConfigError(std::string("lstar: the phase polynomial may not use '") +
                        key + "'");
    }
  }
  return {"lstar",
          "(" + std::string(p_text) + ")*(R^2 + b1*dR^2 + b2*ddR^2)",
          std::move(params), {}, b2 == 0.0};
}

ModelSpec cubic() { return {"cubic", "R^4", {}, {}, false}; }

ModelSpec nonhom_phase(double c, int k) {
  require_nonnegative("nonhom_phase", "k", k);
  return {"nonhom_phase", product({"c", power("S", k), "R^2"}),
          {{"c", c}}, {{"k", k}}, k == 0};
}

ModelSpec nonhom_amp(double c, int l) {
  require_nonnegative("nonhom_amp", "l", l);
  return {"nonhom_amp", product({"c", power("R", l), "R^2"}),
          {{"c", c}}, {{"l", l}}, l == 0};
}

ModelSpec custom_model(std::string name, std::string density_text,
                       ParamBindings params) {
  const DensityExpr expr = parse(density_text);
  for (const auto& p : expr.params()) {
    if (!params.contains(p)) {
      throw ConfigError("model '" + name + "': parameter '" + p + "' is unbound");
    }
  }
  if (expr.references(Slot::x)) {
    throw ConfigError("model '" + name +
                      "': densities may not depend on x explicitly");
  }
  return {std::move(name), std::move(density_text), std::move(params), {}, false};
}

std::vector<ModelSpec> catalog() {
  return {linear_model(), toy(),          staruszkiewicz(),
          bbm(),          dg_restricted(), phase_power(),
          homogeneous_general(), q1(),    q2(),
          q3(),           lstar(),        cubic(),
          nonhom_phase(), nonhom_amp()};
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> names;
  for (const auto& m : catalog()) names.push_back(m.name);
  return names;
}

namespace {

// Reads named overrides against a default table and rejects leftovers.
class Overrides {
 public:
  Overrides(std::string_view model, const ParamBindings& values)
      : model_(model), values_(values) {}

  double real(std::string_view key, double fallback) {
    used_.insert(std::string(key));
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  int integer(std::string_view key, int fallback) {
    const double v = real(key, fallback);
    if (v != std::floor(v) || std::abs(v) > std::numeric_limits<int>::max()) {
      throw ConfigError(model_ + ": " + std::string(key) +
                        " must be an integer");
    }
    return static_cast<int>(v);
  }

  void finish() const {
    for (const auto& [key, v] : values_) {
      if (!used_.contains(key)) {
        throw ConfigError(model_ + ": unknown parameter '" + key + "'");
      }
    }
  }

 private:
  std::string model_;
  const ParamBindings& values_;
  std::set<std::string, std::less<>> used_;
};

}  // namespace

ModelSpec make_model(std::string_view name, const ParamBindings& overrides,
                     std::optional<std::string> p_text) {
  Overrides o(name, overrides);
  ModelSpec m;
  if (p_text && name != "lstar") {
    throw ConfigError(std::string(name) + ": only lstar takes a phase polynomial");
  }
  if (name == "linear") {
    m = linear_model();
  } else if (name == "toy") {
    m = toy(o.real("a", 0.1), o.real("b", 0.05));
  } else if (name == "staruszkiewicz") {
    m = staruszkiewicz(o.real("c", 0.2));
  } else if (name == "bbm") {
    m = bbm(o.real("c1", 0.3), o.real("c2", 1.0));
  } else if (name == "dg_restricted") {
    m = dg_restricted(o.real("c1", 0.2));
  } else if (name == "phase_power") {
    m = phase_power(o.real("c1", 0.1), o.integer("n", 2));
  } else if (name == "homogeneous_general") {
    HomogeneousParams p;
    p.b0 = o.real("b0", p.b0);
    p.b1 = o.real("b1", p.b1);
    p.a1 = o.real("a1", p.a1);
    p.a2 = o.real("a2", p.a2);
    p.a3 = o.real("a3", p.a3);
    p.n1 = o.integer("n1", p.n1);
    p.n2 = o.integer("n2", p.n2);
    p.n3 = o.integer("n3", p.n3);
    p.n4 = o.integer("n4", p.n4);
    m = homogeneous_general(p);
  } else if (name == "q1") {
    m = q1(o.real("b1", 0.1), o.integer("m", 1));
  } else if (name == "q2") {
    m = q2(o.real("b2", 0.1), o.integer("n", 2));
  } else if (name == "q3") {
    m = q3(o.real("b3", 0.1), o.integer("m", 1), o.integer("n", 1));
  } else if (name == "lstar") {
    const std::string text = p_text.value_or("a1*dS^2 + a2*ddS");
    ParamBindings p_params;
    for (const auto& key : parse(text).params()) {
      const double fallback = key == "a1" || key == "a2"
                                  ? 0.1
                                  : std::numeric_limits<double>::quiet_NaN();
      const double v = o.real(key, fallback);
      if (std::isnan(v)) {
        throw ConfigError("lstar: phase polynomial parameter '" + key +
                          "' needs a value");
      }
      p_params[key] = v;
    }
    m = lstar(text, p_params, o.real("b1", 0.1), o.real("b2", 0.0));
  } else if (name == "cubic") {
    m = cubic();
  } else if (name == "nonhom_phase") {
    m = nonhom_phase(o.real("c", 0.1), o.integer("k", 2));
  } else if (name == "nonhom_amp") {
    m = nonhom_amp(o.real("c", 0.1), o.integer("l", 1));
  } else {
    throw ConfigError("unknown model '" + std::string(name) + "'");
  }
  o.finish();
  return m;
}

ValidationReport validate(const ModelSpec& model) {
  ValidationReport r;
  r.model = model.name;
  try {
    const DensityExpr expr = model.density();
    const Grid grid = default_grid();
    const MadelungField state = reference_gaussian(grid);
    (void)evaluate(expr, model.params, state);
    r.homogeneity_defect = homogeneity_defect(model, state).max_defect;
    r.ok = true;
  } catch (const Error& e) {
    r.message = model.name + ": " + e.what();
    return r;
  }
  r.measured_homogeneous = r.homogeneity_defect <= kHomogeneityTol;
  r.flag_matches = r.measured_homogeneous == model.homogeneous_class;
  if (!r.flag_matches) {
    r.message = model.homogeneous_class
                    ? "flagged homogeneous but the measured defect is nonzero"
                    : "not flagged homogeneous, measured defect is zero";
  }
  return r;
}

}  // namespace nlqm
