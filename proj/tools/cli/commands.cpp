#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include <json.hpp>

#include "app.hpp"
#include "nlqm/energy.hpp"
#include "nlqm/io.hpp"
#include "nlqm/variational.hpp"

namespace nlqm::cli {

namespace {

using json = nlohmann::ordered_json;

struct Setup {
  ModelSpec model;
  MadelungField state;
  ScalarField V;
};

Setup setup(const RunConfig& rc) {
  ModelSpec model = rc.build_model();
  MadelungField state = rc.build_state(rc.build_grid());
  ScalarField V = evaluate_potential(rc.potential, state.grid());
  return {std::move(model), std::move(state), std::move(V)};
}

json to_json(std::span<const double> v) { return json(std::vector(v.begin(), v.end())); }

std::string csv_quote(std::string_view s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string param_list(const ModelSpec& m) {
  std::string out;
  auto add = [&](const std::string& key, const std::string& value) {
    if (!out.empty()) out += ';';
    out += key + '=' + value;
  };
  for (const auto& [k, v] : m.params) add(k, format_shortest(v));
  for (const auto& [k, v] : m.shape) add(k, std::to_string(v));
  return out;
}

struct CheckResult {
  std::string name;
  double measured;
  double threshold;
  bool pass() const { return measured <= threshold; }
};

double gateaux_mismatch(const ModelSpec& model, const MadelungField& state) {
  const DensityExpr expr = model.density();
  const auto probes = probe_nodes(state);
  double worst = 0.0;
  for (const Field f : {Field::R, Field::S}) {
    const ScalarField el = el_derivative(model, f, state);
    for (const std::size_t j : probes) {
      const double g = gateaux(expr, model.params, f, state, j, kGateauxEps);
      worst = std::max(worst, std::abs(el[j] - g) / (1.0 + std::abs(el[j])));
    }
  }
  return worst;
}

}  // namespace

int cmd_energy(const RunConfig& rc, std::ostream& out) {
  const Setup s = setup(rc);
  const EnergyReport r = energy_report(s.model, s.state, s.V, rc.mass);
  const double t = rc.state_time();
  if (rc.format == "json") {
    json j;
    j["model"] = s.model.name;
    j["t"] = t;
    j["norm"] = r.norm;
    j["e_qm_re"] = r.e_qm_re;
    j["e_qm_im"] = r.e_qm_im;
    j["e_ft"] = r.e_ft;
    j["gap_re"] = r.gap_re;
    j["gap_im"] = r.gap_im;
    j["herm_defect"] = r.hermiticity_defect;
    out << j.dump(2) << '\n';
  } else {
    out << kEnergyCsvHeader << '\n';
    write_energy_row(out, s.model.name, t, r);
  }
  return kSuccess;
}

int cmd_derive(const RunConfig& rc, std::ostream& out) {
  const Setup s = setup(rc);
  const ScalarField dLdR = el_derivative(s.model, Field::R, s.state);
  const ScalarField dLdS = el_derivative(s.model, Field::S, s.state);
  const HamiltonianField h = h_nl(s.model, s.state, rc.evolution.rho_floor);
  const Grid& g = s.state.grid();
  if (rc.format == "json") {
    json j;
    j["model"] = s.model.name;
    j["x"] = g.nodes();
    j["dLdR"] = to_json(dLdR.values());
    j["dLdS"] = to_json(dLdS.values());
    j["re_hnl"] = to_json(h.re.values());
    j["im_hnl"] = to_json(h.im.values());
    out << j.dump() << '\n';
  } else {
    write_columns(out, g, {"dLdR", "dLdS", "re_hnl", "im_hnl"},
                  {dLdR.values(), dLdS.values(), h.re.values(), h.im.values()});
  }
  return kSuccess;
}

int cmd_check(const RunConfig& rc, std::ostream& out) {
  const Setup s = setup(rc);
  const std::vector<CheckResult> checks{
      {"homogeneity", homogeneity_defect(s.model, s.state).max_defect,
       kHomogeneityTol},
      {"hermiticity", std::abs(hermiticity_defect(s.model, s.state, rc.mass)),
       kHermiticityTol},
      {"gateaux_vs_el", gateaux_mismatch(s.model, s.state), kGateauxTol},
  };
  const bool all = std::ranges::all_of(checks, &CheckResult::pass);
  if (rc.format == "json") {
    json j;
    j["model"] = s.model.name;
    j["checks"] = json::array();
    for (const CheckResult& c : checks) {
      j["checks"].push_back({{"name", c.name},
                             {"measured", c.measured},
                             {"threshold", c.threshold},
                             {"pass", c.pass()}});
    }
    j["pass"] = all;
    out << j.dump(2) << '\n';
  } else {
    out << "check,measured,threshold,result\n";
    for (const CheckResult& c : checks) {
      out << c.name << ',' << format_double(c.measured) << ','
          << format_shortest(c.threshold) << ','
          << (c.pass() ? "pass" : "fail") << '\n';
    }
  }
  return all ? kSuccess : kCheckFailed;
}

namespace {

void write_series(const RunConfig& rc, const std::string& model,
                  const TimeSeries& series, std::ostream& out) {
  if (rc.format == "json") {
    json j;
    j["model"] = model;
    j["rows"] = json::array();
    for (const TimeSample& r : series.rows) {
      j["rows"].push_back({{"t", r.t},
                           {"norm", r.norm},
                           {"e_qm_re", r.e_qm_re},
                           {"e_qm_im", r.e_qm_im},
                           {"e_ft", r.e_ft},
                           {"gap_re", r.gap_re},
                           {"gap_im", r.gap_im}});
    }
    out << j.dump(2) << '\n';
  } else {
    write_csv(out, series);
  }
}

}  // namespace

int cmd_evolve(const RunConfig& rc, std::ostream& out) {
  const ModelSpec model = rc.build_model();
  const MadelungField state = rc.build_state(rc.build_grid());
  const Evolver evolver(model, state.grid(), rc.build_evolution());
  try {
    write_series(rc, model.name, evolver.run(state), out);
  } catch (const EvolutionAborted& e) {
    write_series(rc, model.name, e.partial(), out);
    throw;
  }
  return kSuccess;
}

int cmd_scan_domain(const RunConfig& rc, const std::vector<double>& lengths,
                    std::ostream& out) {
  if (lengths.empty()) throw ConfigError("scan-domain needs at least one length");
  if (rc.state == "file") {
    throw ConfigError("scan-domain rebuilds the state per length; use a named state");
  }
  const ModelSpec model = rc.build_model();
  const Grid base = rc.build_grid();
  const double dx = base.dx();
  const double centre = 0.5 * (rc.x_min + rc.x_max);

  std::vector<Grid> grids;
  for (const double L : lengths) {
    if (!(L > 0.0)) throw ConfigError("domain lengths must be positive");
    const double cells = L / dx;
    const auto n = static_cast<std::size_t>(std::llround(cells)) + 1;
    if (std::abs(cells - static_cast<double>(n - 1)) > 1e-9 * cells ||
        n % 2 == 0) {
      throw ConfigError("length " + format_shortest(L) +
                        " is not an even multiple of dx = " +
                        format_shortest(dx));
    }
    grids.push_back(make_grid(centre - 0.5 * L, centre + 0.5 * L, n));
  }

  std::vector<std::future<ComplexEnergy>> gaps;
  for (const Grid& g : grids) {
    gaps.push_back(std::async(std::launch::async, [&rc, &model, g] {
      const MadelungField state = rc.build_state(g);
      const ScalarField V = evaluate_potential(rc.potential, g);
      return ambiguity_gap(model, state, V, rc.mass);
    }));
  }
  std::vector<double> gap_re;
  for (auto& f : gaps) gap_re.push_back(f.get().re);

  if (rc.format == "json") {
    json j = json::array();
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      j.push_back({{"L", lengths[i]}, {"gap_re", gap_re[i]}});
    }
    out << j.dump(2) << '\n';
  } else {
    out << "L,gap_re\n";
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      out << format_shortest(lengths[i]) << ',' << format_double(gap_re[i])
          << '\n';
    }
  }
  return kSuccess;
}

int cmd_catalog(const RunConfig& rc, std::ostream& out) {
  const std::vector<ModelSpec> models = catalog();
  if (rc.format == "json") {
    json j = json::array();
    for (const ModelSpec& m : models) {
      json params = json::object();
      for (const auto& [k, v] : m.params) params[k] = v;
      for (const auto& [k, v] : m.shape) params[k] = v;
      j.push_back({{"name", m.name},
                   {"density", m.density_text},
                   {"params", params},
                   {"homogeneous_class", m.homogeneous_class}});
    }
    out << j.dump(2) << '\n';
  } else {
    out << "name,homogeneous_class,params,density\n";
    for (const ModelSpec& m : models) {
      out << m.name << ',' << (m.homogeneous_class ? "true" : "false") << ','
          << param_list(m) << ',' << csv_quote(m.density_text) << '\n';
    }
  }
  return kSuccess;
}

}  // namespace nlqm::cli
