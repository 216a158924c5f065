#include "nlqm/energy.hpp"

#include <algorithm>
#include <cmath>

#include "nlqm/error.hpp"

namespace nlqm {

namespace {

void check_inputs(const MadelungField& state, const ScalarField& V, double mass) {
  if (!(V.grid() == state.grid())) {
    throw ConfigError("potential and state live on different grids");
  }
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
}

// (1/2m)(R^2 S'^2 + R'^2) + V R^2 at every node.
std::vector<double> linear_density(const SlotData& s, const ScalarField& V,
                                   double mass) {
  const auto R = s[Slot::R];
  const auto dR = s[Slot::dR];
  const auto dS = s[Slot::dS];
  std::vector<double> out(R.size());
  for (std::size_t j = 0; j < R.size(); ++j) {
    const double rho = R[j] * R[j];
    out[j] = (rho * dS[j] * dS[j] + dR[j] * dR[j]) / (2.0 * mass) + V[j] * rho;
  }
  return out;
}

}  // namespace

ScalarField sho_potential(const Grid& grid, double omega, double mass) {
  return ScalarField::sample(
      grid, [=](double x) { return 0.5 * mass * omega * omega * x * x; });
}

EnergyReport energy_report(const Density& density, const MadelungField& state,
                           const ScalarField& V, double mass,
                           double decay_tol) {
  check_inputs(state, V, mass);
  require_decay(state, decay_tol);
  const Grid& g = state.grid();
  const std::size_t n = g.n();
  const SlotData slots(state);
  const auto R = slots[Slot::R];

  std::vector<double> qm = linear_density(slots, V, mass);
  std::vector<double> ft = qm;
  std::vector<double> qm_im(n, 0.0);

  // (R^2 S')' / 2m, the Schroedinger part of the Hermiticity integrand.
  std::vector<double> flux(n), herm(n);
  const auto dS = slots[Slot::dS];
  for (std::size_t j = 0; j < n; ++j) flux[j] = R[j] * R[j] * dS[j];
  deriv1(flux, g.dx(), g.order(), herm);
  for (double& h : herm) h /= 2.0 * mass;

  if (!density.is_zero()) {
    const std::vector<double> L = density.evaluate(slots);
    const std::vector<double> dLdR = density.el_derivative(slots, Field::R);
    const std::vector<double> dLdS = density.el_derivative(slots, Field::S);
    for (std::size_t j = 0; j < n; ++j) {
      qm[j] += 0.5 * R[j] * dLdR[j];
      ft[j] += L[j];
      qm_im[j] = 0.5 * dLdS[j];
      herm[j] += 0.5 * dLdS[j];
    }
  }

  EnergyReport r;
  const double dx = g.dx();
  std::vector<double> rho(n);
  for (std::size_t j = 0; j < n; ++j) rho[j] = R[j] * R[j];
  r.norm = integrate(rho, dx);
  r.e_qm_re = integrate(qm, dx);
  r.e_qm_im = integrate(qm_im, dx);
  r.e_ft = integrate(ft, dx);
  r.gap_re = r.e_qm_re - r.e_ft;
  r.gap_im = r.e_qm_im;
  r.hermiticity_defect = integrate(herm, dx);
  return r;
}

EnergyReport energy_report(const ModelSpec& model, const MadelungField& state,
                           const ScalarField& V, double mass,
                           double decay_tol) {
  return energy_report(Density(model), state, V, mass, decay_tol);
}

ComplexEnergy e_qm(const Density& density, const MadelungField& state,
                   const ScalarField& V, double mass, double decay_tol) {
  check_inputs(state, V, mass);
  require_decay(state, decay_tol);
  const Grid& g = state.grid();
  const SlotData slots(state);
  std::vector<double> re = linear_density(slots, V, mass);
  ComplexEnergy e;
  if (!density.is_zero()) {
    const auto R = slots[Slot::R];
    const std::vector<double> dLdR = density.el_derivative(slots, Field::R);
    std::vector<double> im = density.el_derivative(slots, Field::S);
    for (std::size_t j = 0; j < re.size(); ++j) {
      re[j] += 0.5 * R[j] * dLdR[j];
      im[j] *= 0.5;
    }
    e.im = integrate(im, g.dx());
  }
  e.re = integrate(re, g.dx());
  return e;
}

ComplexEnergy e_qm(const ModelSpec& model, const MadelungField& state,
                   const ScalarField& V, double mass, double decay_tol) {
  return e_qm(Density(model), state, V, mass, decay_tol);
}

double e_ft(const Density& density, const MadelungField& state,
            const ScalarField& V, double mass, double decay_tol) {
  check_inputs(state, V, mass);
  require_decay(state, decay_tol);
  const SlotData slots(state);
  std::vector<double> f = linear_density(slots, V, mass);
  if (!density.is_zero()) {
    const std::vector<double> L = density.evaluate(slots);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] += L[j];
  }
  return integrate(f, state.grid().dx());
}

double e_ft(const ModelSpec& model, const MadelungField& state,
            const ScalarField& V, double mass, double decay_tol) {
  return e_ft(Density(model), state, V, mass, decay_tol);
}

ComplexEnergy ambiguity_gap(const ModelSpec& model, const MadelungField& state,
                            const ScalarField& V, double mass,
                            double decay_tol) {
  const EnergyReport r = energy_report(model, state, V, mass, decay_tol);
  return {r.gap_re, r.gap_im};
}

double hermiticity_defect(const Density& density, const MadelungField& state,
                          double mass) {
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  const Grid& g = state.grid();
  const std::size_t n = g.n();
  const auto R = state.R().values();
  std::vector<double> dS(n), flux(n), f(n);
  deriv1(state.S().values(), g.dx(), g.order(), dS);
  for (std::size_t j = 0; j < n; ++j) flux[j] = R[j] * R[j] * dS[j];
  deriv1(flux, g.dx(), g.order(), f);
  for (double& v : f) v /= 2.0 * mass;
  if (!density.is_zero()) {
    const std::vector<double> dLdS =
        density.el_derivative(SlotData(state), Field::S);
    for (std::size_t j = 0; j < n; ++j) f[j] += 0.5 * dLdS[j];
  }
  return integrate(f, g.dx());
}

double hermiticity_defect(const ModelSpec& model, const MadelungField& state,
                          double mass) {
  return hermiticity_defect(Density(model), state, mass);
}

std::vector<LambdaProbe> default_lambda_probes() {
  return {{0.5, 0.0}, {0.5, 1.0}, {2.0, 0.0}, {2.0, 1.0}};
}

HomogeneityReport homogeneity_defect(const ModelSpec& model,
                                     const MadelungField& state,
                                     const std::vector<LambdaProbe>& probes,
                                     double rel_support) {
  const CompiledExpr L(model.density(), model.params);
  const Grid& g = state.grid();
  const auto R = state.R().values();
  const auto S = state.S().values();
  const std::size_t n = g.n();

  double peak = 0.0;
  for (double r : R) peak = std::max(peak, r * r);
  std::vector<std::size_t> nodes;
  for (std::size_t j = 0; j < n; ++j) {
    if (R[j] > 0.0 && R[j] * R[j] >= rel_support * peak) nodes.push_back(j);
  }
  if (nodes.empty()) throw NumericError("homogeneity: empty probe support");

  HomogeneityReport report;
  report.lambda_probes = probes;
  if (L.is_zero()) {
    report.defects.assign(probes.size(), 0.0);
    return report;
  }

  const std::vector<double> base = L.evaluate(SlotData(state).view());
  std::vector<double> R2(n), S2(n);
  for (const LambdaProbe& p : probes) {
    if (!(p.modulus > 0.0)) {
      throw ConfigError("homogeneity probe modulus must be positive");
    }
    for (std::size_t j = 0; j < n; ++j) {
      R2[j] = p.modulus * R[j];
      S2[j] = S[j] + p.phase;
    }
    const std::vector<double> scaled = L.evaluate(SlotData(g, R2, S2).view());
    double worst = 0.0;
    for (std::size_t j : nodes) {
      const double G = base[j] / (R[j] * R[j]);
      const double G2 = scaled[j] / (R2[j] * R2[j]);
      worst = std::max(worst, std::abs(G2 - G));
    }
    report.defects.push_back(worst);
    report.max_defect = std::max(report.max_defect, worst);
  }
  return report;
}

}  // namespace nlqm
