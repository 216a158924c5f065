#include "nlqm/states.hpp"

#include <cmath>
#include <numbers>

#include "nlqm/error.hpp"

namespace nlqm {

namespace {

void check_oscillator(double omega, double mass) {
  if (!(omega > 0.0)) throw ConfigError("omega must be positive");
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
}

struct CoherentKinematics {
  double x0, theta, center, velocity;
};

CoherentKinematics kinematics(const CoherentParams& p) {
  check_oscillator(p.omega, p.mass);
  if (!(p.alpha_mod >= 0.0)) throw ConfigError("|alpha| must be non-negative");
  const double x0 = 1.0 / std::sqrt(p.mass * p.omega);
  const double theta = p.omega * p.t - p.delta;
  const double amp = std::numbers::sqrt2 * x0 * p.alpha_mod;
  return {x0, theta, amp * std::cos(theta), -amp * p.omega * std::sin(theta)};
}

MadelungField checked(MadelungField state) {
  require_decay(state);
  return state;
}

}  // namespace

MadelungField coherent(const CoherentParams& p, const Grid& grid) {
  const auto k = kinematics(p);
  const double a = p.alpha_mod;
  const double norm = 1.0 / (std::sqrt(std::numbers::pi) * k.x0);
  ScalarField R = ScalarField::sample(grid, [&](double x) {
    const double u = (x - k.center) / k.x0;
    return std::sqrt(norm * std::exp(-u * u));
  });
  ScalarField S = ScalarField::sample(grid, [&](double x) {
    return -(p.omega * p.t / 2.0 - 0.5 * a * a * std::sin(2.0 * k.theta) +
             std::numbers::sqrt2 * a * x / k.x0 * std::sin(k.theta));
  });
  return checked(MadelungField(std::move(R), std::move(S)));
}

TimeDerivatives coherent_time_derivatives(const CoherentParams& p,
                                          const Grid& grid) {
  const auto k = kinematics(p);
  const double a = p.alpha_mod;
  const double norm = 1.0 / (std::sqrt(std::numbers::pi) * k.x0);
  const double x02 = k.x0 * k.x0;
  ScalarField drho = ScalarField::sample(grid, [&](double x) {
    const double u = x - k.center;
    return norm * std::exp(-u * u / x02) * 2.0 * u / x02 * k.velocity;
  });
  ScalarField dS = ScalarField::sample(grid, [&](double x) {
    return -(p.omega / 2.0 - a * a * p.omega * std::cos(2.0 * k.theta) +
             std::numbers::sqrt2 * a * p.omega * x / k.x0 * std::cos(k.theta));
  });
  return {std::move(drho), std::move(dS)};
}

MadelungField gaussian(const GaussianParams& p, const Grid& grid) {
  if (!(p.sigma > 0.0)) throw ConfigError("gaussian sigma must be positive");
  const double norm = 1.0 / (p.sigma * std::sqrt(2.0 * std::numbers::pi));
  ScalarField R = ScalarField::sample(grid, [&](double x) {
    const double u = (x - p.x_c) / p.sigma;
    return std::sqrt(norm * std::exp(-0.5 * u * u));
  });
  ScalarField S = ScalarField::sample(
      grid, [&](double x) { return p.k * x + 0.5 * p.kappa * x * x; });
  return checked(MadelungField(std::move(R), std::move(S)));
}

MadelungField reference_gaussian(const Grid& grid) {
  return gaussian({.sigma = 1.0, .x_c = 0.0, .k = 0.3, .kappa = 0.1}, grid);
}

MadelungField sho_ground(double omega, double mass, const Grid& grid) {
  check_oscillator(omega, mass);
  const double mw = mass * omega;
  const double c = std::pow(mw / std::numbers::pi, 0.25);
  ScalarField R = ScalarField::sample(
      grid, [&](double x) { return c * std::exp(-0.5 * mw * x * x); });
  return checked(MadelungField(std::move(R), ScalarField(grid)));
}

std::pair<ScalarField, ScalarField> eom_residual(
    const Density& density, const MadelungField& state,
    const ScalarField& drho_dt, const ScalarField& dS_dt, const ScalarField& V,
    double mass, ContinuityConvention convention, double rho_floor) {
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  const Grid& g = state.grid();
  if (!(drho_dt.grid() == g && dS_dt.grid() == g && V.grid() == g)) {
    throw ConfigError("eom residual: fields live on different grids");
  }
  (void)support(state.R().values(), rho_floor);

  const std::size_t n = g.n();
  const SlotData slots(state);
  const auto R = slots[Slot::R];
  const auto dS = slots[Slot::dS];
  const auto ddR = slots[Slot::ddR];

  std::vector<double> flux(n), div(n);
  for (std::size_t j = 0; j < n; ++j) flux[j] = R[j] * R[j] * dS[j];
  deriv1(flux, g.dx(), g.order(), div);

  std::vector<double> dLdR(n, 0.0), dLdS(n, 0.0);
  if (!density.is_zero()) {
    dLdR = density.el_derivative(slots, Field::R);
    dLdS = density.el_derivative(slots, Field::S);
  }
  const double source_sign =
      convention == ContinuityConvention::hamiltonian ? -1.0 : 1.0;

  ScalarField cont(g), phase(g);
  for (std::size_t j = 0; j < n; ++j) {
    cont[j] = drho_dt[j] + div[j] / mass + source_sign * dLdS[j];
    phase[j] = ddR[j] / mass - R[j] * dS[j] * dS[j] / mass -
               2.0 * R[j] * dS_dt[j] - 2.0 * V[j] * R[j] - dLdR[j];
  }
  return {std::move(cont), std::move(phase)};
}

std::pair<ScalarField, ScalarField> eom_residual(
    const ModelSpec& model, const MadelungField& state,
    const ScalarField& drho_dt, const ScalarField& dS_dt, const ScalarField& V,
    double mass, ContinuityConvention convention, double rho_floor) {
  return eom_residual(Density(model), state, drho_dt, dS_dt, V, mass,
                      convention, rho_floor);
}

}  // namespace nlqm
