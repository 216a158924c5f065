#pragma once

#include <utility>

#include "nlqm/grid.hpp"
#include "nlqm/models.hpp"
#include "nlqm/variational.hpp"

namespace nlqm {

/// Displaced harmonic-oscillator ground state, x0 = 1/sqrt(m w).
struct CoherentParams {
  double alpha_mod = 1.0;
  double delta = 0.0;
  double omega = 1.0;
  double mass = 1.0;
  double t = 0.0;
};

struct GaussianParams {
  double sigma = 1.0;
  double x_c = 0.0;
  double k = 0.0;
  double kappa = 0.0;
};

// Constructors throw ConfigError for invalid parameters and DecayViolation if
// the state does not decay on the grid.

/// rho = exp(-(x - x_c(t))^2 / x0^2) / (sqrt(pi) x0) with
/// x_c(t) = sqrt(2) x0 |alpha| cos(wt - delta), and the phase linear in x.
MadelungField coherent(const CoherentParams& p, const Grid& grid);

struct TimeDerivatives {
  ScalarField drho_dt;
  ScalarField dS_dt;
};

/// Closed-form partial time derivatives of the coherent state's rho and S.
TimeDerivatives coherent_time_derivatives(const CoherentParams& p,
                                          const Grid& grid);

/// Normalized Gaussian density with S = k x + kappa x^2 / 2.
MadelungField gaussian(const GaussianParams& p, const Grid& grid);

/// sigma = 1, x_c = 0, k = 0.3, kappa = 0.1.
MadelungField reference_gaussian(const Grid& grid);

MadelungField sho_ground(double omega, double mass, const Grid& grid);

/// Residuals of the two equations of motion for given time derivatives:
///   continuity: rho_t + (1/m)(rho S')' -/+ dL/dS   (see ContinuityConvention)
///   phase:      (1/m)R'' - (1/m)R S'^2 - 2R S_t - 2VR - dL/dR
/// Throws AmplitudeUnderflow for interior vacuum.
std::pair<ScalarField, ScalarField> eom_residual(
    const Density& density, const MadelungField& state,
    const ScalarField& drho_dt, const ScalarField& dS_dt, const ScalarField& V,
    double mass = 1.0,
    ContinuityConvention convention = ContinuityConvention::hamiltonian,
    double rho_floor = kDefaultRhoFloor);
std::pair<ScalarField, ScalarField> eom_residual(
    const ModelSpec& model, const MadelungField& state,
    const ScalarField& drho_dt, const ScalarField& dS_dt, const ScalarField& V,
    double mass = 1.0,
    ContinuityConvention convention = ContinuityConvention::hamiltonian,
    double rho_floor = kDefaultRhoFloor);

}  // namespace nlqm
