#pragma once

#include <utility>
#include <vector>

#include "nlqm/grid.hpp"
#include "nlqm/models.hpp"
#include "nlqm/variational.hpp"

namespace nlqm {

struct ComplexEnergy {
  double re = 0.0;
  double im = 0.0;
};

struct EnergyReport {
  double norm = 0.0;
  double e_qm_re = 0.0;
  double e_qm_im = 0.0;
  double e_ft = 0.0;
  double gap_re = 0.0;
  double gap_im = 0.0;
  double hermiticity_defect = 0.0;
};

/// V(x) = m w^2 x^2 / 2.
ScalarField sho_potential(const Grid& grid, double omega = 1.0,
                          double mass = 1.0);

// All energies use hbar = 1. E_QM and E_FT require boundary decay (throws
// DecayViolation); V must live on the state's grid.

ComplexEnergy e_qm(const Density& density, const MadelungField& state,
                   const ScalarField& V, double mass = 1.0,
                   double decay_tol = kDefaultDecayTol);
ComplexEnergy e_qm(const ModelSpec& model, const MadelungField& state,
                   const ScalarField& V, double mass = 1.0,
                   double decay_tol = kDefaultDecayTol);

/// Field-theoretical energy with the additive constant set to zero.
double e_ft(const Density& density, const MadelungField& state,
            const ScalarField& V, double mass = 1.0,
            double decay_tol = kDefaultDecayTol);
double e_ft(const ModelSpec& model, const MadelungField& state,
            const ScalarField& V, double mass = 1.0,
            double decay_tol = kDefaultDecayTol);

/// E_QM - E_FT.
ComplexEnergy ambiguity_gap(const ModelSpec& model, const MadelungField& state,
                            const ScalarField& V, double mass = 1.0,
                            double decay_tol = kDefaultDecayTol);

/// integral of R^2 Im[H_SE + H_NL], evaluated in the division-free form
/// (1/2m) (R^2 S')' + (1/2) dL/dS.
double hermiticity_defect(const Density& density, const MadelungField& state,
                          double mass = 1.0);
double hermiticity_defect(const ModelSpec& model, const MadelungField& state,
                          double mass = 1.0);

/// Everything above from one set of slot columns.
EnergyReport energy_report(const Density& density, const MadelungField& state,
                           const ScalarField& V, double mass = 1.0,
                           double decay_tol = kDefaultDecayTol);
EnergyReport energy_report(const ModelSpec& model, const MadelungField& state,
                           const ScalarField& V, double mass = 1.0,
                           double decay_tol = kDefaultDecayTol);

/// A global rescaling Psi -> mu e^{i theta} Psi.
struct LambdaProbe {
  double modulus = 1.0;
  double phase = 0.0;
};

std::vector<LambdaProbe> default_lambda_probes();  // mu in {0.5, 2}, theta in {0, 1}

struct HomogeneityReport {
  std::vector<LambdaProbe> lambda_probes;
  std::vector<double> defects;  // one per probe
  double max_defect = 0.0;
};

/// Compares G = L/R^2 before and after each probe on the nodes where
/// rho >= rel_support * max rho.
HomogeneityReport homogeneity_defect(
    const ModelSpec& model, const MadelungField& state,
    const std::vector<LambdaProbe>& probes = default_lambda_probes(),
    double rel_support = 1e-10);

}  // namespace nlqm
