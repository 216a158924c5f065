#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlqm/energy.hpp"
#include "nlqm/error.hpp"
#include "nlqm/grid.hpp"
#include "nlqm/models.hpp"
#include "nlqm/states.hpp"
#include "nlqm/variational.hpp"

namespace nlqm {

struct EvolutionConfig {
  double dt = 2e-4;
  std::size_t n_steps = 0;
  std::size_t sample_every = 1;
  double rho_floor = kDefaultRhoFloor;
  std::string potential = "0.5*x^2";
  double mass = 1.0;
  ContinuityConvention continuity = ContinuityConvention::hamiltonian;
};

struct TimeSample {
  double t = 0.0;
  double norm = 0.0;
  double e_qm_re = 0.0;
  double e_qm_im = 0.0;
  double e_ft = 0.0;
  double gap_re = 0.0;
  double gap_im = 0.0;
};

struct TimeSeries {
  std::vector<TimeSample> rows;
};

/// "t,norm,e_qm_re,e_qm_im,e_ft,gap_re,gap_im" plus one line per sample.
void write_csv(std::ostream& out, const TimeSeries& series);

/// An evolution stopped early. Carries the samples completed so far.
class EvolutionAborted : public NumericError {
 public:
  EvolutionAborted(const std::string& what, TimeSeries partial)
      : NumericError(what), partial_(std::move(partial)) {}
  const TimeSeries& partial() const noexcept { return partial_; }

 private:
  TimeSeries partial_;
};

/// Classical RK4 on (rho, S) with fixed step.
///
/// Nodes below rho_floor at the edges of the support are vacuum: they are not
/// evolved but rebuilt at every stage by extrapolating ln rho and S from the
/// edge of the support, and R = sqrt(rho) there is the extrapolated tail.
///
/// The explicit scheme is only conditionally stable. For the linear part on
/// the default fourth-order stencil the limit is about dt < 1.06 m dx^2
/// (2.6e-4 at dx = 1/64); fourth-order phase terms such as ddS^2 tighten it
/// further (about 1e-5 for phase_power(0.01, 2)). Madelung variables also
/// amplify roundoff in low-density tails, and RK4 damps grid-scale modes only
/// near its stability limit, so very small steps on coarse grids can lose the
/// tail.
class Evolver {
 public:
  /// Evaluates config.potential on the grid.
  Evolver(const ModelSpec& model, const Grid& grid, EvolutionConfig config);
  /// Uses V directly and ignores config.potential.
  Evolver(const ModelSpec& model, ScalarField V, EvolutionConfig config);

  const EvolutionConfig& config() const noexcept { return config_; }
  const ScalarField& potential() const noexcept { return V_; }

  /// Throws AmplitudeUnderflow for interior vacuum.
  TimeDerivatives rhs(const MadelungField& state) const;

  /// One step of size dt (negative dt steps backwards). Throws
  /// AmplitudeUnderflow or NumericError (non-finite values).
  MadelungField step(const MadelungField& state, double dt) const;
  MadelungField step(const MadelungField& state) const {
    return step(state, config_.dt);
  }

  using Observer = std::function<void(double t, const MadelungField&)>;

  /// n_steps steps, sampling energies at t = 0 and every sample_every steps.
  /// Any numeric failure is rethrown as EvolutionAborted with the time.
  TimeSeries run(const MadelungField& state0,
                 const Observer& observer = nullptr) const;

  TimeSample sample(double t, const MadelungField& state) const;

 private:
  struct Workspace;
  void derivatives(std::span<const double> rho, std::span<const double> S,
                   std::span<double> drho, std::span<double> dS_dt,
                   Workspace& ws) const;
  // One RK4 step on vacuum-filled (rho, S) in place.
  void advance(std::vector<double>& rho, std::vector<double>& S, double dt,
               Workspace& ws) const;
  MadelungField to_state(std::span<const double> rho,
                         std::span<const double> S) const;

  Density density_;
  Grid grid_;
  EvolutionConfig config_;
  ScalarField V_;
};

TimeDerivatives rhs(const ModelSpec& model, const MadelungField& state,
                    const ScalarField& V, double mass = 1.0,
                    ContinuityConvention convention =
                        ContinuityConvention::hamiltonian);
MadelungField step(const ModelSpec& model, const MadelungField& state,
                   const EvolutionConfig& config);
TimeSeries run(const ModelSpec& model, const MadelungField& state0,
               const EvolutionConfig& config);

/// First moment of rho divided by the norm.
double center_of_mass(const MadelungField& state);

}  // namespace nlqm
