#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "nlqm/dsl.hpp"
#include "nlqm/grid.hpp"
#include "nlqm/models.hpp"

namespace nlqm {

enum class Field { R, S };

/// Sign of the nonlinear source in the continuity equation.
///
/// `hamiltonian`: rho_t = -(1/m)(rho S')' + dL/dS, the Euler-Lagrange equation
/// of the action whose energy is E_FT, so E_FT is conserved by the flow.
/// `as_printed`: rho_t = -(1/m)(rho S')' - dL/dS.
enum class ContinuityConvention { hamiltonian, as_printed };

/// Nodes with rho below this are treated as vacuum: masked in Hamiltonian
/// reports and not evolved in time.
inline constexpr double kDefaultRhoFloor = 1e-12;

/// A density compiled together with its six slot partials, so repeated
/// Euler-Lagrange evaluations (time stepping, scans) skip symbolic work.
class Density {
 public:
  Density(const DensityExpr& expr, const ParamBindings& bindings);
  explicit Density(const ModelSpec& model);

  bool is_zero() const noexcept { return value_.is_zero(); }
  const CompiledExpr& value() const noexcept { return value_; }
  const CompiledExpr& partial(Slot s) const {
    return partials_[static_cast<std::size_t>(s)];
  }

  /// L_NL at every node.
  std::vector<double> evaluate(const SlotData& slots) const;

  /// dL/dphi - D1(dL/dphi') + D2(dL/dphi'') on the slot data's grid.
  std::vector<double> el_derivative(const SlotData& slots, Field wrt) const;
  void el_derivative(const SlotData& slots, Field wrt,
                     std::span<double> out) const;

 private:
  CompiledExpr value_;
  std::array<CompiledExpr, 6> partials_;  // R, S, dR, dS, ddR, ddS
};

ScalarField el_derivative(const DensityExpr& expr, Field wrt,
                          const ParamBindings& bindings,
                          const MadelungField& state);
ScalarField el_derivative(const ModelSpec& model, Field wrt,
                          const MadelungField& state);

/// Numerical functional derivative at node j: a central difference of the
/// discretized action in the nodal value phi_j, divided by dx.
///
/// The action is summed with uniform weights (trapezoid with zero boundary
/// contribution) rather than Simpson's alternating weights: with Simpson the
/// bump derivative picks up the 4/3 or 2/3 node weight and no longer
/// approximates the pointwise functional derivative.
double gateaux(const DensityExpr& expr, const ParamBindings& bindings,
               Field wrt, const MadelungField& state, std::size_t j,
               double eps = 1e-5);

/// `count` nodes evenly spaced across the region where rho is at least
/// `rel_level` times its maximum, shrunk to keep 3 nodes from each boundary.
std::vector<std::size_t> probe_nodes(const MadelungField& state,
                                     std::size_t count = 5,
                                     double rel_level = 1e-2);

/// Multiplicative Hamiltonian H(R, S) with H Psi = (re + i im) Psi. Nodes
/// outside the support (rho < floor near the edges) are masked and zero.
struct HamiltonianField {
  ScalarField re;
  ScalarField im;
  std::vector<bool> valid;
};

/// Index range [first, last] of nodes with rho >= floor. Throws
/// AmplitudeUnderflow if a node strictly inside that range falls below the
/// floor, and NumericError if no node reaches it.
std::pair<std::size_t, std::size_t> support(std::span<const double> R,
                                            double rho_floor);

HamiltonianField h_nl(const Density& density, const MadelungField& state,
                      double rho_floor = kDefaultRhoFloor);
HamiltonianField h_nl(const ModelSpec& model, const MadelungField& state,
                      double rho_floor = kDefaultRhoFloor);

HamiltonianField h_se(const MadelungField& state, const ScalarField& V,
                      double mass = 1.0, double rho_floor = kDefaultRhoFloor);

}  // namespace nlqm
