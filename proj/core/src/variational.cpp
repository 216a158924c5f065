#include "nlqm/variational.hpp"

#include <algorithm>
#include <cmath>

#include "nlqm/error.hpp"

namespace nlqm {

namespace {

constexpr std::array<Slot, 6> kFieldSlots = {Slot::R,  Slot::S,   Slot::dR,
                                             Slot::dS, Slot::ddR, Slot::ddS};

std::array<CompiledExpr, 6> compile_partials(const DensityExpr& expr,
                                             const ParamBindings& bindings) {
  auto at = [&](std::size_t i) {
    return CompiledExpr(partial(expr, kFieldSlots[i]), bindings);
  };
  return {at(0), at(1), at(2), at(3), at(4), at(5)};
}

}  // namespace

Density::Density(const DensityExpr& expr, const ParamBindings& bindings)
    : value_(expr, bindings), partials_(compile_partials(expr, bindings)) {
  if (expr.references(Slot::x)) {
    throw ConfigError("densities may not depend on x explicitly");
  }
}

Density::Density(const ModelSpec& model)
    : Density(model.density(), model.params) {}

std::vector<double> Density::evaluate(const SlotData& slots) const {
  return value_.evaluate(slots.view());
}

std::vector<double> Density::el_derivative(const SlotData& slots,
                                           Field wrt) const {
  std::vector<double> out(slots.grid().n());
  el_derivative(slots, wrt, out);
  return out;
}

void Density::el_derivative(const SlotData& slots, Field wrt,
                            std::span<double> out) const {
  const Grid& g = slots.grid();
  const std::size_t n = g.n();
  const SlotView view = slots.view();
  const bool r = wrt == Field::R;
  const CompiledExpr& p0 = partial(r ? Slot::R : Slot::S);
  const CompiledExpr& p1 = partial(r ? Slot::dR : Slot::dS);
  const CompiledExpr& p2 = partial(r ? Slot::ddR : Slot::ddS);

  if (p0.is_zero()) {
    std::fill(out.begin(), out.end(), 0.0);
  } else {
    p0.evaluate(view, out);
  }

  thread_local std::vector<double> tmp;
  thread_local std::vector<double> d;
  tmp.resize(n);
  d.resize(n);
  if (!p1.is_zero()) {
    p1.evaluate(view, tmp);
    deriv1(tmp, g.dx(), g.order(), d);
    for (std::size_t j = 0; j < n; ++j) out[j] -= d[j];
  }
  if (!p2.is_zero()) {
    p2.evaluate(view, tmp);
    deriv2(tmp, g.dx(), g.order(), d);
    for (std::size_t j = 0; j < n; ++j) out[j] += d[j];
  }
}

ScalarField el_derivative(const DensityExpr& expr, Field wrt,
                          const ParamBindings& bindings,
                          const MadelungField& state) {
  const Density density(expr, bindings);
  return ScalarField(state.grid(),
                     density.el_derivative(SlotData(state), wrt));
}

ScalarField el_derivative(const ModelSpec& model, Field wrt,
                          const MadelungField& state) {
  return el_derivative(model.density(), wrt, model.params, state);
}

double gateaux(const DensityExpr& expr, const ParamBindings& bindings,
               Field wrt, const MadelungField& state, std::size_t j,
               double eps) {
  const Grid& g = state.grid();
  if (j < 3 || j + 3 >= g.n()) {
    throw ConfigError("gateaux probe node " + std::to_string(j) +
                      " is within 3 nodes of the boundary");
  }
  if (!(eps > 0.0)) throw ConfigError("gateaux step must be positive");

  const CompiledExpr L(expr, bindings);
  std::vector<double> R(state.R().values().begin(), state.R().values().end());
  std::vector<double> S(state.S().values().begin(), state.S().values().end());
  std::vector<double>& phi = wrt == Field::R ? R : S;
  const double base = phi[j];

  phi[j] = base + eps;
  const std::vector<double> up = L.evaluate(SlotData(g, R, S).view());
  phi[j] = base - eps;
  const std::vector<double> down = L.evaluate(SlotData(g, R, S).view());

  // Nodes outside the stencil reach of j cancel exactly.
  double sum = 0.0;
  for (std::size_t i = 0; i < up.size(); ++i) sum += up[i] - down[i];
  return sum / (2.0 * eps);
}

std::vector<std::size_t> probe_nodes(const MadelungField& state,
                                     std::size_t count, double rel_level) {
  const auto R = state.R().values();
  const std::size_t n = R.size();
  double peak = 0.0;
  for (double r : R) peak = std::max(peak, r * r);
  if (!(peak > 0.0)) throw NumericError("probe nodes: state is identically zero");

  std::size_t lo = n;
  std::size_t hi = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (R[j] * R[j] >= rel_level * peak) {
      lo = std::min(lo, j);
      hi = std::max(hi, j);
    }
  }
  lo = std::max<std::size_t>(lo, 3);
  hi = std::min(hi, n - 4);
  if (lo > hi) throw NumericError("probe nodes: empty probe region");

  std::vector<std::size_t> nodes;
  if (count == 1) {
    nodes.push_back((lo + hi) / 2);
    return nodes;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    nodes.push_back(lo + static_cast<std::size_t>(
                             std::lround(t * static_cast<double>(hi - lo))));
  }
  return nodes;
}

std::pair<std::size_t, std::size_t> support(std::span<const double> R,
                                            double rho_floor) {
  const std::size_t n = R.size();
  std::size_t first = n;
  std::size_t last = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (R[j] * R[j] >= rho_floor) {
      first = std::min(first, j);
      last = j;
    }
  }
  if (first == n) throw NumericError("state has no node above the density floor");
  for (std::size_t j = first; j <= last; ++j) {
    const double rho = R[j] * R[j];
    if (rho < rho_floor) throw AmplitudeUnderflow(j, rho);
  }
  return {first, last};
}

namespace {

HamiltonianField masked(const Grid& g, std::span<const double> R,
                        double rho_floor) {
  HamiltonianField h{ScalarField(g), ScalarField(g),
                     std::vector<bool>(g.n(), false)};
  const auto [first, last] = support(R, rho_floor);
  for (std::size_t j = first; j <= last; ++j) h.valid[j] = true;
  return h;
}

}  // namespace

HamiltonianField h_nl(const Density& density, const MadelungField& state,
                      double rho_floor) {
  const Grid& g = state.grid();
  const auto R = state.R().values();
  HamiltonianField h = masked(g, R, rho_floor);
  if (density.is_zero()) return h;

  const SlotData slots(state);
  const std::vector<double> dR = density.el_derivative(slots, Field::R);
  const std::vector<double> dS = density.el_derivative(slots, Field::S);
  for (std::size_t j = 0; j < g.n(); ++j) {
    if (!h.valid[j]) continue;
    h.re[j] = dR[j] / (2.0 * R[j]);
    h.im[j] = dS[j] / (2.0 * R[j] * R[j]);
  }
  return h;
}

HamiltonianField h_nl(const ModelSpec& model, const MadelungField& state,
                      double rho_floor) {
  return h_nl(Density(model), state, rho_floor);
}

HamiltonianField h_se(const MadelungField& state, const ScalarField& V,
                      double mass, double rho_floor) {
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  const Grid& g = state.grid();
  const std::size_t n = g.n();
  const auto R = state.R().values();
  const auto S = state.S().values();
  HamiltonianField h = masked(g, R, rho_floor);

  std::vector<double> ddR(n), dS(n), flux(n), div(n);
  deriv2(R, g.dx(), g.order(), ddR);
  deriv1(S, g.dx(), g.order(), dS);
  for (std::size_t j = 0; j < n; ++j) flux[j] = R[j] * R[j] * dS[j];
  deriv1(flux, g.dx(), g.order(), div);

  for (std::size_t j = 0; j < n; ++j) {
    if (!h.valid[j]) continue;
    h.re[j] = -ddR[j] / (2.0 * mass * R[j]) + dS[j] * dS[j] / (2.0 * mass) + V[j];
    h.im[j] = div[j] / (2.0 * mass * R[j] * R[j]);
  }
  return h;
}

}  // namespace nlqm
