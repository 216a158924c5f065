#include "nlqm/evolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "nlqm/io.hpp"

namespace nlqm {

namespace {

void check_config(const EvolutionConfig& c) {
  if (!std::isfinite(c.dt)) throw ConfigError("dt must be finite");
  if (c.sample_every == 0) throw ConfigError("sample_every must be at least 1");
  if (!(c.mass > 0.0)) throw ConfigError("mass must be positive");
  if (!(c.rho_floor > 0.0)) throw ConfigError("rho_floor must be positive");
}

// Past this multiple of the floor, amplitude beyond a sub-floor gap is real
// structure, so the gap is an interior hole rather than tail noise.
constexpr double kIslandFactor = 1e6;

// Contiguous block of nodes with rho >= floor around the density maximum.
// Stray above-floor nodes outside it count as vacuum unless they carry
// significant amplitude, in which case the gap is interior and aborts.
std::pair<std::size_t, std::size_t> active_range(std::span<const double> rho,
                                                 double floor) {
  const std::size_t n = rho.size();
  const auto peak = static_cast<std::size_t>(
      std::ranges::max_element(rho) - rho.begin());
  if (!(rho[peak] >= floor)) {
    throw NumericError("density fell below the floor everywhere");
  }
  std::size_t first = peak;
  std::size_t last = peak;
  while (first > 0 && rho[first - 1] >= floor) --first;
  while (last + 1 < n && rho[last + 1] >= floor) ++last;
  const double island = kIslandFactor * floor;
  for (std::size_t j = 0; j < first; ++j) {
    if (rho[j] >= island) throw AmplitudeUnderflow(first - 1, rho[first - 1]);
  }
  for (std::size_t j = last + 1; j < n; ++j) {
    if (rho[j] >= island) throw AmplitudeUnderflow(last + 1, rho[last + 1]);
  }
  return {first, last};
}

// Least-squares parabola through (i, y_i), i = 0..k-1.
std::array<double, 3> fit_quadratic(std::span<const double> y) {
  double m[3][4] = {};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = static_cast<double>(i);
    const double p[3] = {1.0, t, t * t};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += p[r] * p[c];
      m[r][3] += p[r] * y[i];
    }
  }
  for (int c = 0; c < 3; ++c) {
    int pivot = c;
    for (int r = c + 1; r < 3; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[pivot][c])) pivot = r;
    }
    std::swap(m[c], m[pivot]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

constexpr std::size_t kEdgeFitNodes = 16;
// Vacuum nodes refreshed inside an RK stage: the stencil reach (2) plus room
// for the active region to grow by a few nodes.
constexpr std::size_t kStageBand = 6;
constexpr std::size_t kAllNodes = std::numeric_limits<std::size_t>::max();

// Rebuilds up to `band` vacuum nodes (rho < floor, next to the boundary) on
// each side by extrapolating parabolas in ln rho and S from the edge of the
// active region. In Madelung variables relative roundoff grows without bound
// where rho is tiny, so the far tail cannot be evolved directly; for
// Gaussian-like tails the extrapolation is exact.
void fill_vacuum(std::span<double> rho, std::span<double> S, double floor,
                 std::size_t band) {
  const std::size_t n = rho.size();
  const auto [first, last] = active_range(rho, floor);
  if (first == 0 && last + 1 == n) return;
  const std::size_t width = last - first + 1;
  if (width < 3) throw NumericError("active region narrower than 3 nodes");
  const std::size_t k = std::min(kEdgeFitNodes, width);

  std::array<double, kEdgeFitNodes> lr{}, ph{};
  auto extend = [&](std::size_t edge, bool left) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = left ? edge + i : edge - i;
      lr[i] = std::log(rho[j]);
      ph[i] = S[j];
    }
    auto a = fit_quadratic(std::span(lr).first(k));
    // Decaying tails are concave in ln rho; a convex fit is edge noise and
    // would bend back up, so fall back to the straight line through the edge.
    if (a[2] > 0.0) {
      a[1] = lr[k - 1] > lr[0] ? (lr[k - 1] - lr[0]) / static_cast<double>(k - 1) : 0.0;
      a[0] = lr[0];
      a[2] = 0.0;
    }
    if (!(a[1] > 0.0)) {
      throw NumericError("density does not decay at the edge of its support");
    }
    const auto b = fit_quadratic(std::span(ph).first(k));
    const std::size_t room = left ? edge : n - 1 - edge;
    const std::size_t count = std::min(band, room);
    for (std::size_t i = 1; i <= count; ++i) {
      const std::size_t j = left ? edge - i : edge + i;
      const std::size_t inner = left ? j + 1 : j - 1;
      const double d = -static_cast<double>(i);
      rho[j] = std::min(std::exp(a[0] + d * (a[1] + d * a[2])), rho[inner]);
      S[j] = b[0] + d * (b[1] + d * b[2]);
    }
  };
  if (first > 0) extend(first, true);
  if (last + 1 < n) extend(last, false);
}

}  // namespace

struct Evolver::Workspace {
  explicit Workspace(const Grid& g) {
    const std::size_t n = g.n();
    for (auto* v : {&R, &u, &du, &ddu, &dS, &ddS, &dLdR, &dLdS, &rho0, &s0}) {
      v->assign(n, 0.0);
    }
    for (auto& v : kr) v.assign(n, 0.0);
    for (auto& v : ks) v.assign(n, 0.0);
  }
  std::vector<double> R, u, du, ddu, dS, ddS, dLdR, dLdS, rho0, s0;
  std::array<std::vector<double>, 4> kr, ks;
  std::optional<SlotData> slots;
};

Evolver::Evolver(const ModelSpec& model, const Grid& grid,
                 EvolutionConfig config)
    : Evolver(model, evaluate_potential(config.potential, grid), config) {}

Evolver::Evolver(const ModelSpec& model, ScalarField V, EvolutionConfig config)
    : density_(model),
      grid_(V.grid()),
      config_(std::move(config)),
      V_(std::move(V)) {
  check_config(config_);
}

void Evolver::derivatives(std::span<const double> rho,
                          std::span<const double> S, std::span<double> drho,
                          std::span<double> dS_dt, Workspace& ws) const {
  const std::size_t n = grid_.n();
  const double m = config_.mass;
  const double dx = grid_.dx();
  const StencilOrder order = grid_.order();
  const auto [first, last] = active_range(rho, config_.rho_floor);

  // Vacuum values are extrapolated, not clamped, so they stay smooth across
  // the edge of the active region.
  constexpr double tiny = std::numeric_limits<double>::min();
  const std::size_t lo = first >= 2 ? first - 2 : 0;
  const std::size_t hi = std::min(last + 2, n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    ws.R[j] = std::sqrt(std::max(rho[j], tiny));
    ws.u[j] = j >= lo && j <= hi ? 0.5 * std::log(std::max(rho[j], tiny)) : 0.0;
  }

  // The linear terms go through u = ln R: R''/R = u'' + u'^2 and
  // (rho S')' = rho (S'' + 2 u' S'). On Gaussian-like tails u is nearly
  // quadratic, so the stencils stay accurate where R spans many decades.
  deriv1(ws.u, dx, order, ws.du);
  deriv2(ws.u, dx, order, ws.ddu);
  deriv1(S, dx, order, ws.dS);
  deriv2(S, dx, order, ws.ddS);
  for (std::size_t j = first; j <= last; ++j) {
    const double du = ws.du[j];
    const double dS = ws.dS[j];
    drho[j] = -ws.R[j] * ws.R[j] * (ws.ddS[j] + 2.0 * du * dS) / m;
    dS_dt[j] = (ws.ddu[j] + du * du - dS * dS) / (2.0 * m) - V_[j];
  }

  if (!density_.is_zero()) {
    if (ws.slots) {
      ws.slots->assign(ws.R, S);
    } else {
      ws.slots.emplace(grid_, ws.R, S);
    }
    const double sign =
        config_.continuity == ContinuityConvention::hamiltonian ? 1.0 : -1.0;
    density_.el_derivative(*ws.slots, Field::S, ws.dLdS);
    density_.el_derivative(*ws.slots, Field::R, ws.dLdR);
    for (std::size_t j = first; j <= last; ++j) {
      drho[j] += sign * ws.dLdS[j];
      dS_dt[j] -= ws.dLdR[j] / (2.0 * ws.R[j]);
    }
  }

  // Vacuum nodes are not evolved; fill_vacuum() rebuilds them.
  std::fill(drho.begin(), drho.begin() + first, 0.0);
  std::fill(dS_dt.begin(), dS_dt.begin() + first, 0.0);
  std::fill(drho.begin() + last + 1, drho.end(), 0.0);
  std::fill(dS_dt.begin() + last + 1, dS_dt.end(), 0.0);
}

TimeDerivatives Evolver::rhs(const MadelungField& state) const {
  if (!(state.grid() == grid_)) {
    throw ConfigError("state and evolver live on different grids");
  }
  Workspace ws(grid_);
  const ScalarField rho = state.rho();
  TimeDerivatives out{ScalarField(grid_), ScalarField(grid_)};
  derivatives(rho.values(), state.S().values(), out.drho_dt.values(),
              out.dS_dt.values(), ws);
  return out;
}

void Evolver::advance(std::vector<double>& rho, std::vector<double>& S,
                      double dt, Workspace& ws) const {
  const std::size_t n = grid_.n();
  const double floor = config_.rho_floor;
  ws.rho0 = rho;
  ws.s0 = S;
  auto& kr = ws.kr;
  auto& ks = ws.ks;

  derivatives(ws.rho0, ws.s0, kr[0], ks[0], ws);
  const double c[3] = {0.5 * dt, 0.5 * dt, dt};
  for (int stage = 1; stage < 4; ++stage) {
    for (std::size_t j = 0; j < n; ++j) {
      rho[j] = ws.rho0[j] + c[stage - 1] * kr[stage - 1][j];
      S[j] = ws.s0[j] + c[stage - 1] * ks[stage - 1][j];
    }
    fill_vacuum(rho, S, floor, kStageBand);
    derivatives(rho, S, kr[stage], ks[stage], ws);
  }

  for (std::size_t j = 0; j < n; ++j) {
    rho[j] = ws.rho0[j] +
             dt / 6.0 * (kr[0][j] + 2.0 * kr[1][j] + 2.0 * kr[2][j] + kr[3][j]);
    S[j] = ws.s0[j] +
           dt / 6.0 * (ks[0][j] + 2.0 * ks[1][j] + 2.0 * ks[2][j] + ks[3][j]);
    if (!std::isfinite(rho[j]) || !std::isfinite(S[j])) {
      throw NumericError("non-finite value at node " + std::to_string(j));
    }
  }
  fill_vacuum(rho, S, floor, kAllNodes);
}

MadelungField Evolver::to_state(std::span<const double> rho,
                                std::span<const double> S) const {
  std::vector<double> R(rho.size());
  for (std::size_t j = 0; j < R.size(); ++j) R[j] = std::sqrt(std::max(rho[j], 0.0));
  return MadelungField(ScalarField(grid_, std::move(R)),
                       ScalarField(grid_, std::vector<double>(S.begin(), S.end())));
}

MadelungField Evolver::step(const MadelungField& state, double dt) const {
  if (!(state.grid() == grid_)) {
    throw ConfigError("state and evolver live on different grids");
  }
  if (dt == 0.0) return state;
  Workspace ws(grid_);
  const ScalarField r = state.rho();
  std::vector<double> rho(r.values().begin(), r.values().end());
  std::vector<double> S(state.S().values().begin(), state.S().values().end());
  fill_vacuum(rho, S, config_.rho_floor, kAllNodes);
  advance(rho, S, dt, ws);
  return to_state(rho, S);
}

TimeSample Evolver::sample(double t, const MadelungField& state) const {
  const EnergyReport r = energy_report(density_, state, V_, config_.mass);
  return {t, r.norm, r.e_qm_re, r.e_qm_im, r.e_ft, r.gap_re, r.gap_im};
}

TimeSeries Evolver::run(const MadelungField& state0,
                        const Observer& observer) const {
  if (!(config_.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(state0.grid() == grid_)) {
    throw ConfigError("state and evolver live on different grids");
  }
  TimeSeries series;
  Workspace ws(grid_);
  const ScalarField r0 = state0.rho();
  std::vector<double> rho(r0.values().begin(), r0.values().end());
  std::vector<double> S(state0.S().values().begin(), state0.S().values().end());
  std::size_t k = 0;
  auto t_of = [&](std::size_t steps) {
    return static_cast<double>(steps) * config_.dt;
  };
  auto record = [&](double t, const MadelungField& state) {
    series.rows.push_back(sample(t, state));
    if (observer) observer(t, state);
  };
  try {
    record(0.0, state0);
    fill_vacuum(rho, S, config_.rho_floor, kAllNodes);
    for (k = 1; k <= config_.n_steps; ++k) {
      advance(rho, S, config_.dt, ws);
      if (k % config_.sample_every == 0) record(t_of(k), to_state(rho, S));
    }
  } catch (const NumericError& e) {
    throw EvolutionAborted("evolution aborted at t = " +
                               format_double(t_of(k)) + ": " + e.what(),
                           std::move(series));
  }
  return series;
}

void write_csv(std::ostream& out, const TimeSeries& series) {
  out << "t,norm,e_qm_re,e_qm_im,e_ft,gap_re,gap_im\n";
  for (const TimeSample& s : series.rows) {
    out << format_double(s.t) << ',' << format_double(s.norm) << ','
        << format_double(s.e_qm_re) << ',' << format_double(s.e_qm_im) << ','
        << format_double(s.e_ft) << ',' << format_double(s.gap_re) << ','
        << format_double(s.gap_im) << '\n';
  }
}

TimeDerivatives rhs(const ModelSpec& model, const MadelungField& state,
                    const ScalarField& V, double mass,
                    ContinuityConvention convention) {
  EvolutionConfig config;
  config.mass = mass;
  config.continuity = convention;
  return Evolver(model, V, config).rhs(state);
}

MadelungField step(const ModelSpec& model, const MadelungField& state,
                   const EvolutionConfig& config) {
  return Evolver(model, state.grid(), config).step(state);
}

TimeSeries run(const ModelSpec& model, const MadelungField& state0,
               const EvolutionConfig& config) {
  return Evolver(model, state0.grid(), config).run(state0);
}

double center_of_mass(const MadelungField& state) {
  const Grid& g = state.grid();
  const auto R = state.R().values();
  std::vector<double> xr(g.n()), r(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) {
    r[j] = R[j] * R[j];
    xr[j] = g.x(j) * r[j];
  }
  return integrate(xr, g.dx()) / integrate(r, g.dx());
}

}  // namespace nlqm
