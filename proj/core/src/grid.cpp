#include "nlqm/grid.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "nlqm/error.hpp"

namespace nlqm {

Grid::Grid(double x_min, double x_max, std::size_t n, StencilOrder order)
    : x_min_(x_min), x_max_(x_max), n_(n), dx_(0.0), order_(order) {
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw ConfigError("grid bounds must satisfy x_min < x_max");
  }
  if (n < 5) throw ConfigError("grid needs at least 5 nodes");
  if (n % 2 == 0) {
    throw ConfigError("grid node count must be odd for Simpson quadrature, got " +
                      std::to_string(n));
  }
  dx_ = (x_max - x_min) / static_cast<double>(n - 1);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
  return xs;
}

Grid make_grid(double x_min, double x_max, std::size_t n, StencilOrder order) {
  return Grid(x_min, x_max, n, order);
}

Grid default_grid() { return Grid(-16.0, 16.0, 2049); }

ScalarField::ScalarField(const Grid& grid)
    : grid_(grid), values_(grid.n(), 0.0) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n()) {
    throw ConfigError("field has " + std::to_string(values_.size()) +
                      " values but the grid has " + std::to_string(grid_.n()) +
                      " nodes");
  }
}

ScalarField ScalarField::sample(const Grid& grid,
                                const std::function<double(double)>& f) {
  std::vector<double> v(grid.n());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
  return ScalarField(grid, std::move(v));
}

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  assert(other.size() == size());
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other[j];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  assert(other.size() == size());
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other[j];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= b[j];
  return out;
}

MadelungField::MadelungField(ScalarField amplitude, ScalarField phase)
    : R_(std::move(amplitude)), S_(std::move(phase)) {
  if (!(R_.grid() == S_.grid())) {
    throw ConfigError("amplitude and phase live on different grids");
  }
  for (std::size_t j = 0; j < R_.size(); ++j) {
    if (!(R_[j] >= 0.0)) {
      throw ConfigError("amplitude must be non-negative (node " +
                        std::to_string(j) + ")");
    }
  }
}

ScalarField MadelungField::rho() const { return hadamard(R_, R_); }

bool decays(const MadelungField& state, double decay_tol) {
  const auto r = state.R().values();
  const double peak = *std::max_element(r.begin(), r.end());
  return r.front() <= decay_tol * peak && r.back() <= decay_tol * peak;
}

void require_decay(const MadelungField& state, double decay_tol) {
  if (!decays(state, decay_tol)) {
    const auto r = state.R().values();
    throw DecayViolation("state does not decay at the boundary: R(x_min) = " +
                         detail::sci(r.front()) + ", R(x_max) = " +
                         detail::sci(r.back()) + ", tolerance " +
                         detail::sci(decay_tol) + " * max R");
  }
}

namespace {

// One-sided closures, exact on quartics (fourth order) or quadratics/cubics
// (second order). Right-hand boundary uses the mirrored stencil.
void close_first(std::span<const double> f, double dx, StencilOrder order,
                 std::span<double> out) {
  const std::size_t n = f.size();
  if (order == StencilOrder::second) {
    const double c = 1.0 / (2.0 * dx);
    out[0] = c * (-3.0 * f[0] + 4.0 * f[1] - f[2]);
    out[n - 1] = c * (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]);
    return;
  }
  const double c = 1.0 / (12.0 * dx);
  out[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] -
                3.0 * f[4]);
  out[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
  out[n - 1] = -c * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] +
                     16.0 * f[n - 4] - 3.0 * f[n - 5]);
  out[n - 2] = -c * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] -
                     6.0 * f[n - 4] + f[n - 5]);
}

void close_second(std::span<const double> f, double dx, StencilOrder order,
                  std::span<double> out) {
  const std::size_t n = f.size();
  if (order == StencilOrder::second) {
    const double c = 1.0 / (dx * dx);
    out[0] = c * (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]);
    out[n - 1] = c * (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]);
    return;
  }
  const double c = 1.0 / (12.0 * dx * dx);
  out[0] = c * (35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] +
                11.0 * f[4]);
  out[1] = c * (11.0 * f[0] - 20.0 * f[1] + 6.0 * f[2] + 4.0 * f[3] - f[4]);
  out[n - 1] = c * (35.0 * f[n - 1] - 104.0 * f[n - 2] + 114.0 * f[n - 3] -
                    56.0 * f[n - 4] + 11.0 * f[n - 5]);
  out[n - 2] = c * (11.0 * f[n - 1] - 20.0 * f[n - 2] + 6.0 * f[n - 3] +
                    4.0 * f[n - 4] - f[n - 5]);
}

}  // namespace

void deriv1(std::span<const double> f, double dx, StencilOrder order,
            std::span<double> out) {
  const std::size_t n = f.size();
  assert(out.size() == n && n >= 5);
  if (order == StencilOrder::second) {
    const double c = 1.0 / (2.0 * dx);
    for (std::size_t j = 1; j + 1 < n; ++j) out[j] = c * (f[j + 1] - f[j - 1]);
  } else {
    const double c = 1.0 / (12.0 * dx);
    for (std::size_t j = 2; j + 2 < n; ++j) {
      out[j] = c * (8.0 * (f[j + 1] - f[j - 1]) - (f[j + 2] - f[j - 2]));
    }
  }
  close_first(f, dx, order, out);
}

void deriv2(std::span<const double> f, double dx, StencilOrder order,
            std::span<double> out) {
  const std::size_t n = f.size();
  assert(out.size() == n && n >= 5);
  if (order == StencilOrder::second) {
    const double c = 1.0 / (dx * dx);
    for (std::size_t j = 1; j + 1 < n; ++j) {
      out[j] = c * (f[j + 1] - 2.0 * f[j] + f[j - 1]);
    }
  } else {
    const double c = 1.0 / (12.0 * dx * dx);
    for (std::size_t j = 2; j + 2 < n; ++j) {
      out[j] = c * (16.0 * (f[j + 1] + f[j - 1]) - 30.0 * f[j] -
                    (f[j + 2] + f[j - 2]));
    }
  }
  close_second(f, dx, order, out);
}

ScalarField deriv1(const ScalarField& f) {
  ScalarField out(f.grid());
  deriv1(f.values(), f.grid().dx(), f.grid().order(), out.values());
  return out;
}

ScalarField deriv2(const ScalarField& f) {
  ScalarField out(f.grid());
  deriv2(f.values(), f.grid().dx(), f.grid().order(), out.values());
  return out;
}

ScalarField deriv4(const ScalarField& f) { return deriv2(deriv2(f)); }

double integrate(std::span<const double> f, double dx) {
  const std::size_t n = f.size();
  assert(n % 2 == 1 && n >= 3);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t j = 1; j + 1 < n; j += 2) odd += f[j];
  for (std::size_t j = 2; j + 1 < n; j += 2) even += f[j];
  return dx / 3.0 * (f.front() + 4.0 * odd + 2.0 * even + f.back());
}

double integrate(const ScalarField& f) {
  return integrate(f.values(), f.grid().dx());
}

double norm(const MadelungField& state) { return integrate(state.rho()); }

}  // namespace nlqm
