#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nlqm {

/// Accuracy order of the finite-difference stencils attached to a grid.
///
/// `fourth` (the default) uses 5-point central stencils in the interior and
/// one-sided stencils that are exact on quartics at the two outermost nodes.
/// `second` uses the classic 3-point stencils with second-order one-sided
/// boundary closures.
enum class StencilOrder { second = 2, fourth = 4 };

/// Uniform 1-D lattice x_j = x_min + j*dx, j = 0..n-1, with n odd.
class Grid {
 public:
  /// Throws ConfigError for even n, n < 5 or x_max <= x_min.
  Grid(double x_min, double x_max, std::size_t n,
       StencilOrder order = StencilOrder::fourth);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t n() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double length() const noexcept { return x_max_ - x_min_; }
  StencilOrder order() const noexcept { return order_; }

  double x(std::size_t j) const noexcept {
    return x_min_ + static_cast<double>(j) * dx_;
  }
  std::vector<double> nodes() const;

  bool operator==(const Grid&) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
  StencilOrder order_;
};

Grid make_grid(double x_min, double x_max, std::size_t n,
               StencilOrder order = StencilOrder::fourth);

/// Default lattice used throughout: [-16, 16] with 2049 nodes (dx = 1/64).
Grid default_grid();

/// Real values attached to every node of a grid.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid);  // zeros
  ScalarField(const Grid& grid, std::vector<double> values);

  static ScalarField sample(const Grid& grid,
                            const std::function<double(double)>& f);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  double& operator[](std::size_t j) noexcept { return values_[j]; }

  double max_abs() const noexcept;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, double s);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Psi = R exp(iS) in Madelung form.
class MadelungField {
 public:
  /// Requires R >= 0 everywhere and both fields on the same grid.
  MadelungField(ScalarField amplitude, ScalarField phase);

  const Grid& grid() const noexcept { return R_.grid(); }
  const ScalarField& R() const noexcept { return R_; }
  const ScalarField& S() const noexcept { return S_; }
  ScalarField rho() const;

 private:
  ScalarField R_;
  ScalarField S_;
};

inline constexpr double kDefaultDecayTol = 1e-6;

/// True when R at both outermost nodes is <= decay_tol * max R.
bool decays(const MadelungField& state, double decay_tol = kDefaultDecayTol);
/// Throws DecayViolation naming the offending boundary value.
void require_decay(const MadelungField& state,
                   double decay_tol = kDefaultDecayTol);

// Finite-difference operators. Raw-span overloads write into `out` (same
// length as `f`) and are used on hot paths.
void deriv1(std::span<const double> f, double dx, StencilOrder order,
            std::span<double> out);
void deriv2(std::span<const double> f, double dx, StencilOrder order,
            std::span<double> out);

ScalarField deriv1(const ScalarField& f);
ScalarField deriv2(const ScalarField& f);
/// deriv2 applied twice. Still O(dx^order) but with a larger error constant
/// than a dedicated stencil, and the boundary closures compound.
ScalarField deriv4(const ScalarField& f);

/// Composite Simpson rule over [x_min, x_max].
double integrate(std::span<const double> f, double dx);
double integrate(const ScalarField& f);

/// integral of R^2.
double norm(const MadelungField& state);

}  // namespace nlqm
