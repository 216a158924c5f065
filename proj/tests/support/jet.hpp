#pragma once

// Truncated Taylor series in x around a point: f(x0 + h) = sum_k c[k] h^k.
// Arithmetic on jets propagates exact derivatives up to kJetOrder, which makes
// analytic states and hand-derived densities differentiable without stencils.

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>

namespace oracle {

inline constexpr std::size_t kJetOrder = 8;

class Jet {
 public:
  Jet() = default;
  Jet(double constant) { c_[0] = constant; }  // NOLINT: implicit by design

  static Jet variable(double x0) {
    Jet j(x0);
    j.c_[1] = 1.0;
    return j;
  }

  double value() const { return c_[0]; }
  double coeff(std::size_t k) const { return c_[k]; }

  /// d/dx of the series. The top coefficient is lost.
  Jet d() const {
    Jet r;
    for (std::size_t k = 0; k < kJetOrder; ++k) {
      r.c_[k] = static_cast<double>(k + 1) * c_[k + 1];
    }
    return r;
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t k = 0; k <= kJetOrder; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t k = 0; k <= kJetOrder; ++k) c_[k] -= o.c_[k];
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(const Jet& a) { return Jet(0.0) - a; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (std::size_t k = 0; k <= kJetOrder; ++k) {
      for (std::size_t j = 0; j <= k; ++j) r.c_[k] += a.c_[j] * b.c_[k - j];
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    assert(b.c_[0] != 0.0);
    Jet q;
    for (std::size_t k = 0; k <= kJetOrder; ++k) {
      double s = a.c_[k];
      for (std::size_t j = 1; j <= k; ++j) s -= b.c_[j] * q.c_[k - j];
      q.c_[k] = s / b.c_[0];
    }
    return q;
  }

  friend Jet exp(const Jet& a) {
    Jet r;
    r.c_[0] = std::exp(a.c_[0]);
    for (std::size_t k = 1; k <= kJetOrder; ++k) {
      double s = 0.0;
      for (std::size_t j = 1; j <= k; ++j) {
        s += static_cast<double>(j) * a.c_[j] * r.c_[k - j];
      }
      r.c_[k] = s / static_cast<double>(k);
    }
    return r;
  }

  friend Jet log(const Jet& a) {
    assert(a.c_[0] > 0.0);
    Jet r;
    r.c_[0] = std::log(a.c_[0]);
    for (std::size_t k = 1; k <= kJetOrder; ++k) {
      double s = a.c_[k];
      for (std::size_t j = 1; j < k; ++j) {
        s -= static_cast<double>(j) / static_cast<double>(k) * r.c_[j] *
             a.c_[k - j];
      }
      r.c_[k] = s / a.c_[0];
    }
    return r;
  }

  /// Integer power; negative exponents divide.
  friend Jet pow(const Jet& a, int n) {
    Jet r(1.0);
    for (int i = 0; i < std::abs(n); ++i) r = r * a;
    return n < 0 ? Jet(1.0) / r : r;
  }

 private:
  std::array<double, kJetOrder + 1> c_{};
};

}  // namespace oracle
