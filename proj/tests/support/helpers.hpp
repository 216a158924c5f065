#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

#include "nlqm/grid.hpp"
#include "nlqm/models.hpp"
#include "oracles.hpp"

namespace testing {

/// max |a_j - b_j| over nodes [margin, n - margin).
inline double max_diff(std::span<const double> a, std::span<const double> b,
                       std::size_t margin = 0) {
  double m = 0.0;
  for (std::size_t j = margin; j + margin < a.size(); ++j) {
    m = std::max(m, std::abs(a[j] - b[j]));
  }
  return m;
}

/// max |f_j - g(x_j)| over nodes [margin, n - margin).
inline double max_diff(const nlqm::ScalarField& f,
                       const std::function<double(double)>& g,
                       std::size_t margin = 0) {
  double m = 0.0;
  const nlqm::Grid& grid = f.grid();
  for (std::size_t j = margin; j + margin < grid.n(); ++j) {
    m = std::max(m, std::abs(f[j] - g(grid.x(j))));
  }
  return m;
}

inline double max_abs(std::span<const double> a, std::size_t margin = 0) {
  double m = 0.0;
  for (std::size_t j = margin; j + margin < a.size(); ++j) {
    m = std::max(m, std::abs(a[j]));
  }
  return m;
}

/// The hand-written oracle for a catalog model with the same parameters.
inline oracle::OracleModel oracle_for(const nlqm::ModelSpec& m) {
  return oracle::model(m.name, m.params, m.shape);
}

/// Samples an analytic state onto a grid.
inline nlqm::MadelungField sample(const oracle::AnalyticState& s,
                                  const nlqm::Grid& g) {
  return {nlqm::ScalarField::sample(g, [&](double x) { return s.R(x).value(); }),
          nlqm::ScalarField::sample(g, [&](double x) { return s.S(x).value(); })};
}

}  // namespace testing
