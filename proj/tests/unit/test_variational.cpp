#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "nlqm/energy.hpp"
#include "nlqm/error.hpp"
#include "nlqm/models.hpp"
#include "nlqm/states.hpp"
#include "nlqm/variational.hpp"
#include "oracles.hpp"

using namespace nlqm;
using testing::max_diff;

namespace {

// Worst |got - want| / (1 + |want|) over nodes with rho >= level * max rho.
double worst_on_support(const ScalarField& got, const std::function<double(double)>& want,
                        const MadelungField& state, double level = 1e-2) {
  const ScalarField rho = state.rho();
  const double peak = rho.max_abs();
  double worst = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    if (rho[j] < level * peak) continue;
    const double w = want(state.grid().x(j));
    worst = std::max(worst, std::abs(got[j] - w) / (1 + std::abs(w)));
  }
  return worst;
}

std::vector<oracle::AnalyticState> smooth_states() {
  return {oracle::gaussian(1.0, 0.0, 0.3, 0.1), oracle::gaussian(1.3, 0.4, -0.5, 0.25),
          oracle::coherent(1.0, 0.3, 1.0, 1.0, 0.7), oracle::gaussian(0.8, -0.6, 0.2, -0.3)};
}

// A catalog model whose fields would vanish identically on quadratic phases
// gets a non-trivial exponent so the comparison is not vacuous.
std::vector<ModelSpec> models_under_test() {
  std::vector<ModelSpec> ms = catalog();
  ms.push_back(q1(0.1, 2));
  ms.push_back(q2(0.1, 1));
  ms.push_back(q3(0.1, 1, 1));
  ms.push_back(lstar("a1*dS^2 + a2*ddS", {{"a1", 0.1}, {"a2", 0.1}}, 0.1, 0.2));
  ms.push_back(phase_power(0.1, 3));
  ms.push_back(nonhom_phase(0.1, 3));
  return ms;
}

}  // namespace

TEST_SUITE("variational") {

TEST_CASE("a*dS^2 has dL/dS = -2a S''") {
  const Grid g = default_grid();
  const MadelungField s = reference_gaussian(g);
  const ScalarField got = el_derivative(parse("a*dS^2"), Field::S, {{"a", 0.1}}, s);
  // S = 0.3x + 0.05x^2, so S'' = 0.1 everywhere.
  CHECK(max_diff(got, [](double) { return -0.02; }) < 1e-10);
}

TEST_CASE("0.5*c*ddS^2 has dL/dS = c S''''") {
  // A short domain keeps |S| small: roundoff in S'''' grows like |S|/dx^4.
  const Grid g = make_grid(-6, 6, 769);
  const oracle::AnalyticState a{
      [](const oracle::Jet& x) { return exp(-0.5 * x * x); },
      [](const oracle::Jet& x) { return 0.2 * x * x * x * x / 24.0 + 0.1 * x * x * x; }};
  const MadelungField s = testing::sample(a, g);
  const ScalarField got = el_derivative(parse("0.5*c*ddS^2"), Field::S, {{"c", 0.2}}, s);
  // S'''' = 0.2, so c S'''' = 0.04 (up to truncation of the repeated stencil).
  CHECK(max_diff(got, [](double) { return 0.04; }, 4) < 1e-6);
}

TEST_CASE("q1 with m = 1 reproduces -2 b1 R''") {
  const Grid g = default_grid();
  const auto a = oracle::gaussian(1.1, 0.2, 0.3, 0.1);
  const MadelungField s = testing::sample(a, g);
  const ScalarField got = el_derivative(q1(0.1, 1), Field::R, s);
  auto want = [&](double x) { return -0.2 * oracle::slots_at(a, x).ddR.value(); };
  CHECK(max_diff(got, want, 2) < 1e-6);
}

TEST_CASE("EL derivatives agree with the hand-derived oracle") {
  const Grid g = default_grid();
  for (const ModelSpec& m : models_under_test()) {
    const oracle::OracleModel om = testing::oracle_for(m);
    for (const auto& a : smooth_states()) {
      CAPTURE(m.name);
      const MadelungField s = testing::sample(a, g);
      const ScalarField dR = el_derivative(m, Field::R, s);
      const ScalarField dS = el_derivative(m, Field::S, s);
      CHECK(worst_on_support(dR, [&](double x) { return oracle::el_R(om, a, x); }, s) < 1e-5);
      CHECK(worst_on_support(dS, [&](double x) { return oracle::el_S(om, a, x); }, s) < 1e-5);
    }
  }
}

TEST_CASE("gateaux examples") {
  const Grid g = default_grid();
  const MadelungField s = reference_gaussian(g);
  for (const std::size_t j : probe_nodes(s)) {
    CHECK(std::abs(gateaux(parse("R^2"), {}, Field::R, s, j) - 2 * s.R()[j]) < 1e-6);
  }
  const MadelungField plane(s.R(), ScalarField::sample(g, [](double x) { return 0.5 * x; }));
  for (const std::size_t j : probe_nodes(plane)) {
    CHECK(std::abs(gateaux(parse("a*dS^2"), {{"a", 0.1}}, Field::S, plane, j)) < 1e-5);
  }
}

TEST_CASE("probe nodes stay inside the support") {
  const Grid g = default_grid();
  const MadelungField s = reference_gaussian(g);
  const auto nodes = probe_nodes(s);
  REQUIRE(nodes.size() == 5);
  const ScalarField rho = s.rho();
  for (const std::size_t j : nodes) {
    CHECK(j >= 3);
    CHECK(j + 3 < g.n());
    CHECK(rho[j] >= 1e-2 * rho.max_abs());
  }
}

TEST_CASE("property: gateaux oracle agrees with el_derivative") {
  const Grid g = default_grid();
  const MadelungField s = reference_gaussian(g);
  for (const ModelSpec& m : catalog()) {
    CAPTURE(m.name);
    const DensityExpr e = m.density();
    for (const Field f : {Field::R, Field::S}) {
      const ScalarField el = el_derivative(m, f, s);
      for (const std::size_t j : probe_nodes(s)) {
        // A nodal bump moves R'' by about eps/dx^2, and q3 couples R'' with
        // R and R', so its eps^2 error constant is huge; it needs a smaller bump.
        const double eps = m.name == "q3" ? 1e-6 : 1e-5;
        const double gx = gateaux(e, m.params, f, s, j, eps);
        CHECK(std::abs(el[j] - gx) / (1 + std::abs(el[j])) < 1e-3);
      }
    }
  }
}

TEST_CASE("property: gateaux error shrinks like eps^2") {
  const Grid g = default_grid();
  const MadelungField s = reference_gaussian(g);
  const ModelSpec m = q3();
  const DensityExpr e = m.density();
  const ScalarField el = el_derivative(m, Field::R, s);
  for (const std::size_t j : probe_nodes(s)) {
    const double coarse = gateaux(e, m.params, Field::R, s, j, 2e-3) - el[j];
    const double fine = gateaux(e, m.params, Field::R, s, j, 1e-3) - el[j];
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.01));
  }
}

TEST_CASE("property: el_derivative is linear in the density") {
  std::mt19937 rng(31);
  const Grid g = default_grid();
  const MadelungField s = reference_gaussian(g);
  const std::vector<ModelSpec> ms = catalog();
  std::uniform_int_distribution<std::size_t> pick(0, ms.size() - 1);
  for (int trial = 0; trial < 15; ++trial) {
    const ModelSpec& a = ms[pick(rng)];
    const ModelSpec& b = ms[pick(rng)];
    ParamBindings both = a.params;
    both.insert(b.params.begin(), b.params.end());
    if (both.size() != a.params.size() + b.params.size()) continue;
    for (const Field f : {Field::R, Field::S}) {
      const ScalarField sum = el_derivative(a.density() + b.density(), f, both, s);
      const ScalarField parts = el_derivative(a, f, s) + el_derivative(b, f, s);
      double scale = 1.0;
      for (std::size_t j = 0; j < g.n(); ++j) scale = std::max(scale, std::abs(parts[j]));
      CHECK(testing::max_diff(sum.values(), parts.values()) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("property: densities without phase slots have zero dL/dS") {
  const Grid g = default_grid();
  const MadelungField s = reference_gaussian(g);
  for (const ModelSpec& m : catalog()) {
    const DensityExpr e = m.density();
    if (e.references(Slot::S) || e.references(Slot::dS) || e.references(Slot::ddS)) continue;
    CAPTURE(m.name);
    CHECK(el_derivative(m, Field::S, s).max_abs() == 0.0);
  }
  CHECK(el_derivative(parse("0.5*c*ddS^2"), Field::R, {{"c", 0.2}}, s).max_abs() == 0.0);
}

TEST_CASE("h_nl examples") {
  const Grid g = default_grid();
  const MadelungField ref = reference_gaussian(g);
  const HamiltonianField lin = h_nl(linear_model(), ref);
  CHECK(lin.re.max_abs() == 0.0);
  CHECK(lin.im.max_abs() == 0.0);

  const MadelungField coh = coherent({1.0, 0.0, 1.0, 1.0, 0.4}, g);
  // A linear phase gives dL/dS = 0 up to stencil roundoff, which im divides
  // by R^2; the far tail is therefore excluded from the pointwise bound.
  CHECK(el_derivative(toy(0.1, 0.0), Field::S, coh).max_abs() < 1e-10);
  const HamiltonianField t = h_nl(toy(0.1, 0.0), coh);
  const ScalarField crho = coh.rho();
  double tail_free = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    if (t.valid[j] && crho[j] >= 1e-4 * crho.max_abs()) {
      tail_free = std::max(tail_free, std::abs(t.im[j]));
    }
  }
  CHECK(tail_free < 1e-6);

  const MadelungField chirp = gaussian({1.0, 0.0, 0.0, 0.2}, g);
  const HamiltonianField st = h_nl(staruszkiewicz(0.2), chirp);
  // S'''' vanishes for a quadratic phase; the roundoff of the repeated
  // stencil is divided by R^2, so only the well-populated region is checked.
  const ScalarField rho = chirp.rho();
  double worst = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    if (st.valid[j] && rho[j] >= 1e-2 * rho.max_abs()) worst = std::max(worst, std::abs(st.im[j]));
  }
  CHECK(worst < 1e-5);
  CHECK(el_derivative(staruszkiewicz(0.2), Field::S, chirp).max_abs() < 1e-6);
}

TEST_CASE("h_nl real part is (1/2R) dL/dR") {
  const Grid g = default_grid();
  const auto a = oracle::gaussian(1.0, 0.0, 0.3, 0.1);
  const MadelungField s = testing::sample(a, g);
  const ModelSpec m = bbm(0.3, 1.0);
  const HamiltonianField h = h_nl(m, s);
  // For this density (1/2R) dL/dR = c1 ln(c2 rho).
  double worst = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    if (!h.valid[j]) continue;
    const double rho = s.R()[j] * s.R()[j];
    if (rho < 1e-8) continue;
    worst = std::max(worst, std::abs(h.re[j] - 0.3 * std::log(rho)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("h_se examples") {
  const Grid g = default_grid();
  const MadelungField ground = sho_ground(1.0, 1.0, g);
  const ScalarField V = sho_potential(g);
  const HamiltonianField h = h_se(ground, V);
  const ScalarField rho = ground.rho();
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    if (!h.valid[j] || rho[j] < 1e-8) continue;
    re = std::max(re, std::abs(h.re[j] - 0.5));
    im = std::max(im, std::abs(h.im[j]));
  }
  CHECK(re < 1e-5);
  CHECK(im < 1e-12);

  const double k = 0.7;
  const auto a = oracle::gaussian(1.0, 0.3, k, 0.0);
  const MadelungField plane = testing::sample(a, g);
  const HamiltonianField hp = h_se(plane, ScalarField(g));
  const ScalarField prho = plane.rho();
  double worst = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    if (!hp.valid[j] || prho[j] < 1e-8) continue;
    const oracle::Slots q = oracle::slots_at(a, g.x(j));
    const double R = q.R.value();
    const double want = k * (2 * R * q.dR.value()) / (2 * R * R);
    worst = std::max(worst, std::abs(hp.im[j] - want));
  }
  CHECK(worst < 1e-5);

  // Constant amplitude and phase: only the potential survives.
  const Grid box = make_grid(-1, 1, 41);
  const MadelungField flat(ScalarField::sample(box, [](double) { return 1.0; }), ScalarField(box));
  const ScalarField Vb = ScalarField::sample(box, [](double x) { return 1 + x; });
  CHECK(testing::max_diff(h_se(flat, Vb).re.values(), Vb.values()) < 1e-12);
}

TEST_CASE("support and underflow") {
  const std::vector<double> R{0, 1e-5, 1, 2, 1, 1e-5, 0};
  const auto [first, last] = support(R, 1e-12);
  CHECK(first == 1);
  CHECK(last == 5);
  const std::vector<double> hole{1e-5, 1, 0, 1, 1e-5};
  CHECK_THROWS_AS(support(hole, 1e-12), AmplitudeUnderflow);
  CHECK_THROWS_AS(support(std::vector<double>(5, 0.0), 1e-12), NumericError);
}

TEST_CASE("property: SHO ground state is an eigenstate of h_se") {
  const Grid g = default_grid();
  for (const double omega : {0.5, 1.0, 2.0}) {
    for (const double mass : {0.5, 1.0, 3.0}) {
      CAPTURE(omega);
      CAPTURE(mass);
      const MadelungField s = sho_ground(omega, mass, g);
      const HamiltonianField h = h_se(s, sho_potential(g, omega, mass), mass);
      const ScalarField rho = s.rho();
      double worst = 0.0;
      for (std::size_t j = 0; j < g.n(); ++j) {
        if (h.valid[j] && rho[j] >= 1e-6 * rho.max_abs()) {
          worst = std::max(worst, std::abs(h.re[j] - 0.5 * omega));
        }
      }
      CHECK(worst < 1e-5);
      CHECK(h.im.max_abs() < 1e-12);
    }
  }
}

}  // TEST_SUITE
