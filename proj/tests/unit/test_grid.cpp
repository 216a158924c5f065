#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "nlqm/error.hpp"
#include "nlqm/grid.hpp"
#include "nlqm/states.hpp"

using namespace nlqm;
using testing::max_diff;

TEST_SUITE("grid") {

TEST_CASE("make_grid spacing and nodes") {
  CHECK(default_grid().dx() == 0.015625);
  CHECK(make_grid(-16, 16, 2049).dx() == 0.015625);

  const Grid g = make_grid(0, 1, 5);
  const std::vector<double> expected{0, 0.25, 0.5, 0.75, 1};
  CHECK(g.nodes() == expected);
}

TEST_CASE("make_grid rejects bad shapes") {
  CHECK_THROWS_AS(make_grid(0, 1, 4), ConfigError);
  CHECK_THROWS_AS(make_grid(0, 1, 3), ConfigError);
  CHECK_THROWS_AS(make_grid(1, 1, 5), ConfigError);
  CHECK_THROWS_AS(make_grid(2, 1, 5), ConfigError);
}

TEST_CASE("fields check their length and amplitude sign") {
  const Grid g = make_grid(0, 1, 5);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(4, 0.0)), ConfigError);
  ScalarField R(g, {1, 1, -1, 1, 1});
  CHECK_THROWS_AS(MadelungField(R, ScalarField(g)), ConfigError);
  CHECK_THROWS_AS(MadelungField(ScalarField(g), ScalarField(make_grid(0, 2, 5))),
                  ConfigError);
}

TEST_CASE("deriv1 on constants, quadratics and sin") {
  for (const StencilOrder order : {StencilOrder::second, StencilOrder::fourth}) {
    const Grid g = make_grid(-3, 5, 257, order);
    CHECK(deriv1(ScalarField::sample(g, [](double) { return 4.2; })).max_abs() < 1e-12);
    const ScalarField d = deriv1(ScalarField::sample(g, [](double x) { return x * x; }));
    CHECK(max_diff(d, [](double x) { return 2 * x; }) < 1e-11);
  }
  const Grid g = make_grid(-16, 16, 2049, StencilOrder::second);
  const ScalarField d = deriv1(ScalarField::sample(g, [](double x) { return std::sin(x); }));
  CHECK(max_diff(d, [](double x) { return std::cos(x); }) < g.dx() * g.dx());
  const ScalarField d4 = deriv1(ScalarField::sample(default_grid(), [](double x) { return std::sin(x); }));
  CHECK(max_diff(d4, [](double x) { return std::cos(x); }) < 1e-7);
}

TEST_CASE("deriv2 on constants, quadratics and a Gaussian") {
  for (const StencilOrder order : {StencilOrder::second, StencilOrder::fourth}) {
    const Grid g = make_grid(-4, 4, 513, order);
    const ScalarField c = deriv2(ScalarField::sample(g, [](double) { return -1.5; }));
    CHECK(c.max_abs() < 1e-9);
    const ScalarField q = deriv2(ScalarField::sample(g, [](double x) { return x * x; }));
    CHECK(max_diff(q, [](double) { return 2.0; }, 1) < 1e-8);

    const ScalarField e = deriv2(ScalarField::sample(g, [](double x) { return std::exp(-x * x); }));
    CHECK(max_diff(e, [](double x) { return (4 * x * x - 2) * std::exp(-x * x); }) <
          g.dx() * g.dx());
  }
}

TEST_CASE("deriv4 on quartics, constants and sin") {
  const Grid g = make_grid(-2, 2, 257);
  const ScalarField q = deriv4(ScalarField::sample(g, [](double x) { return x * x * x * x; }));
  CHECK(max_diff(q, [](double) { return 24.0; }, 4) < 1e-4);
  CHECK(deriv4(ScalarField::sample(g, [](double) { return 3.0; })).max_abs() < 1e-6);

  const Grid d = default_grid();
  const ScalarField s = deriv4(ScalarField::sample(d, [](double x) { return std::sin(x); }));
  CHECK(max_diff(s, [](double x) { return std::sin(x); }, 4) < 1e-3);
}

TEST_CASE("integrate") {
  CHECK(integrate(ScalarField::sample(make_grid(0, 1, 5), [](double) { return 1.0; })) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(integrate(ScalarField::sample(make_grid(-2.5, 2.5, 101),
                                               [](double x) { return x; }))) < 1e-15);
  const double gauss = integrate(ScalarField::sample(default_grid(), [](double x) {
    return std::exp(-x * x) / std::sqrt(std::numbers::pi);
  }));
  CHECK(std::abs(gauss - 1.0) < 1e-12);
}

TEST_CASE("norm") {
  const Grid g = default_grid();
  const MadelungField ground = sho_ground(1.0, 1.0, g);
  CHECK(std::abs(norm(ground) - 1.0) < 1e-10);
  CHECK(norm(MadelungField(ScalarField(g), ScalarField(g))) == 0.0);
  const MadelungField doubled(ground.R() * 2.0, ground.S());
  CHECK(norm(doubled) == doctest::Approx(4.0 * norm(ground)).epsilon(1e-14));
}

TEST_CASE("decay check") {
  const Grid g = default_grid();
  CHECK(decays(sho_ground(1.0, 1.0, g)));
  const MadelungField flat(ScalarField::sample(g, [](double) { return 1.0; }), ScalarField(g));
  CHECK_FALSE(decays(flat));
  CHECK_THROWS_AS(require_decay(flat), DecayViolation);
}

TEST_CASE("property: stencils annihilate constants") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> value(-100, 100);
  for (int trial = 0; trial < 20; ++trial) {
    const double c = value(rng);
    for (const StencilOrder order : {StencilOrder::second, StencilOrder::fourth}) {
      const Grid g = make_grid(-1, 3, 65, order);
      const ScalarField f = ScalarField::sample(g, [c](double) { return c; });
      CHECK(testing::max_abs(deriv1(f).values(), 1) < 1e-11 * std::abs(c) + 1e-300);
      CHECK(testing::max_abs(deriv2(f).values(), 1) < 1e-9 * std::abs(c) + 1e-300);
    }
  }
}

TEST_CASE("property: Simpson is exact for cubics") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> coef(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng);
    const double lo = coef(rng), hi = lo + 1.0 + std::abs(coef(rng));
    const Grid g = make_grid(lo, hi, 2 * (trial % 7) + 5);
    auto F = [&](double x) { return a * x + b * x * x / 2 + c * x * x * x / 3 + d * x * x * x * x / 4; };
    const double got = integrate(ScalarField::sample(g, [&](double x) {
      return a + b * x + c * x * x + d * x * x * x;
    }));
    const double exact = F(hi) - F(lo);
    CHECK(got == doctest::Approx(exact).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("property: deriv2 is discretely self-adjoint on decaying fields") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> centre(-3, 3), width(0.7, 2.0);
  const Grid g = default_grid();
  for (int trial = 0; trial < 10; ++trial) {
    const double cf = centre(rng), wf = width(rng), cg = centre(rng), wg = width(rng);
    const ScalarField f = ScalarField::sample(g, [&](double x) {
      return std::exp(-(x - cf) * (x - cf) / wf) * std::cos(x);
    });
    const ScalarField h = ScalarField::sample(g, [&](double x) {
      return std::exp(-(x - cg) * (x - cg) / wg) * (1 + x);
    });
    const double lhs = integrate(hadamard(f, deriv2(h)));
    const double rhs = integrate(hadamard(h, deriv2(f)));
    CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(std::abs(lhs), 1e-3));
  }
}

TEST_CASE("property: integral of deriv1 is the boundary difference") {
  std::mt19937 rng(14);
  std::uniform_real_distribution<double> coef(-2, 2);
  const Grid g = make_grid(-3, 4, 1025);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = coef(rng), b = coef(rng), w = 1.0 + std::abs(coef(rng));
    const ScalarField f = ScalarField::sample(g, [&](double x) {
      return a * std::sin(w * x) + b * std::exp(-x * x);
    });
    const double got = integrate(deriv1(f));
    CHECK(std::abs(got - (f[g.n() - 1] - f[0])) < 1e-6);
  }
}

}  // TEST_SUITE
