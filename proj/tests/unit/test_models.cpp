#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "helpers.hpp"
#include "nlqm/dsl.hpp"
#include "nlqm/error.hpp"
#include "nlqm/models.hpp"
#include "nlqm/states.hpp"

using namespace nlqm;

namespace {

// Pointwise comparison of two densities on a state.
double density_gap(const ModelSpec& a, const ModelSpec& b, const MadelungField& s) {
  const ScalarField fa = evaluate(a.density(), a.params, s);
  const ScalarField fb = evaluate(b.density(), b.params, s);
  return testing::max_diff(fa.values(), fb.values());
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("catalog lists the fourteen models with their flags") {
  const std::vector<ModelSpec> c = catalog();
  REQUIRE(c.size() == 14);
  const std::vector<std::string> names{
      "linear", "toy", "staruszkiewicz", "bbm", "dg_restricted", "phase_power",
      "homogeneous_general", "q1", "q2", "q3", "lstar", "cubic", "nonhom_phase",
      "nonhom_amp"};
  CHECK(catalog_names() == names);
  std::set<std::string> flagged;
  for (const ModelSpec& m : c) {
    if (m.homogeneous_class) flagged.insert(m.name);
  }
  const std::set<std::string> expected{"linear", "dg_restricted", "phase_power",
                                       "homogeneous_general", "q1", "lstar"};
  CHECK(flagged == expected);
}

TEST_CASE("densities have the documented text") {
  CHECK(linear_model().density().is_number(0));
  CHECK(toy().density() == parse("a*dS^2 + b*(dR/R)^2"));
  CHECK(staruszkiewicz().density() == parse("0.5*c*ddS^2"));
  CHECK(bbm().density() == parse("c1*R^2*(ln(c2*R^2) - 1)"));
  CHECK(dg_restricted().density() == parse("c1*R^2*ddS"));
  CHECK(cubic().density() == parse("R^4"));
  CHECK(lstar().density() == parse("(a1*dS^2 + a2*ddS)*(R^2 + b1*dR^2 + b2*ddR^2)"));
}

TEST_CASE("shape parameters expand into literal exponents") {
  const Grid g = default_grid();
  const MadelungField s = reference_gaussian(g);
  CHECK(density_gap(q1(0.1, 3), custom_model("x", "b1*(dR/R)^6*R^2", {{"b1", 0.1}}), s) < 1e-12);
  CHECK(density_gap(phase_power(0.1, 4), custom_model("x", "c1*R^2*ddS^4", {{"c1", 0.1}}), s) <
        1e-15);
  CHECK(density_gap(nonhom_amp(0.1, 3), custom_model("x", "c*R^5", {{"c", 0.1}}), s) < 1e-15);
  CHECK(q3(0.1, 2, 1).shape.at("m") == 2);
}

TEST_CASE("special cases coincide") {
  const Grid g = default_grid();
  for (const MadelungField& s : {reference_gaussian(g), gaussian({1.3, 0.4, -0.2, 0.3}, g)}) {
    CHECK(density_gap(phase_power(0.2, 1), dg_restricted(0.2), s) < 1e-15);
    HomogeneousParams p;
    p.b0 = 2.0;
    p.b1 = 0.0;
    p.a1 = 0.0;
    p.a2 = 0.05;
    p.a3 = 0.0;
    p.n2 = 3;
    CHECK(density_gap(homogeneous_general(p), phase_power(0.1, 3), s) < 1e-14);
    // q1 keeps the R^2 weight that toy's b term lacks.
    CHECK(density_gap(q1(0.07, 1), custom_model("x", "R^2*(a*dS^2 + b*(dR/R)^2)",
                                                {{"a", 0.0}, {"b", 0.07}}), s) < 1e-12);
    CHECK(density_gap(q1(0.07, 1), toy(0.0, 0.07), s) > 1e-3);
  }
}

TEST_CASE("invalid parameter domains are rejected") {
  CHECK_THROWS_AS(phase_power(0.1, -1), ConfigError);
  CHECK_THROWS_AS(q2(0.1, -2), ConfigError);
  CHECK_THROWS_AS(make_model("phase_power", {{"n", 2.5}}), ConfigError);
  CHECK_THROWS_AS(make_model("nope"), ConfigError);
  CHECK_THROWS_AS(make_model("toy", {{"zeta", 1.0}}), ConfigError);
  CHECK_THROWS_AS(make_model("cubic", {}, "a1*dS"), ConfigError);
  CHECK_THROWS_AS(lstar("R*dS"), ConfigError);
  CHECK_THROWS_AS(lstar("b1*dS", {{"b1", 1.0}}), ConfigError);
  CHECK_THROWS_AS(custom_model("c", "k*R^2", {}), ConfigError);
  CHECK_THROWS_AS(custom_model("c", "R^", {}), ParseError);
}

TEST_CASE("make_model applies overrides") {
  const ModelSpec m = make_model("bbm", {{"c1", 0.5}});
  CHECK(m.params.at("c1") == 0.5);
  CHECK(m.params.at("c2") == 1.0);
  const ModelSpec p = make_model("phase_power", {{"n", 3}});
  CHECK(p.shape.at("n") == 3);
  const ModelSpec l = make_model("lstar", {{"g", 0.3}, {"b2", 0.1}}, "g*dS^4");
  CHECK(l.params.at("g") == 0.3);
  CHECK_FALSE(l.homogeneous_class);
  CHECK_THROWS_AS(make_model("lstar", {}, "g*dS^4"), ConfigError);
  for (const std::string& name : catalog_names()) {
    CHECK(make_model(name).density() == [&] {
      for (const ModelSpec& c : catalog()) {
        if (c.name == name) return c.density();
      }
      return DensityExpr();
    }());
  }
}

TEST_CASE("validate examples") {
  const ValidationReport lin = validate(linear_model());
  CHECK(lin.ok);
  CHECK(lin.homogeneity_defect == 0.0);
  CHECK(lin.flag_matches);

  const ValidationReport b = validate(bbm());
  CHECK(b.ok);
  CHECK_FALSE(b.measured_homogeneous);
  CHECK(b.homogeneity_defect > 0.0);
  CHECK(b.flag_matches);

  const ValidationReport pp = validate(phase_power(0.1, 2));
  CHECK(pp.ok);
  CHECK(pp.homogeneity_defect < 1e-10);
  CHECK(pp.flag_matches);

  const ValidationReport bad = validate(custom_model("bad", "1/(R - R)", {}));
  CHECK_FALSE(bad.ok);
  CHECK(bad.message.find("bad") != std::string::npos);
}

TEST_CASE("property: every catalog model validates on the reference state") {
  for (const ModelSpec& m : catalog()) {
    CAPTURE(m.name);
    const ValidationReport r = validate(m);
    CHECK(r.ok);
    if (m.homogeneous_class) CHECK(r.flag_matches);
  }
}

TEST_CASE("property: random overrides stay in the declared domain") {
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> coef(0.01, 0.5);
  std::uniform_int_distribution<int> power(0, 3);
  const Grid g = default_grid();
  const MadelungField s = reference_gaussian(g);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelSpec m = make_model("homogeneous_general",
                                   {{"b0", coef(rng)}, {"b1", coef(rng)}, {"a1", coef(rng)},
                                    {"a2", coef(rng)}, {"a3", coef(rng)},
                                    {"n1", double(power(rng))}, {"n2", double(power(rng))},
                                    {"n3", double(power(rng))}, {"n4", double(power(rng))}});
    CHECK(m.homogeneous_class);
    CHECK_NOTHROW(evaluate(m.density(), m.params, s));
  }
}

}  // TEST_SUITE
