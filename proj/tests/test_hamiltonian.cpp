#include <doctest.h>

#include "covfield/errors.hpp"
#include "covfield/hamiltonian.hpp"
#include "covfield/parser.hpp"
#include "support/oracles.hpp"

using namespace covfield;
using namespace covfield::symexpr;
using namespace covfield::geometry;
using namespace covfield::covham;
using covfield::testing::random_int;
using covfield::testing::random_polynomial_avoiding;

namespace {

ChartPtr y1() {
  static ChartPtr c = make_fibred_chart({"x"}, {"y"});
  return c;
}
ChartPtr pi1() {
  static ChartPtr c = legendre_bundle_chart(y1());
  return c;
}
ChartPtr z1() {
  static ChartPtr c = homogeneous_chart(y1());
  return c;
}

Scalar P(const std::string& t) { return parse_scalar(t, pi1()); }
Scalar Z(const std::string& t) { return parse_scalar(t, z1()); }

Scalar oscillator() { return P("(mom(y,x)^2 + y^2)/2"); }

// random polynomial without pp, for probes and Hamiltonians on z
Scalar random_momentum_function(const ChartPtr& chart) {
  std::vector<int> avoid;
  if (chart->find_pp() >= 0) avoid.push_back(chart->find_pp());
  return random_polynomial_avoiding(chart, avoid);
}

}  // namespace

TEST_CASE("canonical forms render to their normal form") {
  CHECK(render_form(liouville_form(z1())) == "pp*d(x) + mom(y,x)*d(y)");
  CHECK(render_form(multisymplectic_form(z1())) ==
        "-d(x)∧d(pp) - d(y)∧d(mom(y,x))");
  CHECK(render_tvf(polysymplectic_form(pi1())) ==
        "(-d(x)∧d(y)∧d(mom(y,x)))⊗∂(x)");
}

TEST_CASE("multisymplectic form is the differential of the canonical form") {
  for (int n : {1, 2, 3}) {
    for (int m : {1, 2}) {
      std::vector<std::string> base, fiber;
      for (int i = 0; i < n; ++i) base.push_back("x" + std::to_string(i));
      for (int i = 0; i < m; ++i) fiber.push_back("y" + std::to_string(i));
      ChartPtr z = homogeneous_chart(make_fibred_chart(base, fiber));
      CHECK(equal_forms(exterior_derivative(liouville_form(z)),
                        multisymplectic_form(z)));
      CHECK(exterior_derivative(multisymplectic_form(z)).is_zero());
    }
  }
}

TEST_CASE("hamiltonian form splits the canonical form through the section") {
  Scalar h = oscillator();
  CHECK(render_form(hamiltonian_form(h)) ==
        "(-1/2*y^2 - 1/2*mom(y,x)^2)*d(x) + mom(y,x)*d(y)");
  CHECK(render_form(multisymplectic_hamiltonian_density(h)) ==
        "(1/2*y^2 + 1/2*mom(y,x)^2 + pp)*d(x)");
  DiffForm direct =
      (Scalar::coordinate(z1(), z1()->find_pp()) + embed(h, z1())) *
      volume_form(z1());
  CHECK(equal_forms(direct, multisymplectic_hamiltonian_density(h)));
}

TEST_CASE("legendre map differentiates the lagrangian by the jets") {
  ChartPtr j1 = j1_chart(y1());
  Scalar lag = parse_scalar("(jet(y,x)^2 - y^2)/2", j1);
  auto mom = legendre_map(lag);
  REQUIRE(mom.size() == 1);
  CHECK(equals(mom.begin()->second, parse_scalar("jet(y,x)", j1)));
}

TEST_CASE("bracket pairings") {
  CHECK(equals(vertical_bracket(P("mom(y,x)"), P("y")), P("1")));
  CHECK(equals(vertical_bracket(P("y"), P("mom(y,x)")), P("-1")));
  CHECK(equals(canonical_bracket(Z("pp"), Z("x")), Z("1")));
  CHECK(equals(canonical_bracket(Z("mom(y,x)"), Z("y")), Z("1")));
  // base coordinates are central for the vertical bracket
  for (int i = 0; i < 10; ++i)
    CHECK(vertical_bracket(random_momentum_function(pi1()), P("x")).is_zero());
}

TEST_CASE("brackets satisfy antisymmetry, Leibniz and Jacobi") {
  for (int i = 0; i < 25; ++i) {
    Scalar f = random_momentum_function(z1());
    Scalar g = random_momentum_function(z1());
    Scalar k = random_momentum_function(z1());
    CHECK(equals(canonical_bracket(f, g), -canonical_bracket(g, f)));
    CHECK(equals(canonical_bracket(f, g * k),
                 canonical_bracket(f, g) * k + g * canonical_bracket(f, k)));
    Scalar jac = canonical_bracket(f, canonical_bracket(g, k)) +
                 canonical_bracket(g, canonical_bracket(k, f)) +
                 canonical_bracket(k, canonical_bracket(f, g));
    CHECK(jac.is_zero());
  }
}

TEST_CASE("canonical bracket restricts to the vertical bracket off pp") {
  for (int i = 0; i < 15; ++i) {
    Scalar f = random_momentum_function(pi1());
    Scalar g = random_momentum_function(pi1());
    CHECK(equals(canonical_bracket(embed(f, z1()), embed(g, z1())),
                 embed(vertical_bracket(f, g), z1())));
  }
}

TEST_CASE("hamiltonian vector fields invert the multisymplectic pairing") {
  CHECK(render_multivector(hamiltonian_vector_field(Z("x"))) ==
        "-∂(pp)");
  CHECK(render_multivector(hamiltonian_vector_field(Z("pp"))) == "∂(x)");
  DiffForm om = multisymplectic_form(z1());
  for (int i = 0; i < 10; ++i) {
    Scalar f = covfield::testing::random_polynomial(z1());
    MultiVector th = hamiltonian_vector_field(f);
    DiffForm lhs = contract(th, om);
    DiffForm rhs = Scalar::from_int(z1(), -1) * exterior_derivative(
                                                    DiffForm::function(f));
    CHECK(equal_forms(lhs, rhs));
  }
}

TEST_CASE("connection solver fixes the fibre directions and frees pp") {
  Scalar h = oscillator();
  ConnectionFamily fam = solve_hamiltonian_connection(h);
  CHECK(fam.free_dimension() == 1);
  REQUIRE(fam.params.size() == 1);
  CHECK(fam.params[0].first == z1()->find_pp());
  Connection g0 = fam.instantiate_constant(0);
  CHECK(equals(g0.coefficient(z1()->find_name("y"), 0), Z("mom(y,x)")));
  CHECK(equals(g0.coefficient(z1()->find_name("mom(y,x)"), 0), Z("-y")));

  // every member pairs to the hamiltonian density under the structure form
  DiffForm om = multisymplectic_form(z1());
  DiffForm dx = DiffForm::d_coordinate(z1(), 0);
  for (long fill : {0L, 1L, -2L}) {
    MultiVector lift = connection_to_nvector(fam.instantiate(
        {Scalar::from_int(z1(), fill)}));
    DiffForm paired = wedge(dx, contract(lift, om));
    CHECK(equal_forms(paired, exterior_derivative(
                                  multisymplectic_hamiltonian_density(h))));
  }
}

TEST_CASE("projection along the affine surjection recovers the polysymplectic connection") {
  for (int i = 0; i < 10; ++i) {
    Scalar h = random_momentum_function(pi1());
    ConnectionFamily fam = solve_hamiltonian_connection(h);
    ConnectionFamily pf = hamiltonian_connection_polysymplectic(h);
    CHECK(pf.free_dimension() == 0);
    Connection direct = pf.instantiate_constant(0);
    for (long fill : {0L, 5L})
      CHECK(equal_connections(
          project_zeta(fam.instantiate_constant(fill), pi1()), direct));
  }
}

TEST_CASE("polysymplectic families over wider bases keep trace freedom") {
  ChartPtr pi2 = legendre_bundle_chart(make_fibred_chart({"x0", "x1"}, {"y"}));
  Scalar h2 = parse_scalar("(mom(y,x0)^2 + mom(y,x1)^2 + y^2)/2", pi2);
  ConnectionFamily pf = hamiltonian_connection_polysymplectic(h2);
  CHECK(pf.free_dimension() == 3);
  Connection c = pf.instantiate_constant(0);
  CHECK(equals(c.coefficient(pi2->find_name("y"), 0),
               parse_scalar("mom(y,x0)", pi2)));
  CHECK(equals(c.coefficient(pi2->find_name("y"), 1),
               parse_scalar("mom(y,x1)", pi2)));
}

TEST_CASE("hamilton equations and the dynamic verdict") {
  auto eqs = hamilton_equations(oscillator());
  REQUIRE(eqs.size() == 2);
  CHECK(render_equation(eqs[0]) == "jet(y,x) = mom(y,x)");
  CHECK(render_equation(eqs[1]) == "jet(mom(y,x),x) = -y");
  auto v = is_dynamic_equation(eqs, j1_chart(pi1()));
  CHECK(v.dynamic);
  CHECK(v.freeJetDimension == 0);

  ChartPtr pi2 = legendre_bundle_chart(make_fibred_chart({"x0", "x1"}, {"y"}));
  Scalar h2 = parse_scalar("(mom(y,x0)^2 + mom(y,x1)^2 + y^2)/2", pi2);
  auto eqs2 = hamilton_equations(h2);
  REQUIRE(eqs2.size() == 3);
  auto v2 = is_dynamic_equation(eqs2, j1_chart(pi2));
  CHECK(!v2.dynamic);
  CHECK(v2.freeJetDimension == 3);
}

TEST_CASE("evolution identities hold for constant and varying densities") {
  Scalar h = oscillator();
  for (const char* rhoText : {"1", "2", "1 + x^2"}) {
    Scalar rho = parse_scalar(rhoText, y1());
    auto ev = evolution_operator_homogeneous(h, P("y"), rho);
    CHECK(ev.gammaIndependent);
    CHECK(ev.matchesCanonicalBracket);
    CHECK(ev.matchesWeightedBracket);
    CHECK(equals(ev.form.comps[0], Z("mom(y,x)")));
  }
  // the hamiltonian density is conserved along its own dynamics
  auto ev = evolution_operator_homogeneous(h, embed(h, z1()),
                                           parse_scalar("1", y1()));
  CHECK(ev.form.comps[0].is_zero());
}

TEST_CASE("vertical and homogeneous evolution routes agree") {
  for (int i = 0; i < 10; ++i) {
    Scalar h = random_momentum_function(pi1());
    Scalar f = random_momentum_function(pi1());
    auto vertical = evolution_operator_vertical(h, f);
    auto homog = evolution_operator_homogeneous(h, f, parse_scalar("1", y1()));
    CHECK(homog.gammaIndependent);
    CHECK(equals(embed(vertical.comps[0], z1()), homog.form.comps[0]));
  }
}

TEST_CASE("jet route evolution is a function operator only over a line") {
  Scalar h = oscillator();
  Scalar f = P("x*mom(y,x) + y^2");
  auto pe = evolution_operator_legendre(h, f);
  CHECK(pe.isFunctionOperator);
  CHECK(pe.residualJets.empty());
  auto vertical = evolution_operator_vertical(h, f);
  CHECK(equals(pe.form.comps[0], embed(vertical.comps[0], j1_chart(pi1()))));

  ChartPtr pi2 = legendre_bundle_chart(make_fibred_chart({"x0", "x1"}, {"y"}));
  Scalar h2 = parse_scalar("(mom(y,x0)^2 + mom(y,x1)^2 + y^2)/2", pi2);
  auto pe2 = evolution_operator_legendre(h2, parse_scalar("mom(y,x0)", pi2));
  CHECK(!pe2.isFunctionOperator);
  CHECK(!pe2.residualJets.empty());
  ChartPtr j12 = j1_chart(pi2);
  CHECK(equals(pe2.form.comps[0],
               parse_scalar("-y - jet(mom(y,x1),x1)", j12)));
  CHECK(equals(pe2.form.comps[1], parse_scalar("jet(mom(y,x0),x1)", j12)));
  // fibre functions still evolve functionally
  CHECK(evolution_operator_legendre(h2, parse_scalar("y", pi2))
            .isFunctionOperator);
}

TEST_CASE("energy of a weighted density steers the pp direction") {
  Scalar h = oscillator();
  Scalar rho = parse_scalar("x", y1());
  Scalar e = energy_function(rho, h);
  CHECK(equals(e, Z("(pp + mom(y,x)^2/2 + y^2/2)/x")));
  ConnectionFamily fam = solve_hamiltonian_connection(h);
  auto hc = horizontality_check(hamiltonian_vector_field(e), fam, rho);
  CHECK(hc.horizontal);
  REQUIRE(hc.assignment.size() == 1);
  CHECK(hc.assignment[0].first == fam.param_name(0));
  CHECK(equals(hc.assignment[0].second, Z("-x") * diff(e, 0)));
  CHECK(equals(hc.assignment[0].second, Z("(pp + mom(y,x)^2/2 + y^2/2)/x")));
  // fields transverse to the family are rejected
  auto bad = horizontality_check(hamiltonian_vector_field(Z("y")), fam, rho);
  CHECK(!bad.horizontal);
}

TEST_CASE("multivector reduction meets its degree obstruction") {
  Scalar h = oscillator();
  DiffForm sigma = multisymplectic_hamiltonian_density(h);
  auto r = solve_hamiltonian_multivector(sigma, multisymplectic_form(z1()));
  CHECK(r.status == MultivectorSolve::Status::DegreeObstruction);
  CHECK(r.requiredDegree == 0);
}

TEST_CASE("multivector reduction of functions returns hamiltonian fields") {
  for (int i = 0; i < 10; ++i) {
    Scalar f = covfield::testing::random_polynomial(z1());
    auto r = solve_hamiltonian_multivector(DiffForm::function(f),
                                           multisymplectic_form(z1()));
    REQUIRE(r.status == MultivectorSolve::Status::Solved);
    MultiVector want =
        Scalar::from_int(z1(), -1) * hamiltonian_vector_field(f);
    CHECK(equal_multivectors(r.theta, want));
  }
}

TEST_CASE("multivector reduction over a plane: closed forms and dead ends") {
  ChartPtr z2 = homogeneous_chart(make_fibred_chart({"x0", "x1"}, {"y"}));
  auto Z2 = [&](const std::string& t) { return parse_scalar(t, z2); };
  DiffForm om2 = multisymplectic_form(z2);

  // exact one-forms produce the zero bivector
  DiffForm closed = DiffForm::zero(z2, 1);
  closed.add_term({z2->find_name("y")}, Z2("x0"));
  closed.add_term({0}, Z2("y"));
  auto r = solve_hamiltonian_multivector(closed, om2);
  REQUIRE(r.status == MultivectorSolve::Status::Solved);
  CHECK(r.requiredDegree == 1);
  CHECK(r.theta.is_zero());

  // a differential outside the image of the pairing is rejected
  DiffForm dead = DiffForm::zero(z2, 1);
  dead.add_term({z2->find_momentum(z2->find_name("y"), 0)}, Z2("pp"));
  CHECK(solve_hamiltonian_multivector(dead, om2).status ==
        MultivectorSolve::Status::InconsistentSystem);
}

TEST_CASE("one dimensional base is required where the theory demands it") {
  ChartPtr pi2 = legendre_bundle_chart(make_fibred_chart({"x0", "x1"}, {"y"}));
  Scalar h2 = parse_scalar("y", pi2);
  CHECK_THROWS_AS(vertical_bracket(h2, h2), Error);
  CHECK_THROWS_AS(solve_hamiltonian_connection(h2), Error);
}
