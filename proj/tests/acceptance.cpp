// Acceptance suite: one line per criterion, every comparison exact.
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "covfield/commands.hpp"
#include "covfield/errors.hpp"
#include "covfield/globality.hpp"
#include "covfield/hamiltonian.hpp"
#include "covfield/parser.hpp"
#include "support/oracles.hpp"

using namespace covfield;
using namespace covfield::symexpr;
using namespace covfield::geometry;
using namespace covfield::covham;
using namespace covfield::testing;

namespace {

int failures = 0;

void criterion(int index, const std::string& name,
               const std::function<bool()>& body) {
  bool ok = false;
  std::string note;
  try {
    ok = body();
  } catch (const std::exception& e) {
    note = std::string(" [") + e.what() + "]";
  }
  std::cout << (ok ? "PASS" : "FAIL") << " " << index << ": " << name << note
            << "\n";
  if (!ok) ++failures;
}

ChartPtr fibred(int n, int m) {
  std::vector<std::string> base, fiber;
  for (int i = 0; i < n; ++i)
    base.push_back(n == 1 ? "x" : "x" + std::to_string(i));
  for (int i = 0; i < m; ++i)
    fiber.push_back(m == 1 ? "y" : "y" + std::to_string(i));
  return make_fibred_chart(base, fiber);
}

Scalar no_pp_polynomial(const ChartPtr& chart) {
  std::vector<int> avoid;
  if (chart->find_pp() >= 0) avoid.push_back(chart->find_pp());
  return random_polynomial_avoiding(chart, avoid);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// 1. The canonical structures close up: d Xi = Omega over a grid of chart
// sizes, the polysymplectic normal form over a line, and d after d vanishing
// on a batch of random forms.
bool canonical_structure() {
  for (int n : {1, 2, 3})
    for (int m : {1, 2}) {
      ChartPtr z = homogeneous_chart(fibred(n, m));
      if (!equal_forms(exterior_derivative(liouville_form(z)),
                       multisymplectic_form(z)))
        return false;
    }
  ChartPtr pi = legendre_bundle_chart(fibred(1, 1));
  if (render_tvf(polysymplectic_form(pi)) !=
      "(-d(x)∧d(y)∧d(mom(y,x)))⊗∂(x)")
    return false;
  ChartPtr z1 = homogeneous_chart(fibred(1, 1));
  ChartPtr z2 = homogeneous_chart(fibred(2, 1));
  for (int i = 0; i < 200; ++i) {
    const ChartPtr& chart = i % 2 == 0 ? z1 : z2;
    DiffForm a = random_form(chart, random_int(0, 2));
    if (!exterior_derivative(exterior_derivative(a)).is_zero()) return false;
  }
  return true;
}

// 2. The differential of any momentum function along the solved dynamics
// matches both bracket reformulations, for random Hamiltonians.
bool evolution_identity() {
  ChartPtr pi = legendre_bundle_chart(fibred(1, 1));
  ChartPtr z = homogeneous_chart(fibred(1, 1));
  Scalar one = Scalar::from_int(pi, 1);
  for (int i = 0; i < 25; ++i) {
    Scalar h = no_pp_polynomial(pi);
    Scalar f = no_pp_polynomial(pi);
    auto ev = evolution_operator_homogeneous(h, f, one);
    if (!ev.gammaIndependent || !ev.matchesCanonicalBracket ||
        !ev.matchesWeightedBracket)
      return false;
    auto vertical = evolution_operator_vertical(h, f);
    if (!equals(embed(vertical.comps[0], z), ev.form.comps[0])) return false;
  }
  return true;
}

// 3. Weighted densities reduce the dynamics to the energy bracket, with the
// connection freedom cancelling.
bool weighted_bracket_reduction() {
  ChartPtr y = fibred(1, 1);
  ChartPtr pi = legendre_bundle_chart(y);
  ChartPtr z = homogeneous_chart(y);
  Scalar h = parse_scalar("(mom(y,x)^2 + y^2)/2", pi);
  for (const std::string& rhoText :
       {std::string("1"), std::string("2"), std::string("1 + x^2")}) {
    Scalar rho = parse_scalar(rhoText, y);
    for (int i = 0; i < 5; ++i) {
      Scalar f = no_pp_polynomial(pi);
      auto ev = evolution_operator_homogeneous(h, f, rho);
      if (!ev.gammaIndependent || !ev.matchesWeightedBracket ||
          !ev.matchesCanonicalBracket)
        return false;
      // explicit route: rho {E, f} with E = (pp + h)/rho
      Scalar direct = substitute(rho, {}, z) *
                      canonical_bracket(energy_function(rho, h), embed(f, z));
      if (!equals(direct, ev.form.comps[0])) return false;
    }
  }
  return true;
}

// 4. Solving for connections on the homogeneous chart leaves exactly the pp
// direction free, and forgetting it reproduces the polysymplectic connection.
bool connection_solver() {
  ChartPtr pi = legendre_bundle_chart(fibred(1, 1));
  ChartPtr z = homogeneous_chart(fibred(1, 1));
  Scalar osc = parse_scalar("(mom(y,x)^2 + y^2)/2", pi);
  ConnectionFamily fam = solve_hamiltonian_connection(osc);
  if (fam.free_dimension() != 1 || fam.params.size() != 1) return false;
  if (fam.params[0].first != z->find_pp()) return false;
  Connection g0 = fam.instantiate_constant(0);
  if (!equals(g0.coefficient(z->find_name("y"), 0),
              parse_scalar("mom(y,x)", z)))
    return false;
  if (!equals(g0.coefficient(z->find_name("mom(y,x)"), 0),
              parse_scalar("-y", z)))
    return false;

  for (int i = 0; i < 10; ++i) {
    Scalar h = no_pp_polynomial(pi);
    ConnectionFamily f = solve_hamiltonian_connection(h);
    ConnectionFamily pf = hamiltonian_connection_polysymplectic(h);
    if (pf.free_dimension() != 0) return false;
    Connection direct = pf.instantiate_constant(0);
    for (long fill : {0L, 3L}) {
      if (!equal_connections(project_zeta(f.instantiate_constant(fill), pi),
                             direct))
        return false;
    }
    // defining property: dx wedge (lift . Omega) equals d((pp + h) dx)
    DiffForm dx = DiffForm::d_coordinate(z, 0);
    MultiVector lift = connection_to_nvector(f.instantiate_constant(1));
    DiffForm paired = wedge(dx, contract(lift, multisymplectic_form(z)));
    if (!equal_forms(paired, exterior_derivative(
                                 multisymplectic_hamiltonian_density(h))))
      return false;
  }
  return true;
}

// 5. The hamiltonian field of the energy of a weighted density is horizontal
// for the family after weighting, pinning the pp coefficient to -rho dE/dx.
bool energy_horizontality() {
  ChartPtr y = fibred(1, 1);
  ChartPtr pi = legendre_bundle_chart(y);
  ChartPtr z = homogeneous_chart(y);
  Scalar rho = parse_scalar("x", y);
  {
    Scalar h = parse_scalar("(mom(y,x)^2 + y^2)/2", pi);
    Scalar e = energy_function(rho, h);
    if (!equals(e, parse_scalar("(pp + mom(y,x)^2/2 + y^2/2)/x", z)))
      return false;
    auto hc = horizontality_check(hamiltonian_vector_field(e),
                                  solve_hamiltonian_connection(h), rho);
    if (!hc.horizontal || hc.assignment.size() != 1) return false;
    if (!equals(hc.assignment[0].second,
                parse_scalar("(pp + mom(y,x)^2/2 + y^2/2)/x", z)))
      return false;
  }
  for (int i = 0; i < 5; ++i) {
    Scalar h = no_pp_polynomial(pi);
    Scalar e = energy_function(rho, h);
    auto hc = horizontality_check(hamiltonian_vector_field(e),
                                  solve_hamiltonian_connection(h), rho);
    if (!hc.horizontal || hc.assignment.size() != 1) return false;
    Scalar want = -substitute(rho, {}, z) * diff(e, 0);
    if (!equals(hc.assignment[0].second, want)) return false;
  }
  return true;
}

// 6. The dynamic verdict across base dimensions, with the free jet dimension
// cross-checked against an independent rational rank computation.
bool dynamic_verdicts() {
  for (auto [n, m] : std::vector<std::pair<int, int>>{
           {1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 2}}) {
    ChartPtr pi = legendre_bundle_chart(fibred(n, m));
    // quadratic Hamiltonian: sum of squared momenta and fibres
    Scalar h = Scalar::zero(pi);
    for (int pos = 0; pos < pi->dim(); ++pos)
      if (!pi->is_base(pos))
        h = h + Scalar::coordinate(pi, pos) * Scalar::coordinate(pi, pos);
    auto eqs = hamilton_equations(h);
    ChartPtr j1 = j1_chart(pi);
    auto verdict = is_dynamic_equation(eqs, j1);

    // independent rank over the jet columns
    std::vector<int> jets;
    for (int pos = 0; pos < j1->dim(); ++pos)
      if (j1->coords[pos].role == CoordRole::Jet ||
          j1->coords[pos].role == CoordRole::Jet2)
        jets.push_back(pos);
    std::vector<std::vector<Rat>> matrix;
    for (const auto& eq : eqs) {
      Scalar residual = embed(eq.lhs, j1) - embed(eq.rhs, j1);
      std::vector<Rat> row;
      for (int pos : jets) {
        Scalar c = diff(residual, pos);
        if (!c.is_constant()) return false;  // jet-affine by construction
        row.push_back(c.constant_value());
      }
      matrix.push_back(row);
    }
    int rank = rank_oracle(matrix);
    int expectedFree = static_cast<int>(jets.size()) - rank;
    if (verdict.freeJetDimension != expectedFree) return false;
    if (verdict.dynamic != (expectedFree == 0)) return false;
    if (verdict.dynamic != (n == 1)) return false;
    if (n > 1 && verdict.freeJetDimension != m * (n * n - 1)) return false;
  }
  return true;
}

// 7. The two chart report: a base rescale splits the bracket part of the
// evolution while the full form, the paired density and the energy stay
// global; a base shift keeps everything global.
bool two_chart_globality() {
  ChartPtr yA = fibred(1, 1);
  ChartPtr yB = make_fibred_chart({"u"}, {"v"});
  ChartPtr pi = legendre_bundle_chart(yA);
  Scalar h = parse_scalar("(mom(y,x)^2 + y^2)/2", pi);
  Scalar probe = parse_scalar("y", pi);
  Scalar rho = parse_scalar("1", pi);

  auto build = [&](const std::string& fu, const std::string& ix) {
    Transition t = make_transition(yA, yB,
                                   {{0, parse_scalar(fu, yA)},
                                    {1, parse_scalar("y", yA)}},
                                   {{0, parse_scalar(ix, yB)},
                                    {1, parse_scalar("v", yB)}});
    return globality::make_atlas(
        t, {BundleKind::VstarY, BundleKind::TstarY});
  };

  auto rescale = globality::globality_report(h, probe, rho, build("2*x", "u/2"));
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"hamiltonian", "notGlobal"},      {"bracket-split", "notGlobal"},
      {"evolution-form", "global"},      {"pp-plus-H-function", "notGlobal"},
      {"pp-plus-H-density", "global"},   {"energy-function", "global"},
      {"unit-density", "no"},            {"rho-bracket-reduction", "yes"}};
  if (rescale.size() != expected.size()) return false;
  for (size_t i = 0; i < expected.size(); ++i)
    if (rescale[i].name != expected[i].first ||
        rescale[i].verdict != expected[i].second)
      return false;

  auto shift = globality::globality_report(h, probe, rho, build("x + 3", "u - 3"));
  for (const auto& e : shift)
    if (e.verdict != "global" && e.verdict != "yes") return false;
  return true;
}

// 8. Reduction of forms to multivectors: the degree obstruction on the
// extended density, the sign of the function reduction, and a one-form whose
// differential leaves the pairing's image.
bool reduction_obstructions() {
  ChartPtr z1 = homogeneous_chart(fibred(1, 1));
  ChartPtr pi = legendre_bundle_chart(fibred(1, 1));
  Scalar h = parse_scalar("(mom(y,x)^2 + y^2)/2", pi);
  auto blocked = solve_hamiltonian_multivector(
      multisymplectic_hamiltonian_density(h), multisymplectic_form(z1));
  if (blocked.status != MultivectorSolve::Status::DegreeObstruction ||
      blocked.requiredDegree != 0)
    return false;

  for (int i = 0; i < 10; ++i) {
    Scalar f = random_polynomial(z1);
    auto r = solve_hamiltonian_multivector(DiffForm::function(f),
                                           multisymplectic_form(z1));
    if (r.status != MultivectorSolve::Status::Solved) return false;
    if (!equal_multivectors(
            r.theta, Scalar::from_int(z1, -1) * hamiltonian_vector_field(f)))
      return false;
  }

  ChartPtr z2 = homogeneous_chart(fibred(2, 1));
  DiffForm dead = DiffForm::zero(z2, 1);
  dead.add_term({z2->find_momentum(z2->find_name("y"), 0)},
                Scalar::coordinate(z2, z2->find_pp()));
  return solve_hamiltonian_multivector(dead, multisymplectic_form(z2))
             .status == MultivectorSolve::Status::InconsistentSystem;
}

// 9. Bracket algebra: antisymmetry, Leibniz and Jacobi on random triples,
// restriction of the extended bracket off pp, and centrality of the base.
bool bracket_algebra() {
  ChartPtr pi = legendre_bundle_chart(fibred(1, 1));
  ChartPtr z = homogeneous_chart(fibred(1, 1));
  for (int i = 0; i < 100; ++i) {
    Scalar f = random_polynomial(z, 2, 2);
    Scalar g = random_polynomial(z, 2, 2);
    Scalar k = random_polynomial(z, 2, 2);
    if (!equals(canonical_bracket(f, g), -canonical_bracket(g, f)))
      return false;
    if (!equals(canonical_bracket(f, g * k),
                canonical_bracket(f, g) * k + g * canonical_bracket(f, k)))
      return false;
    Scalar jac = canonical_bracket(f, canonical_bracket(g, k)) +
                 canonical_bracket(g, canonical_bracket(k, f)) +
                 canonical_bracket(k, canonical_bracket(f, g));
    if (!jac.is_zero()) return false;
  }
  for (int i = 0; i < 50; ++i) {
    Scalar f = no_pp_polynomial(pi);
    Scalar g = no_pp_polynomial(pi);
    if (!equals(canonical_bracket(embed(f, z), embed(g, z)),
                embed(vertical_bracket(f, g), z)))
      return false;
    if (!vertical_bracket(f, Scalar::coordinate(pi, 0)).is_zero())
      return false;
  }
  return true;
}

// 10. The command line transcripts are byte identical to the golden files and
// the JSON mode carries the same content.
bool cli_goldens() {
  const std::string dir = COVFIELD_GOLDEN_DIR;
  const std::string osc = dir + "/oscillator.ini";
  const std::string s2d = dir + "/scalar2d.ini";
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases = {
      {{"forms", "--spec", osc}, "oscillator_forms.txt"},
      {{"legendre", "--spec", osc}, "oscillator_legendre.txt"},
      {{"hamilton-eqs", "--spec", osc}, "oscillator_hamilton_eqs.txt"},
      {{"evolve", "--spec", osc, "--function", "mom(y,x)", "--via",
        "connection"},
       "oscillator_evolve_connection.txt"},
      {{"evolve", "--spec", osc, "--function", "(mom(y,x)^2 + y^2)/2",
        "--via", "vertical-bracket"},
       "oscillator_evolve_conservation.txt"},
      {{"bracket", "--spec", osc, "--kind", "vertical", "--f", "mom(y,x)",
        "--g", "y"},
       "oscillator_bracket_vertical.txt"},
      {{"check-global", "--spec", osc}, "oscillator_check_global.txt"},
      {{"check-global", "--spec", osc, "--json"},
       "oscillator_check_global.json"},
      {{"forms", "--spec", s2d}, "scalar2d_forms.txt"},
      {{"legendre", "--spec", s2d}, "scalar2d_legendre.txt"},
      {{"hamilton-eqs", "--spec", s2d}, "scalar2d_hamilton_eqs.txt"},
  };
  for (const auto& [args, name] : cases) {
    std::ostringstream out, err;
    if (cli::run_cli(args, out, err) != 0) return false;
    if (!err.str().empty()) return false;
    if (out.str() != slurp(dir + "/" + name)) return false;
  }
  // JSON round trip
  std::ostringstream plain, perr, jout, jerr;
  cli::run_cli({"check-global", "--spec", osc}, plain, perr);
  cli::run_cli({"check-global", "--spec", osc, "--json"}, jout, jerr);
  auto j = nlohmann::json::parse(jout.str());
  for (auto& [name, value] : j["expressions"].items())
    if (plain.str().find(name + " = " + value.get<std::string>() + "\n") ==
        std::string::npos)
      return false;
  for (auto& [name, v] : j["verdicts"].items())
    if (plain.str().find("verdict " + name + ": " +
                         v["verdict"].get<std::string>() + " (" +
                         v["detail"].get<std::string>() + ")\n") ==
        std::string::npos)
      return false;
  return true;
}

}  // namespace

int main() {
  criterion(1, "canonical structures close up", canonical_structure);
  criterion(2, "evolution matches both bracket routes", evolution_identity);
  criterion(3, "weighted densities reduce to the energy bracket",
            weighted_bracket_reduction);
  criterion(4, "connection solving leaves exactly the pp direction free",
            connection_solver);
  criterion(5, "energy fields are horizontal after weighting",
            energy_horizontality);
  criterion(6, "dynamic verdicts track the jet rank", dynamic_verdicts);
  criterion(7, "two chart report separates bracket and evolution",
            two_chart_globality);
  criterion(8, "reduction obstructions appear where expected",
            reduction_obstructions);
  criterion(9, "brackets form a Poisson algebra on each chart",
            bracket_algebra);
  criterion(10, "command line transcripts stay frozen", cli_goldens);
  return failures == 0 ? 0 : 1;
}
