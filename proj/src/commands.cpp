#include "covfield/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <tuple>
#include <utility>

#include "covfield/errors.hpp"
#include "covfield/hamiltonian.hpp"
#include "covfield/parser.hpp"
#include "covfield/problem.hpp"

namespace covfield::cli {

using geometry::HorizontalOneForm;
using symexpr::BundleKind;
using symexpr::CoordRole;
using symexpr::ParseContext;

namespace {

// Collects command results; emits them as plain lines or as one JSON object.
struct Output {
  bool json = false;
  std::string command;
  std::vector<std::string> equations;
  std::vector<std::pair<std::string, std::string>> expressions;
  std::vector<std::tuple<std::string, std::string, std::string>> verdicts;
  std::vector<std::string> warnings;

  void equation(const std::string& text) { equations.push_back(text); }
  void expression(const std::string& name, const std::string& value) {
    expressions.emplace_back(name, value);
  }
  void verdict(const std::string& name, const std::string& value,
               const std::string& detail) {
    verdicts.emplace_back(name, value, detail);
  }
  void warning(const std::string& message) { warnings.push_back(message); }

  void emit(std::ostream& out) const {
    if (json) {
      nlohmann::ordered_json j;
      j["command"] = command;
      if (!equations.empty()) j["equations"] = equations;
      j["expressions"] = nlohmann::ordered_json::object();
      for (const auto& [name, value] : expressions) j["expressions"][name] = value;
      j["verdicts"] = nlohmann::ordered_json::object();
      for (const auto& [name, value, detail] : verdicts)
        j["verdicts"][name] = {{"verdict", value}, {"detail", detail}};
      j["warnings"] = warnings;
      out << j.dump(2) << "\n";
      return;
    }
    for (const auto& eq : equations) out << eq << "\n";
    for (const auto& [name, value] : expressions)
      out << name << " = " << value << "\n";
    for (const auto& [name, value, detail] : verdicts)
      out << "verdict " << name << ": " << value << " (" << detail << ")\n";
    for (const auto& w : warnings) out << "warning: " << w << "\n";
  }
};

const Scalar& require_hamiltonian(const Problem& p) {
  if (!p.hamiltonian)
    throw spec_error("the problem file has no [hamiltonian] section");
  return *p.hamiltonian;
}

// Expressions arriving through command line flags produce usage errors, not
// problem file errors.
Scalar parse_flag_expression(const std::string& flag, const std::string& text,
                             const ParseContext& ctx) {
  try {
    return symexpr::parse_scalar(text, ctx);
  } catch (const Error& e) {
    throw usage_error(flag + ": " + e.what());
  }
}

ParseContext momentum_context(const Problem& p) {
  return ParseContext{p.legendre, {{"rho", symexpr::embed(p.rho, p.legendre)}}};
}

void cmd_forms(const Problem& p, Output& o) {
  o.expression("Xi", render_form(covham::liouville_form(p.homogeneous)));
  o.expression("Omega", render_form(covham::multisymplectic_form(p.homogeneous)));
  o.expression("OmegaPi", render_tvf(covham::polysymplectic_form(p.legendre)));
  if (p.hamiltonian) {
    o.expression("H", render_form(covham::hamiltonian_form(*p.hamiltonian)));
    o.expression("Hstar", render_form(covham::multisymplectic_hamiltonian_density(
                              *p.hamiltonian)));
  }
}

void cmd_legendre(const Problem& p, Output& o) {
  if (!p.lagrangian)
    throw spec_error("the problem file has no [lagrangian] section");
  for (const auto& [pos, value] : covham::legendre_map(*p.lagrangian))
    o.expression(p.legendre->coords[pos].name, symexpr::render(value));
}

void cmd_hamilton_eqs(const Problem& p, Output& o) {
  const Scalar& h = require_hamiltonian(p);
  auto eqs = covham::hamilton_equations(h);
  for (const auto& e : eqs) o.equation(covham::render_equation(e));
  auto v = covham::is_dynamic_equation(eqs, p.jetLegendre);
  o.verdict("dynamic", v.dynamic ? "yes" : "no",
            v.dynamic ? "every jet coordinate is determined"
                      : "free jet dimension " +
                            std::to_string(v.freeJetDimension));
}

void cmd_evolve(const Problem& p, const std::string& functionText,
                const std::string& via, Output& o) {
  const Scalar& h = require_hamiltonian(p);
  Scalar f = parse_flag_expression("--function", functionText,
                                   momentum_context(p));
  Scalar rho = symexpr::embed(p.rho, p.legendre);
  if (via == "connection") {
    auto r = covham::evolution_operator_homogeneous(h, f, rho);
    o.expression("df", render_horizontal(r.form));
    o.verdict("gamma-independent", r.gammaIndependent ? "yes" : "no",
              r.gammaIndependent ? "free connection parameters cancel"
                                 : "free connection parameters remain");
    o.verdict("matches-canonical-bracket",
              r.matchesCanonicalBracket ? "yes" : "no",
              r.matchesCanonicalBracket
                  ? "agrees with the pp-extended bracket route"
                  : "differs from the pp-extended bracket route");
    o.verdict("matches-rho-bracket", r.matchesWeightedBracket ? "yes" : "no",
              r.matchesWeightedBracket
                  ? "agrees with the weighted energy bracket route"
                  : "differs from the weighted energy bracket route");
    return;
  }
  if (via == "vertical-bracket") {
    o.expression("df", render_horizontal(covham::evolution_operator_vertical(h, f)));
    return;
  }
  const ChartPtr& z = p.homogeneous;
  Scalar fz = symexpr::embed(f, z);
  Scalar component;
  if (via == "canonical-bracket") {
    Scalar section = Scalar::coordinate(z, z->find_pp()) + symexpr::embed(h, z);
    component = covham::canonical_bracket(section, fz);
  } else {  // rho-bracket
    Scalar energy = covham::energy_function(rho, h);
    component = symexpr::embed(p.rho, z) * covham::canonical_bracket(energy, fz);
  }
  o.expression("df", render_horizontal(HorizontalOneForm{z, {component}}));
}

void cmd_bracket(const Problem& p, const std::string& kind,
                 const std::string& fText, const std::string& gText,
                 Output& o) {
  if (kind == "vertical") {
    ParseContext ctx = momentum_context(p);
    Scalar f = parse_flag_expression("--f", fText, ctx);
    Scalar g = parse_flag_expression("--g", gText, ctx);
    o.expression("bracket", symexpr::render(covham::vertical_bracket(f, g)));
    return;
  }
  ParseContext ctx{p.homogeneous,
                   {{"rho", symexpr::embed(p.rho, p.homogeneous)}}};
  Scalar f = parse_flag_expression("--f", fText, ctx);
  Scalar g = parse_flag_expression("--g", gText, ctx);
  o.expression("bracket", symexpr::render(covham::canonical_bracket(f, g)));
}

void cmd_check_global(const Problem& p, const std::string& object,
                      const std::string& functionText, Output& o) {
  const Scalar& h = require_hamiltonian(p);
  if (!p.atlas) throw spec_error("the problem file has no [chart2] section");
  Scalar f = functionText.empty()
                 ? Scalar::coordinate(p.legendre,
                                      p.legendre->positions(CoordRole::Fiber)[0])
                 : parse_flag_expression("--function", functionText,
                                         momentum_context(p));
  if (object.empty()) {
    o.expression("H2", symexpr::render(globality::induce_hamiltonian(h, *p.atlas)));
    o.expression("rho2", symexpr::render(
                             globality::transport_density(p.rho, p.atlas->y)));
  }
  for (const auto& entry : globality::globality_report(h, f, p.rho, *p.atlas)) {
    if (!object.empty() && entry.name != object) continue;
    o.verdict(entry.name, entry.verdict, entry.detail);
  }
  if (globality::check_unit_density(p.atlas->y).orientationReversing)
    o.warning("the transition reverses base orientation");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"symbolic toolkit for covariant Hamiltonian field theory"};
  app.name("covfield");
  app.require_subcommand(1);

  std::string spec, function, via = "connection", kind, fArg, gArg, object;
  bool json = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", spec, "problem file")->required();
    sub->add_flag("--json", json, "emit one JSON object instead of plain lines");
  };

  CLI::App* forms =
      app.add_subcommand("forms", "canonical forms on the problem charts");
  add_common(forms);

  CLI::App* legendre = app.add_subcommand(
      "legendre", "fibre derivative of the Lagrangian density");
  add_common(legendre);

  CLI::App* hamiltonEqs = app.add_subcommand(
      "hamilton-eqs", "first-order equations and the dynamic verdict");
  add_common(hamiltonEqs);

  CLI::App* evolve = app.add_subcommand(
      "evolve", "differential of a function along the dynamics");
  add_common(evolve);
  evolve->add_option("--function", function, "probe function on the momentum chart")
      ->required();
  evolve->add_option("--via", via, "computation route")
      ->check(CLI::IsMember({"connection", "vertical-bracket",
                             "canonical-bracket", "rho-bracket"}));

  CLI::App* bracket = app.add_subcommand("bracket", "bracket of two functions");
  add_common(bracket);
  bracket->add_option("--kind", kind, "bracket kind")
      ->required()
      ->check(CLI::IsMember({"vertical", "canonical"}));
  bracket->add_option("--f", fArg, "first argument")->required();
  bracket->add_option("--g", gArg, "second argument")->required();

  CLI::App* checkGlobal =
      app.add_subcommand("check-global", "two-chart globality report");
  add_common(checkGlobal);
  checkGlobal->add_option("--object", object, "report a single named object")
      ->check(CLI::IsMember({"hamiltonian", "bracket-split", "evolution-form",
                             "pp-plus-H-function", "pp-plus-H-density",
                             "energy-function", "unit-density",
                             "rho-bracket-reduction"}));
  checkGlobal->add_option("--function", function, "probe function");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs[0]->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error:usage: " << e.what() << "\n";
    return 1;
  }

  try {
    Problem p = load_problem(spec);
    Output o;
    o.json = json;
    if (forms->parsed()) {
      o.command = "forms";
      cmd_forms(p, o);
    } else if (legendre->parsed()) {
      o.command = "legendre";
      cmd_legendre(p, o);
    } else if (hamiltonEqs->parsed()) {
      o.command = "hamilton-eqs";
      cmd_hamilton_eqs(p, o);
    } else if (evolve->parsed()) {
      o.command = "evolve";
      cmd_evolve(p, function, via, o);
    } else if (bracket->parsed()) {
      o.command = "bracket";
      cmd_bracket(p, kind, fArg, gArg, o);
    } else {
      o.command = "check-global";
      cmd_check_global(p, object, function, o);
    }
    o.emit(out);
    return 0;
  } catch (const Error& e) {
    err << "error:" << category_name(e.category()) << ": " << e.what() << "\n";
    switch (e.category()) {
      case ErrorCategory::Usage: return 1;
      case ErrorCategory::Spec: return 2;
      case ErrorCategory::Math: return 3;
    }
    return 3;
  } catch (const std::exception& e) {
    err << "error:math: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace covfield::cli
