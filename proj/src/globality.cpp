#include "covfield/globality.hpp"

#include <utility>

#include "covfield/errors.hpp"
#include "covfield/hamiltonian.hpp"

namespace covfield::globality {

using symexpr::BundleKind;
using symexpr::CoordRole;
using symexpr::Rat;

namespace {

BundleKind normalize_kind(BundleKind kind, int baseDim) {
  if (kind == BundleKind::VstarY || kind == BundleKind::Pi)
    return baseDim == 1 ? BundleKind::VstarY : BundleKind::Pi;
  if (kind == BundleKind::TstarY || kind == BundleKind::Z)
    return baseDim == 1 ? BundleKind::TstarY : BundleKind::Z;
  return kind;
}

Scalar determinant(const std::vector<std::vector<Scalar>>& m,
                   const ChartPtr& chart) {
  const int n = static_cast<int>(m.size());
  if (n == 0) return Scalar::from_int(chart, 1);
  if (n == 1) return m[0][0];
  Scalar out = Scalar::zero(chart);
  for (int j = 0; j < n; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<Scalar>> minor;
    minor.reserve(n - 1);
    for (int i = 1; i < n; ++i) {
      std::vector<Scalar> row;
      row.reserve(n - 1);
      for (int k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(std::move(row));
    }
    Scalar term = m[0][j] * determinant(minor, chart);
    out = (j % 2 == 0) ? out + term : out - term;
  }
  return out;
}

// det of d(forward base)/d(source base), a function on the source chart
Scalar forward_base_jacobian(const Transition& t) {
  auto src = t.source->positions(CoordRole::Base);
  auto tgt = t.target->positions(CoordRole::Base);
  std::vector<std::vector<Scalar>> m(tgt.size());
  for (size_t l = 0; l < tgt.size(); ++l)
    for (size_t mu = 0; mu < src.size(); ++mu)
      m[l].push_back(symexpr::diff(t.forward.at(tgt[l]), src[mu]));
  return determinant(m, t.source);
}

// det of d(source base)/d(target base), a function on the target chart
Scalar inverse_base_jacobian(const Transition& t) {
  auto src = t.source->positions(CoordRole::Base);
  auto tgt = t.target->positions(CoordRole::Base);
  std::vector<std::vector<Scalar>> m(src.size());
  for (size_t mu = 0; mu < src.size(); ++mu)
    for (size_t l = 0; l < tgt.size(); ++l)
      m[mu].push_back(symexpr::diff(t.inverse.at(src[mu]), tgt[l]));
  return determinant(m, t.target);
}

Scalar on_chart(const Scalar& e, const ChartPtr& chart) {
  if (symexpr::same_chart(e.chart(), chart)) return e;
  return symexpr::substitute(e, {}, chart);
}

}  // namespace

Atlas make_atlas(const Transition& yTransition,
                 const std::vector<BundleKind>& kinds) {
  if (yTransition.source->kind != BundleKind::Y)
    throw math_error("atlas transition must connect fibred charts");
  Atlas atlas;
  atlas.y = yTransition;
  const int baseDim = yTransition.source->baseDim;
  for (BundleKind kind : kinds) {
    BundleKind key = normalize_kind(kind, baseDim);
    if (key == BundleKind::Y) continue;
    if (atlas.induced.count(key)) continue;
    atlas.induced.emplace(key,
                          geometry::induced_transition(yTransition, key));
  }
  return atlas;
}

const Transition& atlas_transition(const Atlas& atlas, BundleKind kind) {
  BundleKind key = normalize_kind(kind, atlas.y.source->baseDim);
  if (key == BundleKind::Y) return atlas.y;
  auto it = atlas.induced.find(key);
  if (it == atlas.induced.end())
    throw math_error(std::string("atlas carries no transition for bundle ") +
                     symexpr::bundle_kind_name(key));
  return it->second;
}

std::string verdict_name(Verdict v) {
  return v == Verdict::Global ? "global" : "notGlobal";
}

FunctionCheck check_global_function(const Scalar& repA, const Scalar& repB,
                                    const Transition& t) {
  Scalar a = on_chart(repA, t.source);
  Scalar b = geometry::pullback(on_chart(repB, t.target), t);
  FunctionCheck out;
  out.discrepancy = a - b;
  out.verdict = out.discrepancy.is_zero() ? Verdict::Global : Verdict::NotGlobal;
  return out;
}

HorizontalFormCheck check_global_horizontal_form(const HorizontalOneForm& a,
                                                 const HorizontalOneForm& b,
                                                 const Transition& t) {
  if (!symexpr::same_chart(a.chart, t.source) ||
      !symexpr::same_chart(b.chart, t.target))
    throw math_error("horizontal form charts do not match the transition");
  auto src = t.source->positions(CoordRole::Base);
  auto tgt = t.target->positions(CoordRole::Base);
  if (a.comps.size() != src.size() || b.comps.size() != tgt.size())
    throw math_error("horizontal form has the wrong number of components");
  HorizontalFormCheck out;
  out.verdict = Verdict::Global;
  for (size_t mu = 0; mu < src.size(); ++mu) {
    Scalar sum = Scalar::zero(t.source);
    for (size_t l = 0; l < tgt.size(); ++l)
      sum = sum + geometry::pullback(b.comps[l], t) *
                      symexpr::diff(t.forward.at(tgt[l]), src[mu]);
    Scalar disc = a.comps[mu] - sum;
    if (!disc.is_zero()) out.verdict = Verdict::NotGlobal;
    out.discrepancy.push_back(disc);
  }
  return out;
}

DensityCheck check_unit_density(const Transition& yTransition) {
  DensityCheck out;
  out.jacobian = forward_base_jacobian(yTransition);
  Scalar one = Scalar::from_int(yTransition.source, 1);
  out.unitDensityExists = symexpr::equals(out.jacobian, one);
  out.orientationReversing =
      out.jacobian.is_constant() && out.jacobian.constant_value() < 0;
  return out;
}

Scalar transport_function(const Scalar& fA, const Transition& t) {
  return symexpr::substitute(on_chart(fA, t.source), t.inverse, t.target);
}

Scalar induce_hamiltonian(const Scalar& hA, const Atlas& atlas) {
  const Transition& zT = atlas_transition(atlas, BundleKind::TstarY);
  const Transition& piT = atlas_transition(atlas, BundleKind::VstarY);
  const ChartPtr& zA = zT.source;
  const ChartPtr& piA = piT.source;
  Scalar h = on_chart(hA, piA);
  int ppA = zA->find_pp();
  int ppB = zT.target->find_pp();
  // image of the section pp = -h under the homogeneous transition
  Scalar tmp = symexpr::substitute(
      zT.forward.at(ppB), {{ppA, -symexpr::embed(h, zA)}}, zA);
  return -transport_function(on_chart(tmp, piA), piT);
}

Scalar transport_density(const Scalar& rhoA, const Transition& yTransition) {
  return transport_function(rhoA, yTransition) *
         inverse_base_jacobian(yTransition);
}

std::vector<ReportEntry> globality_report(const Scalar& hA, const Scalar& fA,
                                          const Scalar& rhoA,
                                          const Atlas& atlas) {
  if (atlas.y.source->baseDim != 1)
    throw math_error("globality report requires a one-dimensional base");
  const Transition& piT = atlas_transition(atlas, BundleKind::VstarY);
  const Transition& zT = atlas_transition(atlas, BundleKind::TstarY);
  const ChartPtr& piA = piT.source;
  const ChartPtr& piB = piT.target;
  const ChartPtr& zA = zT.source;
  const ChartPtr& zB = zT.target;

  Scalar h = on_chart(hA, piA);
  Scalar f = on_chart(fA, piA);
  Scalar rho = on_chart(rhoA, piA);
  Scalar hB = induce_hamiltonian(h, atlas);
  Scalar fB = transport_function(f, piT);
  Scalar rhoB = on_chart(transport_density(rho, atlas.y), piB);

  std::vector<ReportEntry> report;
  auto add_function = [&report](const std::string& name,
                                const FunctionCheck& fc) {
    std::string detail = fc.verdict == Verdict::Global
                             ? "representatives agree on the overlap"
                             : "discrepancy " + symexpr::render(fc.discrepancy);
    report.push_back({name, verdict_name(fc.verdict), detail});
  };

  add_function("hamiltonian", check_global_function(h, hB, piT));

  {
    Scalar sA = covham::vertical_bracket(h, f);
    Scalar sB = covham::vertical_bracket(hB, fB);
    add_function("bracket-split", check_global_function(sA, sB, piT));
  }

  {
    HorizontalOneForm dA = covham::evolution_operator_vertical(h, f);
    HorizontalOneForm dB = covham::evolution_operator_vertical(hB, fB);
    HorizontalFormCheck hc = check_global_horizontal_form(dA, dB, piT);
    std::string detail;
    if (hc.verdict == Verdict::Global) {
      detail = "components transform with the base Jacobian";
    } else {
      detail = "component discrepancy";
      for (const Scalar& d : hc.discrepancy)
        detail += " " + symexpr::render(d);
    }
    report.push_back({"evolution-form", verdict_name(hc.verdict), detail});
  }

  Scalar secA = Scalar::coordinate(zA, zA->find_pp()) + symexpr::embed(h, zA);
  Scalar secB = Scalar::coordinate(zB, zB->find_pp()) + symexpr::embed(hB, zB);
  add_function("pp-plus-H-function", check_global_function(secA, secB, zT));

  {
    // density law: rep_A = (rep_B ∘ φ) det(dx'/dx)
    Scalar detF = symexpr::embed(forward_base_jacobian(atlas.y), zA);
    Scalar disc = secA - geometry::pullback(secB, zT) * detF;
    FunctionCheck fc;
    fc.discrepancy = disc;
    fc.verdict = disc.is_zero() ? Verdict::Global : Verdict::NotGlobal;
    add_function("pp-plus-H-density", fc);
  }

  add_function("energy-function",
               check_global_function(covham::energy_function(rho, h),
                                     covham::energy_function(rhoB, hB), zT));

  {
    DensityCheck dc = check_unit_density(atlas.y);
    std::string detail =
        "base Jacobian determinant " + symexpr::render(dc.jacobian);
    if (dc.orientationReversing) detail += ", orientation reversing";
    report.push_back(
        {"unit-density", dc.unitDensityExists ? "yes" : "no", detail});
  }

  {
    auto ia = covham::evolution_operator_homogeneous(h, f, rho);
    auto ib = covham::evolution_operator_homogeneous(hB, fB, rhoB);
    bool ok = ia.matchesWeightedBracket && ib.matchesWeightedBracket;
    std::string detail;
    if (ok)
      detail = "evolution equals the rho-weighted energy bracket in both charts";
    else if (!ia.matchesWeightedBracket)
      detail = "identity fails in the first chart";
    else
      detail = "identity fails in the second chart";
    report.push_back({"rho-bracket-reduction", ok ? "yes" : "no", detail});
  }

  return report;
}

}  // namespace covfield::globality
