#include "covfield/transition.hpp"

#include <set>

#include "covfield/errors.hpp"
#include "covfield/hamiltonian.hpp"
#include "covfield/linsolve.hpp"

namespace covfield::geometry {

using symexpr::BundleKind;
using symexpr::CoordRole;

namespace {

int role_rank(CoordRole r) {
  switch (r) {
    case CoordRole::Base:
      return 0;
    case CoordRole::Fiber:
      return 1;
    default:
      return 2;
  }
}

void validate_direction(const ChartPtr& from, const ChartPtr& to,
                        const std::map<int, Scalar>& images) {
  for (int pos = 0; pos < to->dim(); ++pos) {
    auto it = images.find(pos);
    if (it == images.end())
      throw spec_error("transition image missing for coordinate '" +
                       to->coords[static_cast<std::size_t>(pos)].name + "'");
    if (!symexpr::same_chart(it->second.chart(), from))
      throw spec_error("transition image lives on the wrong chart");
    int rank = role_rank(to->coords[static_cast<std::size_t>(pos)].role);
    for (int used : symexpr::used_coordinates(it->second))
      if (role_rank(from->coords[static_cast<std::size_t>(used)].role) > rank)
        throw spec_error("transition is not fibred at coordinate '" +
                         to->coords[static_cast<std::size_t>(pos)].name + "'");
  }
  for (const auto& [pos, e] : images) {
    (void)e;
    if (pos < 0 || pos >= to->dim())
      throw spec_error("transition image for an unknown coordinate position");
  }
}

}  // namespace

Transition make_transition(const ChartPtr& source, const ChartPtr& target,
                           std::map<int, Scalar> forward,
                           std::map<int, Scalar> inverse) {
  validate_direction(source, target, forward);
  validate_direction(target, source, inverse);
  for (int pos = 0; pos < target->dim(); ++pos) {
    Scalar round = symexpr::substitute(forward[pos], inverse, target);
    if (!symexpr::equals(round, Scalar::coordinate(target, pos)))
      throw math_error("transition maps do not invert each other at coordinate '" +
                       target->coords[static_cast<std::size_t>(pos)].name + "'");
  }
  for (int pos = 0; pos < source->dim(); ++pos) {
    Scalar round = symexpr::substitute(inverse[pos], forward, source);
    if (!symexpr::equals(round, Scalar::coordinate(source, pos)))
      throw math_error("transition maps do not invert each other at coordinate '" +
                       source->coords[static_cast<std::size_t>(pos)].name + "'");
  }
  Transition t;
  t.source = source;
  t.target = target;
  t.forward = std::move(forward);
  t.inverse = std::move(inverse);
  return t;
}

Transition inverse_of(const Transition& t) {
  Transition r;
  r.source = t.target;
  r.target = t.source;
  r.forward = t.inverse;
  r.inverse = t.forward;
  return r;
}

Transition compose(const Transition& a, const Transition& b) {
  if (!symexpr::same_chart(a.target, b.source))
    throw spec_error("transitions do not share the middle chart");
  std::map<int, Scalar> forward, inverse;
  for (int pos = 0; pos < b.target->dim(); ++pos)
    forward[pos] = symexpr::substitute(b.forward.at(pos), a.forward, a.source);
  for (int pos = 0; pos < a.source->dim(); ++pos)
    inverse[pos] = symexpr::substitute(a.inverse.at(pos), b.inverse, b.target);
  return make_transition(a.source, b.target, std::move(forward), std::move(inverse));
}

Scalar pullback(const Scalar& f, const Transition& t) {
  if (!symexpr::same_chart(f.chart(), t.target))
    throw spec_error("pullback input lives on the wrong chart");
  return symexpr::substitute(f, t.forward, t.source);
}

namespace {

DiffForm pullback_with(const DiffForm& w, const std::map<int, Scalar>& fwd,
                       const ChartPtr& source) {
  std::map<int, DiffForm> dOf;
  auto differential = [&](int pos) -> const DiffForm& {
    auto it = dOf.find(pos);
    if (it == dOf.end()) {
      const Scalar& image = fwd.at(pos);
      DiffForm one = DiffForm::zero(source, 1);
      for (int v : symexpr::used_coordinates(image)) {
        Scalar dv = symexpr::diff(image, v);
        if (!dv.is_zero()) one.add_term({v}, dv);
      }
      it = dOf.emplace(pos, std::move(one)).first;
    }
    return it->second;
  };
  DiffForm out = DiffForm::zero(source, w.degree);
  for (const auto& [t, c] : w.terms) {
    DiffForm prod = DiffForm::function(symexpr::substitute(c, fwd, source));
    for (int pos : t) prod = wedge(prod, differential(pos));
    out = out + prod;
  }
  return out;
}

}  // namespace

DiffForm pullback(const DiffForm& w, const Transition& t) {
  if (!symexpr::same_chart(w.chart, t.target))
    throw spec_error("pullback input lives on the wrong chart");
  return pullback_with(w, t.forward, t.source);
}

namespace {

// Solves for the momentum (and pp) images on the target bundle chart from
// invariance of the canonical content. For the Legendre bundle the match is
// taken modulo forms with no fibre differential.
std::map<int, Scalar> momentum_images(const Transition& yT, const ChartPtr& a,
                                      const ChartPtr& b, bool homogeneous) {
  std::map<int, Scalar> baseFibre;
  for (int pos = 0; pos < b->dim(); ++pos) {
    CoordRole role = b->coords[static_cast<std::size_t>(pos)].role;
    if (role == CoordRole::Base || role == CoordRole::Fiber)
      baseFibre[pos] = symexpr::embed(yT.forward.at(pos), a);
  }

  std::vector<int> unknowns;
  for (int pos = 0; pos < b->dim(); ++pos) {
    CoordRole role = b->coords[static_cast<std::size_t>(pos)].role;
    if (role == CoordRole::HomogMomentum || role == CoordRole::PolyMomentum)
      unknowns.push_back(pos);
  }

  DiffForm theta = homogeneous
                       ? covham::liouville_form(a)
                       : covham::hamiltonian_form(Scalar::zero(a));

  std::vector<DiffForm> columns;
  for (int u : unknowns) {
    DiffForm beta;
    if (b->coords[static_cast<std::size_t>(u)].role == CoordRole::HomogMomentum) {
      beta = covham::volume_form(b);
    } else {
      const auto& id = b->coords[static_cast<std::size_t>(u)];
      int fibrePos = id.i1;
      beta = wedge(DiffForm::d_coordinate(b, fibrePos),
                   covham::volume_contracted(b, id.i2));
    }
    columns.push_back(pullback_with(beta, baseFibre, a));
  }

  auto pure_base = [&](const Tuple& t) {
    for (int pos : t)
      if (!a->is_base(pos)) return false;
    return true;
  };

  std::map<Tuple, int> rowIndex;
  for (const DiffForm& col : columns)
    for (const auto& [key, c] : col.terms) {
      (void)c;
      if (homogeneous || !pure_base(key)) rowIndex.emplace(key, 0);
    }
  for (const auto& [key, c] : theta.terms) {
    (void)c;
    if (homogeneous || !pure_base(key)) rowIndex.emplace(key, 0);
  }
  int nrows = 0;
  for (auto& [key, idx] : rowIndex) {
    (void)key;
    idx = nrows++;
  }

  std::vector<std::vector<Scalar>> mat(
      static_cast<std::size_t>(nrows),
      std::vector<Scalar>(unknowns.size(), Scalar::zero(a)));
  std::vector<Scalar> rhs(static_cast<std::size_t>(nrows), Scalar::zero(a));
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (const auto& [key, c] : columns[j].terms) {
      auto it = rowIndex.find(key);
      if (it != rowIndex.end()) mat[static_cast<std::size_t>(it->second)][j] = c;
    }
  for (const auto& [key, c] : theta.terms) {
    auto it = rowIndex.find(key);
    if (it != rowIndex.end()) rhs[static_cast<std::size_t>(it->second)] = c;
  }

  LinearSolution sol = solve_linear(std::move(mat), std::move(rhs), a);
  if (!sol.consistent || !sol.free_columns.empty())
    throw math_error("transition does not induce a unique momentum map");

  std::map<int, Scalar> images = baseFibre;
  for (std::size_t j = 0; j < unknowns.size(); ++j)
    images[unknowns[j]] = sol.particular[j];
  return images;
}

// Inverse base Jacobian entry dx^mu/dx'^lambda as a function on the source
// y-chart.
Scalar inverse_jacobian_entry(const Transition& yT, int mu, int lambda) {
  Scalar onTarget = symexpr::diff(yT.inverse.at(mu), lambda);
  return symexpr::substitute(onTarget, yT.forward, yT.source);
}

std::map<int, Scalar> jet_images(const Transition& yT, const ChartPtr& j1a,
                                 const ChartPtr& j1b) {
  const ChartPtr& ya = yT.source;
  const ChartPtr& yb = yT.target;
  std::map<int, Scalar> images;
  for (int pos = 0; pos < yb->dim(); ++pos)
    images[pos] = symexpr::embed(yT.forward.at(pos), j1a);

  std::vector<int> fibresA = ya->positions(CoordRole::Fiber);
  for (int j : yb->positions(CoordRole::Fiber)) {
    const Scalar& image = yT.forward.at(j);
    // total derivatives of the fibre image along each source base direction
    std::vector<Scalar> total;
    for (int mu = 0; mu < ya->baseDim; ++mu) {
      Scalar d = symexpr::embed(symexpr::diff(image, mu), j1a);
      for (int i : fibresA) {
        Scalar di = symexpr::diff(image, i);
        if (di.is_zero()) continue;
        d = d + Scalar::coordinate(j1a, j1a->find_jet(i, mu)) * symexpr::embed(di, j1a);
      }
      total.push_back(std::move(d));
    }
    for (int lambda = 0; lambda < yb->baseDim; ++lambda) {
      Scalar acc = Scalar::zero(j1a);
      for (int mu = 0; mu < ya->baseDim; ++mu) {
        Scalar jac = inverse_jacobian_entry(yT, mu, lambda);
        if (jac.is_zero()) continue;
        acc = acc + symexpr::embed(jac, j1a) * total[static_cast<std::size_t>(mu)];
      }
      images[j1b->find_jet(j, lambda)] = acc;
    }
  }
  return images;
}

void verify_homogeneous(const Transition& t) {
  DiffForm xiB = covham::liouville_form(t.target);
  DiffForm xiA = covham::liouville_form(t.source);
  if (!equal_forms(pullback(xiB, t), xiA))
    throw math_error("canonical form is not preserved by the induced transition");
}

void verify_legendre(const Transition& t, const Transition& yT) {
  TangentValuedForm omA = covham::polysymplectic_form(t.source);
  TangentValuedForm omB = covham::polysymplectic_form(t.target);
  std::map<int, DiffForm> compA, compB;
  for (const auto& [form, pos] : omA.parts) compA.emplace(pos, form);
  for (const auto& [form, pos] : omB.parts) compB.emplace(pos, form);
  for (int mu = 0; mu < t.source->baseDim; ++mu) {
    DiffForm acc = DiffForm::zero(t.source, t.source->baseDim + 2);
    for (int lambda = 0; lambda < t.target->baseDim; ++lambda) {
      auto it = compB.find(lambda);
      if (it == compB.end()) continue;
      Scalar jac = inverse_jacobian_entry(yT, mu, lambda);
      if (jac.is_zero()) continue;
      acc = acc + symexpr::embed(jac, t.source) * pullback(it->second, t);
    }
    auto ia = compA.find(mu);
    DiffForm want = ia == compA.end()
                        ? DiffForm::zero(t.source, t.source->baseDim + 2)
                        : ia->second;
    if (!equal_forms(acc, want))
      throw math_error("polysymplectic structure is not preserved by the induced transition");
  }
}

}  // namespace

Transition induced_transition(const Transition& yTransition, BundleKind kind) {
  const ChartPtr& ya = yTransition.source;
  const ChartPtr& yb = yTransition.target;
  if (ya->kind != BundleKind::Y || yb->kind != BundleKind::Y)
    throw spec_error("induced transitions start from a fibred chart transition");
  if (kind == BundleKind::Y) return yTransition;

  if (kind == BundleKind::VstarY || kind == BundleKind::Pi) {
    ChartPtr a = symexpr::legendre_bundle_chart(ya);
    ChartPtr b = symexpr::legendre_bundle_chart(yb);
    std::map<int, Scalar> fwd = momentum_images(yTransition, a, b, false);
    std::map<int, Scalar> inv =
        momentum_images(inverse_of(yTransition), b, a, false);
    Transition t = make_transition(a, b, std::move(fwd), std::move(inv));
    verify_legendre(t, yTransition);
    return t;
  }
  if (kind == BundleKind::TstarY || kind == BundleKind::Z) {
    ChartPtr a = symexpr::homogeneous_chart(ya);
    ChartPtr b = symexpr::homogeneous_chart(yb);
    std::map<int, Scalar> fwd = momentum_images(yTransition, a, b, true);
    std::map<int, Scalar> inv =
        momentum_images(inverse_of(yTransition), b, a, true);
    Transition t = make_transition(a, b, std::move(fwd), std::move(inv));
    verify_homogeneous(t);
    return t;
  }
  if (kind == BundleKind::J1Y) {
    ChartPtr a = symexpr::j1_chart(ya);
    ChartPtr b = symexpr::j1_chart(yb);
    std::map<int, Scalar> fwd = jet_images(yTransition, a, b);
    std::map<int, Scalar> inv = jet_images(inverse_of(yTransition), b, a);
    return make_transition(a, b, std::move(fwd), std::move(inv));
  }
  throw spec_error("induced transitions exist for the Legendre, homogeneous, and first jet bundles");
}

}  // namespace covfield::geometry
