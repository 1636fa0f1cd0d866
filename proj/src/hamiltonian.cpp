#include "covfield/hamiltonian.hpp"

#include <algorithm>
#include <set>

#include "covfield/errors.hpp"
#include "covfield/linsolve.hpp"

namespace covfield::covham {

using geometry::LinearSolution;
using geometry::solve_linear;
using geometry::Tuple;
using symexpr::BundleKind;
using symexpr::CoordRole;

namespace {

bool is_legendre_chart(const ChartPtr& c) {
  return c->kind == BundleKind::VstarY || c->kind == BundleKind::Pi;
}

bool is_homogeneous_chart(const ChartPtr& c) {
  return c->kind == BundleKind::TstarY || c->kind == BundleKind::Z;
}

void require_legendre(const ChartPtr& c) {
  if (!is_legendre_chart(c))
    throw spec_error("expected an expression on a Legendre bundle chart");
}

void require_homogeneous(const ChartPtr& c) {
  if (!is_homogeneous_chart(c))
    throw spec_error("expected an expression on a homogeneous momentum chart");
}

void require_base_only(const Scalar& rho) {
  for (int pos : symexpr::used_coordinates(rho))
    if (rho.chart()->coords[static_cast<std::size_t>(pos)].role != CoordRole::Base)
      throw spec_error("density coefficient must depend on base coordinates only");
}

Scalar minus(const Scalar& a) {
  return Scalar::from_int(a.chart(), -1) * a;
}

int rational_rank(std::vector<std::vector<Rat>> m) {
  if (m.empty()) return 0;
  const std::size_t cols = m[0].size();
  std::size_t pr = 0;
  for (std::size_t pc = 0; pc < cols && pr < m.size(); ++pc) {
    std::size_t hit = pr;
    while (hit < m.size() && m[hit][pc] == 0) ++hit;
    if (hit == m.size()) continue;
    std::swap(m[pr], m[hit]);
    Rat inv = 1 / m[pr][pc];
    for (std::size_t c = pc; c < cols; ++c) m[pr][c] *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == pr || m[r][pc] == 0) continue;
      Rat f = m[r][pc];
      for (std::size_t c = pc; c < cols; ++c) m[r][c] -= f * m[pr][c];
    }
    ++pr;
  }
  return static_cast<int>(pr);
}

void increasing_tuples(int dim, int r, Tuple& cur, std::vector<Tuple>& out) {
  if (static_cast<int>(cur.size()) == r) {
    out.push_back(cur);
    return;
  }
  int start = cur.empty() ? 0 : cur.back() + 1;
  for (int i = start; i < dim; ++i) {
    cur.push_back(i);
    increasing_tuples(dim, r, cur, out);
    cur.pop_back();
  }
}

struct ContractionSolve {
  bool consistent = false;
  int freeCount = 0;
  MultiVector theta;
};

// Solves theta ⌟ omega = rhs for a multivector of the given degree, with all
// free components of the solution set to zero.
ContractionSolve solve_contraction(const DiffForm& rhs, const DiffForm& omega,
                                   int r) {
  const ChartPtr& chart = omega.chart;
  std::vector<Tuple> unknowns;
  Tuple cur;
  increasing_tuples(chart->dim(), r, cur, unknowns);

  std::vector<DiffForm> columns;
  columns.reserve(unknowns.size());
  std::map<Tuple, int> rowIndex;
  for (const Tuple& t : unknowns) {
    MultiVector basis = MultiVector::zero(chart, r);
    basis.add_term(t, Scalar::from_int(chart, 1));
    DiffForm col = geometry::contract(basis, omega);
    for (const auto& [key, c] : col.terms) {
      (void)c;
      rowIndex.emplace(key, 0);
    }
    columns.push_back(std::move(col));
  }
  for (const auto& [key, c] : rhs.terms) {
    (void)c;
    rowIndex.emplace(key, 0);
  }
  int nrows = 0;
  for (auto& [key, idx] : rowIndex) {
    (void)key;
    idx = nrows++;
  }

  std::vector<std::vector<Scalar>> a(
      static_cast<std::size_t>(nrows),
      std::vector<Scalar>(unknowns.size(), Scalar::zero(chart)));
  std::vector<Scalar> b(static_cast<std::size_t>(nrows), Scalar::zero(chart));
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (const auto& [key, c] : columns[j].terms)
      a[static_cast<std::size_t>(rowIndex[key])][j] = c;
  for (const auto& [key, c] : rhs.terms)
    b[static_cast<std::size_t>(rowIndex[key])] = c;

  LinearSolution sol = solve_linear(std::move(a), std::move(b), chart);
  ContractionSolve out;
  out.consistent = sol.consistent;
  out.theta = MultiVector::zero(chart, r);
  if (!sol.consistent) return out;
  out.freeCount = static_cast<int>(sol.free_columns.size());
  for (std::size_t j = 0; j < unknowns.size(); ++j)
    if (!sol.particular[j].is_zero()) out.theta.add_term(unknowns[j], sol.particular[j]);
  return out;
}

}  // namespace

DiffForm volume_form(const ChartPtr& chart) {
  DiffForm w = DiffForm::function(Scalar::from_int(chart, 1));
  for (int mu = 0; mu < chart->baseDim; ++mu)
    w = geometry::wedge(w, DiffForm::d_coordinate(chart, mu));
  return w;
}

DiffForm volume_contracted(const ChartPtr& chart, int mu) {
  return geometry::contract(MultiVector::basis_vector(chart, mu), volume_form(chart));
}

DiffForm embed_form(const DiffForm& a, const ChartPtr& target) {
  DiffForm out = DiffForm::zero(target, a.degree);
  for (const auto& [t, c] : a.terms) {
    Tuple nt;
    nt.reserve(t.size());
    for (int pos : t) {
      const std::string& name = a.chart->coords[static_cast<std::size_t>(pos)].name;
      int tp = target->find_name(name);
      if (tp < 0)
        throw spec_error("coordinate '" + name + "' has no image in the target chart");
      nt.push_back(tp);
    }
    out.add_term(std::move(nt), symexpr::embed(c, target));
  }
  return out;
}

DiffForm liouville_form(const ChartPtr& z) {
  require_homogeneous(z);
  DiffForm w = volume_form(z);
  int pp = z->find_pp();
  DiffForm xi = Scalar::coordinate(z, pp) * w;
  for (int i : z->positions(CoordRole::Fiber)) {
    DiffForm dy = DiffForm::d_coordinate(z, i);
    for (int mu = 0; mu < z->baseDim; ++mu) {
      int p = z->find_momentum(i, mu);
      xi = xi + Scalar::coordinate(z, p) * geometry::wedge(dy, volume_contracted(z, mu));
    }
  }
  return xi;
}

DiffForm multisymplectic_form(const ChartPtr& z) {
  return geometry::exterior_derivative(liouville_form(z));
}

TangentValuedForm polysymplectic_form(const ChartPtr& pi) {
  require_legendre(pi);
  DiffForm w = volume_form(pi);
  TangentValuedForm out;
  out.chart = pi;
  for (int mu = 0; mu < pi->baseDim; ++mu) {
    DiffForm comp = DiffForm::zero(pi, pi->baseDim + 2);
    for (int i : pi->positions(CoordRole::Fiber)) {
      int p = pi->find_momentum(i, mu);
      comp = comp + geometry::wedge(geometry::wedge(DiffForm::d_coordinate(pi, p),
                                                    DiffForm::d_coordinate(pi, i)),
                                    w);
    }
    if (!comp.is_zero()) out.parts.emplace_back(comp, mu);
  }
  return out;
}

DiffForm hamiltonian_form(const Scalar& h) {
  const ChartPtr& pi = h.chart();
  require_legendre(pi);
  DiffForm out = minus(h) * volume_form(pi);
  for (int i : pi->positions(CoordRole::Fiber)) {
    DiffForm dy = DiffForm::d_coordinate(pi, i);
    for (int mu = 0; mu < pi->baseDim; ++mu) {
      int p = pi->find_momentum(i, mu);
      out = out + Scalar::coordinate(pi, p) * geometry::wedge(dy, volume_contracted(pi, mu));
    }
  }
  return out;
}

DiffForm multisymplectic_hamiltonian_density(const Scalar& h) {
  require_legendre(h.chart());
  ChartPtr z = symexpr::homogeneous_chart(symexpr::y_chart_of(h.chart()));
  return liouville_form(z) - embed_form(hamiltonian_form(h), z);
}

std::map<int, Scalar> legendre_map(const Scalar& lagrangian) {
  const ChartPtr& j1y = lagrangian.chart();
  if (j1y->kind != BundleKind::J1Y)
    throw spec_error("Lagrangian density must live on a first jet chart");
  ChartPtr y = symexpr::y_chart_of(j1y);
  ChartPtr pi = symexpr::legendre_bundle_chart(y);
  std::map<int, Scalar> out;
  for (int i : pi->positions(CoordRole::Fiber)) {
    for (int mu = 0; mu < pi->baseDim; ++mu) {
      int p = pi->find_momentum(i, mu);
      int jet = j1y->find_jet(i, mu);
      if (jet < 0) throw spec_error("jet coordinate missing from the jet chart");
      out[p] = symexpr::diff(lagrangian, jet);
    }
  }
  return out;
}

Scalar vertical_bracket(const Scalar& f, const Scalar& g) {
  const ChartPtr& c = f.chart();
  if (c->kind != BundleKind::VstarY)
    throw spec_error("vertical bracket is defined on a Legendre chart over a one-dimensional base");
  if (!symexpr::same_chart(c, g.chart()))
    throw spec_error("bracket operands live on different charts");
  Scalar acc = Scalar::zero(c);
  for (int i : c->positions(CoordRole::Fiber)) {
    int p = c->find_momentum(i, 0);
    acc = acc + symexpr::diff(f, p) * symexpr::diff(g, i) -
          symexpr::diff(f, i) * symexpr::diff(g, p);
  }
  return acc;
}

Scalar canonical_bracket(const Scalar& f, const Scalar& g) {
  const ChartPtr& c = f.chart();
  if (c->kind != BundleKind::TstarY)
    throw spec_error("canonical bracket is defined on a homogeneous chart over a one-dimensional base");
  if (!symexpr::same_chart(c, g.chart()))
    throw spec_error("bracket operands live on different charts");
  int pp = c->find_pp();
  Scalar acc = symexpr::diff(f, pp) * symexpr::diff(g, 0) -
               symexpr::diff(f, 0) * symexpr::diff(g, pp);
  for (int i : c->positions(CoordRole::Fiber)) {
    int p = c->find_momentum(i, 0);
    acc = acc + symexpr::diff(f, p) * symexpr::diff(g, i) -
          symexpr::diff(f, i) * symexpr::diff(g, p);
  }
  return acc;
}

MultiVector hamiltonian_vector_field(const Scalar& f) {
  const ChartPtr& c = f.chart();
  if (c->kind != BundleKind::TstarY)
    throw spec_error("Hamiltonian vector fields are solved on a homogeneous chart over a one-dimensional base");
  DiffForm omega = multisymplectic_form(c);
  DiffForm rhs = Scalar::from_int(c, -1) * geometry::exterior_derivative(DiffForm::function(f));
  ContractionSolve s = solve_contraction(rhs, omega, 1);
  if (!s.consistent || s.freeCount != 0)
    throw math_error("contraction with the canonical two-form is not invertible");
  return s.theta;
}

int ConnectionFamily::free_dimension() const {
  std::vector<std::vector<Rat>> m;
  for (const Constraint& con : constraints) {
    std::vector<Rat> row(params.size(), Rat(0));
    for (const auto& [idx, c] : con.coeffs) row[static_cast<std::size_t>(idx)] = c;
    m.push_back(std::move(row));
  }
  return static_cast<int>(params.size()) - rational_rank(std::move(m));
}

std::string ConnectionFamily::param_name(int i) const {
  return "c" + std::to_string(i);
}

Connection ConnectionFamily::instantiate(const std::vector<Scalar>& values) const {
  if (values.size() != params.size())
    throw spec_error("wrong number of parameter values for the connection family");
  for (const Scalar& v : values)
    if (!symexpr::same_chart(v.chart(), chart))
      throw spec_error("parameter value lives on the wrong chart");
  for (const Constraint& con : constraints) {
    Scalar acc = Scalar::zero(chart);
    for (const auto& [idx, c] : con.coeffs)
      acc = acc + Scalar::constant(chart, c) * values[static_cast<std::size_t>(idx)];
    if (!symexpr::equals(acc, con.rhs))
      throw math_error("parameter values violate the family constraints");
  }
  std::map<std::pair<int, int>, Scalar> coeffs = fixed;
  for (std::size_t i = 0; i < params.size(); ++i) coeffs[params[i]] = values[i];
  return geometry::make_connection(chart, std::move(coeffs));
}

Connection ConnectionFamily::instantiate_constant(long fill) const {
  // c = fill + d with the free part of d zero
  Scalar fillS = Scalar::from_int(chart, fill);
  std::vector<Scalar> values(params.size(), fillS);
  if (!constraints.empty()) {
    std::vector<std::vector<Scalar>> a;
    std::vector<Scalar> b;
    for (const Constraint& con : constraints) {
      std::vector<Scalar> row(params.size(), Scalar::zero(chart));
      Scalar shift = Scalar::zero(chart);
      for (const auto& [idx, c] : con.coeffs) {
        row[static_cast<std::size_t>(idx)] = Scalar::constant(chart, c);
        shift = shift + Scalar::constant(chart, c) * fillS;
      }
      a.push_back(std::move(row));
      b.push_back(con.rhs - shift);
    }
    LinearSolution sol = solve_linear(std::move(a), std::move(b), chart);
    if (!sol.consistent)
      throw math_error("connection family constraints are inconsistent");
    for (std::size_t i = 0; i < params.size(); ++i)
      values[i] = fillS + sol.particular[i];
  }
  return instantiate(values);
}

ConnectionFamily hamiltonian_connection_polysymplectic(const Scalar& h) {
  const ChartPtr& pi = h.chart();
  require_legendre(pi);
  ConnectionFamily fam;
  fam.chart = pi;
  for (int i : pi->positions(CoordRole::Fiber))
    for (int mu = 0; mu < pi->baseDim; ++mu)
      fam.fixed[{i, mu}] = symexpr::diff(h, pi->find_momentum(i, mu));
  std::map<std::pair<int, int>, int> paramIndex;
  for (int p : pi->positions(CoordRole::PolyMomentum))
    for (int mu = 0; mu < pi->baseDim; ++mu) {
      paramIndex[{p, mu}] = static_cast<int>(fam.params.size());
      fam.params.emplace_back(p, mu);
    }
  for (int i : pi->positions(CoordRole::Fiber)) {
    ConnectionFamily::Constraint con{{}, minus(symexpr::diff(h, i))};
    for (int mu = 0; mu < pi->baseDim; ++mu)
      con.coeffs[paramIndex[{pi->find_momentum(i, mu), mu}]] = Rat(1);
    fam.constraints.push_back(std::move(con));
  }
  return fam;
}

ConnectionFamily solve_hamiltonian_connection(const Scalar& h) {
  const ChartPtr& pi = h.chart();
  require_legendre(pi);
  if (pi->baseDim != 1)
    throw spec_error("connection solving on the homogeneous chart needs a one-dimensional base");
  ChartPtr z = symexpr::homogeneous_chart(symexpr::y_chart_of(pi));
  DiffForm omega = multisymplectic_form(z);
  DiffForm dx = DiffForm::d_coordinate(z, 0);
  DiffForm rhs = geometry::exterior_derivative(multisymplectic_hamiltonian_density(h));

  std::vector<int> slots;
  for (int p = 1; p < z->dim(); ++p) slots.push_back(p);
  std::vector<DiffForm> columns;
  std::map<Tuple, int> rowIndex;
  DiffForm base = geometry::wedge(
      dx, geometry::contract(MultiVector::basis_vector(z, 0), omega));
  rhs = rhs - base;
  for (int p : slots) {
    DiffForm col = geometry::wedge(
        dx, geometry::contract(MultiVector::basis_vector(z, p), omega));
    for (const auto& [key, c] : col.terms) {
      (void)c;
      rowIndex.emplace(key, 0);
    }
    columns.push_back(std::move(col));
  }
  for (const auto& [key, c] : rhs.terms) {
    (void)c;
    rowIndex.emplace(key, 0);
  }
  int nrows = 0;
  for (auto& [key, idx] : rowIndex) {
    (void)key;
    idx = nrows++;
  }
  std::vector<std::vector<Scalar>> a(
      static_cast<std::size_t>(nrows),
      std::vector<Scalar>(slots.size(), Scalar::zero(z)));
  std::vector<Scalar> b(static_cast<std::size_t>(nrows), Scalar::zero(z));
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (const auto& [key, c] : columns[j].terms)
      a[static_cast<std::size_t>(rowIndex[key])][j] = c;
  for (const auto& [key, c] : rhs.terms)
    b[static_cast<std::size_t>(rowIndex[key])] = c;

  LinearSolution sol = solve_linear(a, b, z);
  if (!sol.consistent)
    throw math_error("no connection satisfies the canonical condition");

  ConnectionFamily fam;
  fam.chart = z;
  std::set<int> freeSet(sol.free_columns.begin(), sol.free_columns.end());
  // pivot columns whose row touches a free column stay parameters too
  std::set<int> paramCols(sol.free_columns.begin(), sol.free_columns.end());
  for (std::size_t k = 0; k < sol.pivot_columns.size(); ++k) {
    for (std::size_t j = 0; j < sol.kernel.size(); ++j)
      if (!sol.kernel[j][static_cast<std::size_t>(sol.pivot_columns[k])].is_zero())
        paramCols.insert(sol.pivot_columns[k]);
  }
  std::map<int, int> paramIndex;
  for (int col : paramCols) {
    paramIndex[col] = static_cast<int>(fam.params.size());
    fam.params.emplace_back(slots[static_cast<std::size_t>(col)], 0);
  }
  for (std::size_t k = 0; k < sol.pivot_columns.size(); ++k) {
    int pc = sol.pivot_columns[k];
    if (!paramCols.count(pc)) {
      Scalar v = sol.particular[static_cast<std::size_t>(pc)];
      if (!v.is_zero()) fam.fixed[{slots[static_cast<std::size_t>(pc)], 0}] = v;
      continue;
    }
    // row reads c_pc + sum_f A[r][f] c_f = b[r], with A[r][f] = -kernel_f[pc]
    ConnectionFamily::Constraint con{{}, sol.particular[static_cast<std::size_t>(pc)]};
    con.coeffs[paramIndex[pc]] = Rat(1);
    for (std::size_t j = 0; j < sol.kernel.size(); ++j) {
      Scalar kv = sol.kernel[j][static_cast<std::size_t>(pc)];
      if (kv.is_zero()) continue;
      if (!kv.is_constant())
        throw math_error("connection family is not affine with rational coefficients");
      int fc = sol.free_columns[j];
      con.coeffs[paramIndex[fc]] = -kv.num().terms().begin()->second /
                                   kv.den().terms().begin()->second;
    }
    fam.constraints.push_back(std::move(con));
  }
  return fam;
}

Connection project_zeta(const Connection& conn, const ChartPtr& legendre) {
  require_homogeneous(conn.chart);
  require_legendre(legendre);
  int pp = conn.chart->find_pp();
  std::map<std::pair<int, int>, Scalar> coeffs;
  for (const auto& [slot, g] : conn.coeffs) {
    auto [pos, mu] = slot;
    if (pos == pp) continue;
    if (symexpr::depends_on(g, pp))
      throw math_error("connection coefficient depends on the extra momentum; no projection exists");
    const std::string& name = conn.chart->coords[static_cast<std::size_t>(pos)].name;
    int tp = legendre->find_name(name);
    if (tp < 0)
      throw spec_error("coordinate '" + name + "' has no image in the target chart");
    coeffs[{tp, mu}] = symexpr::substitute(g, {}, legendre);
  }
  return geometry::make_connection(legendre, std::move(coeffs));
}

std::string render_equation(const Equation& e) {
  return symexpr::render(e.lhs) + " = " + symexpr::render(e.rhs);
}

std::vector<Equation> hamilton_equations(const Scalar& h) {
  const ChartPtr& pi = h.chart();
  require_legendre(pi);
  ChartPtr j1 = symexpr::j1_chart(pi);
  std::vector<Equation> out;
  for (int i : pi->positions(CoordRole::Fiber))
    for (int mu = 0; mu < pi->baseDim; ++mu) {
      int jet = j1->find_jet(i, mu);
      out.push_back({Scalar::coordinate(j1, jet),
                     symexpr::embed(symexpr::diff(h, pi->find_momentum(i, mu)), j1)});
    }
  for (int i : pi->positions(CoordRole::Fiber)) {
    Scalar lhs = Scalar::zero(j1);
    for (int mu = 0; mu < pi->baseDim; ++mu) {
      int jet = j1->find_jet(pi->find_momentum(i, mu), mu);
      lhs = lhs + Scalar::coordinate(j1, jet);
    }
    out.push_back({lhs, symexpr::embed(minus(symexpr::diff(h, i)), j1)});
  }
  return out;
}

DynamicVerdict is_dynamic_equation(const std::vector<Equation>& eqs,
                                   const ChartPtr& j1) {
  std::vector<int> jets = j1->positions(CoordRole::Jet);
  for (int p : j1->positions(CoordRole::Jet2)) jets.push_back(p);
  std::sort(jets.begin(), jets.end());
  std::set<int> jetSet(jets.begin(), jets.end());

  std::vector<std::vector<Scalar>> rows;
  for (const Equation& eq : eqs) {
    if (!symexpr::same_chart(eq.lhs.chart(), j1) ||
        !symexpr::same_chart(eq.rhs.chart(), j1))
      throw spec_error("equation lives on the wrong chart");
    Scalar expr = eq.lhs - eq.rhs;
    std::vector<Scalar> row;
    Scalar residual = expr;
    for (int jpos : jets) {
      Scalar c = symexpr::diff(expr, jpos);
      for (int used : symexpr::used_coordinates(c))
        if (jetSet.count(used))
          throw math_error("equations are not affine in the jet coordinates");
      residual = residual - c * Scalar::coordinate(j1, jpos);
      row.push_back(std::move(c));
    }
    for (int used : symexpr::used_coordinates(residual))
      if (jetSet.count(used))
        throw math_error("equations are not affine in the jet coordinates");
    rows.push_back(std::move(row));
  }
  int rank = geometry::matrix_rank(rows, j1);
  DynamicVerdict v;
  v.dynamic = rank == static_cast<int>(jets.size());
  v.freeJetDimension = static_cast<int>(jets.size()) - rank;
  return v;
}

Scalar energy_function(const Scalar& rho, const Scalar& h) {
  require_legendre(h.chart());
  require_base_only(rho);
  ChartPtr z = symexpr::homogeneous_chart(symexpr::y_chart_of(h.chart()));
  Scalar rhoZ = symexpr::substitute(rho, {}, z);
  if (rhoZ.is_zero()) throw math_error("density coefficient vanishes");
  Scalar pp = Scalar::coordinate(z, z->find_pp());
  return (pp + symexpr::embed(h, z)) / rhoZ;
}

MultivectorSolve solve_hamiltonian_multivector(const DiffForm& sigma,
                                               const DiffForm& omega) {
  if (!symexpr::same_chart(sigma.chart, omega.chart))
    throw spec_error("operands live on different charts");
  MultivectorSolve out;
  out.requiredDegree = omega.degree - sigma.degree - 1;
  out.theta = MultiVector::zero(omega.chart, std::max(out.requiredDegree, 0));
  if (out.requiredDegree < 1) {
    out.status = MultivectorSolve::Status::DegreeObstruction;
    return out;
  }
  DiffForm rhs = geometry::exterior_derivative(sigma);
  ContractionSolve s = solve_contraction(rhs, omega, out.requiredDegree);
  if (!s.consistent) {
    out.status = MultivectorSolve::Status::InconsistentSystem;
    return out;
  }
  out.status = MultivectorSolve::Status::Solved;
  out.theta = s.theta;
  return out;
}

HorizontalOneForm evolution_operator_vertical(const Scalar& h, const Scalar& f) {
  const ChartPtr& c = h.chart();
  if (c->kind != BundleKind::VstarY)
    throw spec_error("vertical evolution needs a Legendre chart over a one-dimensional base");
  if (!symexpr::same_chart(c, f.chart()))
    throw spec_error("operands live on different charts");
  HorizontalOneForm out;
  out.chart = c;
  out.comps.push_back(symexpr::diff(f, 0) + vertical_bracket(h, f));
  return out;
}

EvolutionIdentities evolution_operator_homogeneous(const Scalar& h,
                                                   const Scalar& f,
                                                   const Scalar& rho) {
  require_legendre(h.chart());
  ChartPtr z = symexpr::homogeneous_chart(symexpr::y_chart_of(h.chart()));
  Scalar fz = is_homogeneous_chart(f.chart()) ? f : symexpr::embed(f, z);
  if (!symexpr::same_chart(fz.chart(), z))
    throw spec_error("function lives on the wrong chart");
  if (symexpr::depends_on(fz, z->find_pp()))
    throw spec_error("evolution input must not involve the extra momentum");

  ConnectionFamily fam = solve_hamiltonian_connection(h);
  Connection g0 = fam.instantiate_constant(0);
  Connection g1 = fam.instantiate_constant(1);
  HorizontalOneForm d0 = geometry::evolution_operator(g0, fz);
  HorizontalOneForm d1 = geometry::evolution_operator(g1, fz);

  EvolutionIdentities out;
  out.form = d0;
  out.gammaIndependent = geometry::equal_horizontal(d0, d1);
  Scalar ppPlusH = Scalar::coordinate(z, z->find_pp()) + symexpr::embed(h, z);
  out.matchesCanonicalBracket =
      symexpr::equals(d0.comps[0], canonical_bracket(ppPlusH, fz));
  Scalar rhoZ = symexpr::substitute(rho, {}, z);
  Scalar e = energy_function(rho, h);
  out.matchesWeightedBracket =
      symexpr::equals(d0.comps[0], rhoZ * canonical_bracket(e, fz));
  return out;
}

PolyEvolution evolution_operator_legendre(const Scalar& h, const Scalar& f) {
  const ChartPtr& pi = h.chart();
  require_legendre(pi);
  if (!symexpr::same_chart(pi, f.chart()))
    throw spec_error("operands live on different charts");
  ChartPtr j1 = symexpr::j1_chart(pi);
  const int n = pi->baseDim;

  std::map<int, Scalar> fibreSubs;
  for (int i : pi->positions(CoordRole::Fiber))
    for (int lam = 0; lam < n; ++lam)
      fibreSubs[j1->find_jet(i, lam)] =
          symexpr::embed(symexpr::diff(h, pi->find_momentum(i, lam)), j1);

  PolyEvolution out;
  out.form.chart = j1;
  std::set<int> residual;
  for (int mu = 0; mu < n; ++mu) {
    Scalar comp = symexpr::embed(symexpr::diff(f, mu), j1);
    for (int a = 0; a < pi->dim(); ++a) {
      if (pi->is_base(a)) continue;
      Scalar df = symexpr::diff(f, a);
      if (df.is_zero()) continue;
      comp = comp + Scalar::coordinate(j1, j1->find_jet(a, mu)) * symexpr::embed(df, j1);
    }
    std::map<int, Scalar> subs = fibreSubs;
    for (int i : pi->positions(CoordRole::Fiber)) {
      int diag = j1->find_jet(pi->find_momentum(i, mu), mu);
      Scalar value = symexpr::embed(minus(symexpr::diff(h, i)), j1);
      for (int lam = 0; lam < n; ++lam) {
        if (lam == mu) continue;
        value = value - Scalar::coordinate(j1, j1->find_jet(pi->find_momentum(i, lam), lam));
      }
      subs[diag] = std::move(value);
    }
    comp = symexpr::substitute(comp, subs, j1);
    for (int used : symexpr::used_coordinates(comp)) {
      CoordRole role = j1->coords[static_cast<std::size_t>(used)].role;
      if (role == CoordRole::Jet || role == CoordRole::Jet2) residual.insert(used);
    }
    out.form.comps.push_back(std::move(comp));
  }
  out.residualJets.assign(residual.begin(), residual.end());
  out.isFunctionOperator = out.residualJets.empty();
  return out;
}

HorizontalityCheck horizontality_check(const MultiVector& theta,
                                       const ConnectionFamily& family,
                                       const Scalar& rho) {
  const ChartPtr& chart = family.chart;
  if (chart->baseDim != 1)
    throw spec_error("horizontality check needs a one-dimensional base");
  if (!symexpr::same_chart(theta.chart, chart))
    throw spec_error("multivector lives on the wrong chart");
  if (theta.degree != 1)
    throw spec_error("horizontality check expects a vector field");
  require_base_only(rho);
  Scalar rhoC = symexpr::substitute(rho, {}, chart);
  MultiVector v = rhoC * theta;

  HorizontalityCheck out;
  if (!symexpr::equals(v.coefficient({0}), Scalar::from_int(chart, 1)))
    return out;

  std::map<int, int> paramAt;
  for (std::size_t i = 0; i < family.params.size(); ++i)
    paramAt[family.params[i].first] = static_cast<int>(i);
  std::vector<Scalar> values(family.params.size(), Scalar::zero(chart));
  for (int a = 1; a < chart->dim(); ++a) {
    Scalar comp = v.coefficient({a});
    auto pit = paramAt.find(a);
    if (pit != paramAt.end()) {
      values[static_cast<std::size_t>(pit->second)] = comp;
      continue;
    }
    auto fit = family.fixed.find({a, 0});
    Scalar want = fit == family.fixed.end() ? Scalar::zero(chart) : fit->second;
    if (!symexpr::equals(comp, want)) return out;
  }
  for (const ConnectionFamily::Constraint& con : family.constraints) {
    Scalar acc = Scalar::zero(chart);
    for (const auto& [idx, c] : con.coeffs)
      acc = acc + Scalar::constant(chart, c) * values[static_cast<std::size_t>(idx)];
    if (!symexpr::equals(acc, con.rhs)) return out;
  }
  out.horizontal = true;
  for (std::size_t i = 0; i < family.params.size(); ++i)
    out.assignment.emplace_back(family.param_name(static_cast<int>(i)), values[i]);
  return out;
}

}  // namespace covfield::covham
