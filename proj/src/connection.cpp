#include "covfield/connection.hpp"

#include <sstream>

#include "covfield/errors.hpp"

namespace covfield::geometry {

using symexpr::CoordRole;

Scalar Connection::coefficient(int coordPos, int baseIdx) const {
  auto it = coeffs.find({coordPos, baseIdx});
  return it == coeffs.end() ? Scalar::zero(chart) : it->second;
}

Connection make_connection(const ChartPtr& chart,
                           std::map<std::pair<int, int>, Scalar> coeffs) {
  for (int p = 0; p < chart->dim(); ++p) {
    CoordRole role = chart->coords[static_cast<std::size_t>(p)].role;
    if (role == CoordRole::Jet || role == CoordRole::Jet2)
      throw spec_error("connections are defined on charts without jet coordinates");
  }
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    auto [pos, mu] = it->first;
    if (pos < 0 || pos >= chart->dim() || chart->is_base(pos))
      throw spec_error("connection coefficient index must be a non-base coordinate");
    if (mu < 0 || mu >= chart->baseDim)
      throw spec_error("connection base index out of range");
    if (!symexpr::same_chart(it->second.chart(), chart))
      throw spec_error("connection coefficient lives on the wrong chart");
    it = it->second.is_zero() ? coeffs.erase(it) : std::next(it);
  }
  Connection c;
  c.chart = chart;
  c.coeffs = std::move(coeffs);
  return c;
}

bool equal_connections(const Connection& a, const Connection& b) {
  if (!symexpr::same_chart(a.chart, b.chart)) return false;
  if (a.coeffs.size() != b.coeffs.size()) return false;
  auto ia = a.coeffs.begin();
  auto ib = b.coeffs.begin();
  for (; ia != a.coeffs.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!symexpr::equals(ia->second, ib->second)) return false;
  }
  return true;
}

TangentValuedForm connection_tangent_form(const Connection& c) {
  TangentValuedForm out;
  out.chart = c.chart;
  for (int mu = 0; mu < c.chart->baseDim; ++mu) {
    DiffForm dx = DiffForm::d_coordinate(c.chart, mu);
    out.parts.emplace_back(dx, mu);
    for (int p = 0; p < c.chart->dim(); ++p) {
      if (c.chart->is_base(p)) continue;
      Scalar g = c.coefficient(p, mu);
      if (g.is_zero()) continue;
      out.parts.emplace_back(g * dx, p);
    }
  }
  return out;
}

MultiVector connection_to_nvector(const Connection& c) {
  MultiVector out = MultiVector::function(Scalar::from_int(c.chart, 1));
  for (int mu = 0; mu < c.chart->baseDim; ++mu) {
    MultiVector lift = MultiVector::basis_vector(c.chart, mu);
    for (int p = 0; p < c.chart->dim(); ++p) {
      if (c.chart->is_base(p)) continue;
      Scalar g = c.coefficient(p, mu);
      if (g.is_zero()) continue;
      lift = lift + g * MultiVector::basis_vector(c.chart, p);
    }
    out = wedge(out, lift);
  }
  return out;
}

Connection nvector_to_connection(const MultiVector& v) {
  const ChartPtr& chart = v.chart;
  const int n = chart->baseDim;
  if (v.degree != n)
    throw math_error("multivector degree does not match the base dimension");
  Tuple base(static_cast<std::size_t>(n));
  for (int mu = 0; mu < n; ++mu) base[static_cast<std::size_t>(mu)] = mu;
  Scalar c0 = v.coefficient(base);
  if (c0.is_zero())
    throw math_error("multivector is not transverse to the fibres");
  Scalar inv = Scalar::from_int(chart, 1) / c0;

  std::map<std::pair<int, int>, Scalar> coeffs;
  for (int mu = 0; mu < n; ++mu) {
    for (int p = 0; p < chart->dim(); ++p) {
      if (chart->is_base(p)) continue;
      Tuple t = base;
      t[static_cast<std::size_t>(mu)] = p;
      Tuple sorted = t;
      int sign = sort_tuple(sorted);
      if (sign == 0) continue;
      Scalar g = inv * v.coefficient(sorted);
      if (sign < 0) g = Scalar::from_int(chart, -1) * g;
      if (!g.is_zero()) coeffs[{p, mu}] = g;
    }
  }
  Connection c = make_connection(chart, std::move(coeffs));
  MultiVector rebuilt = c0 * connection_to_nvector(c);
  if (!equal_multivectors(rebuilt, v))
    throw math_error("multivector is not decomposable into horizontal lifts");
  return c;
}

std::map<std::pair<int, int>, Scalar> covariant_differential(const Connection& c) {
  ChartPtr j1 = symexpr::j1_chart(c.chart);
  std::map<std::pair<int, int>, Scalar> out;
  for (int p = 0; p < c.chart->dim(); ++p) {
    if (c.chart->is_base(p)) continue;
    for (int mu = 0; mu < c.chart->baseDim; ++mu) {
      int jpos = j1->find_jet(p, mu);
      if (jpos < 0) throw spec_error("jet coordinate missing from the first jet chart");
      Scalar comp = Scalar::coordinate(j1, jpos) - symexpr::embed(c.coefficient(p, mu), j1);
      out[{p, mu}] = comp;
    }
  }
  return out;
}

std::map<int, Scalar> dynamic_shell(const Connection& c) {
  ChartPtr j1 = symexpr::j1_chart(c.chart);
  std::map<int, Scalar> out;
  for (int p = 0; p < c.chart->dim(); ++p) {
    if (c.chart->is_base(p)) continue;
    for (int mu = 0; mu < c.chart->baseDim; ++mu) {
      int jpos = j1->find_jet(p, mu);
      if (jpos < 0) throw spec_error("jet coordinate missing from the first jet chart");
      out[jpos] = symexpr::embed(c.coefficient(p, mu), j1);
    }
  }
  return out;
}

bool equal_horizontal(const HorizontalOneForm& a, const HorizontalOneForm& b) {
  if (!symexpr::same_chart(a.chart, b.chart)) return false;
  if (a.comps.size() != b.comps.size()) return false;
  for (std::size_t i = 0; i < a.comps.size(); ++i)
    if (!symexpr::equals(a.comps[i], b.comps[i])) return false;
  return true;
}

std::string render_horizontal(const HorizontalOneForm& a) {
  DiffForm form = DiffForm::zero(a.chart, 1);
  for (std::size_t mu = 0; mu < a.comps.size(); ++mu)
    form.add_term({static_cast<int>(mu)}, a.comps[mu]);
  return render_form(form);
}

HorizontalOneForm evolution_operator(const Connection& c, const Scalar& f) {
  if (!symexpr::same_chart(f.chart(), c.chart))
    throw spec_error("function lives on a different chart than the connection");
  HorizontalOneForm out;
  out.chart = c.chart;
  for (int mu = 0; mu < c.chart->baseDim; ++mu) {
    Scalar comp = symexpr::diff(f, mu);
    for (int p = 0; p < c.chart->dim(); ++p) {
      if (c.chart->is_base(p)) continue;
      Scalar g = c.coefficient(p, mu);
      if (g.is_zero()) continue;
      comp = comp + g * symexpr::diff(f, p);
    }
    out.comps.push_back(comp);
  }
  return out;
}

}  // namespace covfield::geometry
