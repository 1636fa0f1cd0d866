#include "covfield/forms.hpp"

#include <algorithm>
#include <sstream>

#include "covfield/errors.hpp"

namespace covfield::geometry {

using symexpr::Rat;
using symexpr::render;

int sort_tuple(Tuple& t) {
  // insertion sort, counting transpositions
  int sign = 1;
  for (std::size_t i = 1; i < t.size(); ++i) {
    int v = t[i];
    std::size_t j = i;
    while (j > 0 && t[j - 1] > v) {
      t[j] = t[j - 1];
      --j;
      sign = -sign;
    }
    t[j] = v;
  }
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i - 1] == t[i]) return 0;
  return sign;
}

namespace {

void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
  if (!symexpr::same_chart(a, b))
    throw spec_error("operands live on different charts");
}

using Terms = std::map<Tuple, Scalar>;

void terms_add(Terms& terms, Tuple t, const Scalar& c) {
  if (c.is_zero()) return;
  int sign = sort_tuple(t);
  if (sign == 0) return;
  Scalar v = sign > 0 ? c : Scalar::from_int(c.chart(), -1) * c;
  auto it = terms.find(t);
  if (it == terms.end()) {
    terms.emplace(std::move(t), v);
  } else {
    it->second = it->second + v;
    if (it->second.is_zero()) terms.erase(it);
  }
}

Terms terms_sum(const Terms& a, const Terms& b, int bsign, const ChartPtr& chart) {
  Terms out = a;
  Scalar s = Scalar::from_int(chart, bsign);
  for (const auto& [t, c] : b) terms_add(out, t, bsign > 0 ? c : s * c);
  return out;
}

Terms terms_scale(const Terms& a, const Scalar& c) {
  Terms out;
  for (const auto& [t, v] : a) {
    Scalar w = c * v;
    if (!w.is_zero()) out.emplace(t, w);
  }
  return out;
}

Terms terms_wedge(const Terms& a, const Terms& b) {
  Terms out;
  for (const auto& [ta, ca] : a)
    for (const auto& [tb, cb] : b) {
      Tuple t = ta;
      t.insert(t.end(), tb.begin(), tb.end());
      terms_add(out, std::move(t), ca * cb);
    }
  return out;
}

bool terms_equal(const Terms& a, const Terms& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!symexpr::equals(ia->second, ib->second)) return false;
  }
  return true;
}

// Removes index i from tuple t if present; reports the sign (-1)^k where k is
// the position of i. Returns false when i does not occur.
bool tuple_remove(const Tuple& t, int i, Tuple& rest, int& sign) {
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] == i) {
      rest = t;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      sign = (k % 2 == 0) ? 1 : -1;
      return true;
    }
  }
  return false;
}

std::string render_terms(const Terms& terms, const ChartPtr& chart,
                         const std::string& wrap) {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, c] : terms) {
    bool neg = false;
    std::string body;
    if (c.num().terms().size() > 1) {
      body = "(" + render(c) + ")";
    } else {
      std::string s = render(c);
      neg = !s.empty() && s[0] == '-';
      if (neg) s = s.substr(1);
      body = (s == "1") ? "" : s;
    }
    if (first) {
      if (neg) os << "-";
      first = false;
    } else {
      os << (neg ? " - " : " + ");
    }
    std::string factors;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k) factors += "∧";
      factors += wrap + "(" + chart->coords[static_cast<std::size_t>(t[k])].name + ")";
    }
    if (t.empty()) {
      os << (body.empty() ? "1" : body);
    } else if (body.empty()) {
      os << factors;
    } else {
      os << body << "*" << factors;
    }
  }
  return os.str();
}

}  // namespace

DiffForm DiffForm::zero(const ChartPtr& chart, int degree) {
  DiffForm a;
  a.chart = chart;
  a.degree = degree;
  return a;
}

DiffForm DiffForm::function(const Scalar& f) {
  DiffForm a = zero(f.chart(), 0);
  a.add_term({}, f);
  return a;
}

DiffForm DiffForm::d_coordinate(const ChartPtr& chart, int pos) {
  if (pos < 0 || pos >= chart->dim())
    throw spec_error("coordinate position out of range");
  DiffForm a = zero(chart, 1);
  a.add_term({pos}, Scalar::from_int(chart, 1));
  return a;
}

void DiffForm::add_term(Tuple t, const Scalar& c) {
  if (static_cast<int>(t.size()) != degree)
    throw spec_error("tuple length does not match form degree");
  for (int i : t)
    if (i < 0 || i >= chart->dim())
      throw spec_error("coordinate position out of range");
  terms_add(terms, std::move(t), c);
}

Scalar DiffForm::coefficient(const Tuple& t) const {
  auto it = terms.find(t);
  return it == terms.end() ? Scalar::zero(chart) : it->second;
}

DiffForm operator+(const DiffForm& a, const DiffForm& b) {
  require_same_chart(a.chart, b.chart);
  if (a.degree != b.degree) throw spec_error("cannot add forms of different degrees");
  DiffForm out = DiffForm::zero(a.chart, a.degree);
  out.terms = terms_sum(a.terms, b.terms, 1, a.chart);
  return out;
}

DiffForm operator-(const DiffForm& a, const DiffForm& b) {
  require_same_chart(a.chart, b.chart);
  if (a.degree != b.degree) throw spec_error("cannot subtract forms of different degrees");
  DiffForm out = DiffForm::zero(a.chart, a.degree);
  out.terms = terms_sum(a.terms, b.terms, -1, a.chart);
  return out;
}

DiffForm operator*(const Scalar& c, const DiffForm& a) {
  require_same_chart(c.chart(), a.chart);
  DiffForm out = DiffForm::zero(a.chart, a.degree);
  out.terms = terms_scale(a.terms, c);
  return out;
}

bool equal_forms(const DiffForm& a, const DiffForm& b) {
  return symexpr::same_chart(a.chart, b.chart) && a.degree == b.degree &&
         terms_equal(a.terms, b.terms);
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
  require_same_chart(a.chart, b.chart);
  DiffForm out = DiffForm::zero(a.chart, a.degree + b.degree);
  out.terms = terms_wedge(a.terms, b.terms);
  return out;
}

DiffForm exterior_derivative(const DiffForm& a) {
  DiffForm out = DiffForm::zero(a.chart, a.degree + 1);
  for (const auto& [t, c] : a.terms) {
    for (int p = 0; p < a.chart->dim(); ++p) {
      Scalar dc = symexpr::diff(c, p);
      if (dc.is_zero()) continue;
      Tuple nt;
      nt.reserve(t.size() + 1);
      nt.push_back(p);
      nt.insert(nt.end(), t.begin(), t.end());
      out.add_term(std::move(nt), dc);
    }
  }
  return out;
}

MultiVector MultiVector::zero(const ChartPtr& chart, int degree) {
  MultiVector a;
  a.chart = chart;
  a.degree = degree;
  return a;
}

MultiVector MultiVector::function(const Scalar& f) {
  MultiVector a = zero(f.chart(), 0);
  a.add_term({}, f);
  return a;
}

MultiVector MultiVector::basis_vector(const ChartPtr& chart, int pos) {
  if (pos < 0 || pos >= chart->dim())
    throw spec_error("coordinate position out of range");
  MultiVector a = zero(chart, 1);
  a.add_term({pos}, Scalar::from_int(chart, 1));
  return a;
}

void MultiVector::add_term(Tuple t, const Scalar& c) {
  if (static_cast<int>(t.size()) != degree)
    throw spec_error("tuple length does not match multivector degree");
  for (int i : t)
    if (i < 0 || i >= chart->dim())
      throw spec_error("coordinate position out of range");
  terms_add(terms, std::move(t), c);
}

Scalar MultiVector::coefficient(const Tuple& t) const {
  auto it = terms.find(t);
  return it == terms.end() ? Scalar::zero(chart) : it->second;
}

MultiVector operator+(const MultiVector& a, const MultiVector& b) {
  require_same_chart(a.chart, b.chart);
  if (a.degree != b.degree)
    throw spec_error("cannot add multivectors of different degrees");
  MultiVector out = MultiVector::zero(a.chart, a.degree);
  out.terms = terms_sum(a.terms, b.terms, 1, a.chart);
  return out;
}

MultiVector operator-(const MultiVector& a, const MultiVector& b) {
  require_same_chart(a.chart, b.chart);
  if (a.degree != b.degree)
    throw spec_error("cannot subtract multivectors of different degrees");
  MultiVector out = MultiVector::zero(a.chart, a.degree);
  out.terms = terms_sum(a.terms, b.terms, -1, a.chart);
  return out;
}

MultiVector operator*(const Scalar& c, const MultiVector& a) {
  require_same_chart(c.chart(), a.chart);
  MultiVector out = MultiVector::zero(a.chart, a.degree);
  out.terms = terms_scale(a.terms, c);
  return out;
}

bool equal_multivectors(const MultiVector& a, const MultiVector& b) {
  return symexpr::same_chart(a.chart, b.chart) && a.degree == b.degree &&
         terms_equal(a.terms, b.terms);
}

MultiVector wedge(const MultiVector& a, const MultiVector& b) {
  require_same_chart(a.chart, b.chart);
  MultiVector out = MultiVector::zero(a.chart, a.degree + b.degree);
  out.terms = terms_wedge(a.terms, b.terms);
  return out;
}

DiffForm contract(const MultiVector& v, const DiffForm& w) {
  require_same_chart(v.chart, w.chart);
  if (v.degree > w.degree)
    throw spec_error("cannot contract a multivector into a form of lower degree");
  DiffForm out = DiffForm::zero(w.chart, w.degree - v.degree);
  for (const auto& [tv, cv] : v.terms) {
    for (const auto& [tw, cw] : w.terms) {
      Tuple rest = tw;
      int total = 1;
      bool alive = true;
      // innermost factor of the multivector tuple acts first
      for (std::size_t k = tv.size(); k-- > 0;) {
        Tuple next;
        int sign = 0;
        if (!tuple_remove(rest, tv[k], next, sign)) {
          alive = false;
          break;
        }
        rest = std::move(next);
        total *= sign;
      }
      if (!alive) continue;
      Scalar c = cv * cw;
      if (total < 0) c = Scalar::from_int(c.chart(), -1) * c;
      out.add_term(rest, c);
    }
  }
  return out;
}

namespace {

// Left derivative with respect to the basis direction i: strips i from each
// tuple with the sign of moving it to the front.
MultiVector xi_partial(const MultiVector& a, int i) {
  MultiVector out = MultiVector::zero(a.chart, a.degree > 0 ? a.degree - 1 : 0);
  if (a.degree == 0) return out;
  for (const auto& [t, c] : a.terms) {
    Tuple rest;
    int sign = 0;
    if (!tuple_remove(t, i, rest, sign)) continue;
    Scalar v = sign > 0 ? c : Scalar::from_int(c.chart(), -1) * c;
    out.add_term(rest, v);
  }
  return out;
}

MultiVector coeff_partial(const MultiVector& a, int i) {
  MultiVector out = MultiVector::zero(a.chart, a.degree);
  for (const auto& [t, c] : a.terms) {
    Scalar dc = symexpr::diff(c, i);
    if (!dc.is_zero()) out.add_term(t, dc);
  }
  return out;
}

}  // namespace

MultiVector schouten_nijenhuis(const MultiVector& a, const MultiVector& b) {
  require_same_chart(a.chart, b.chart);
  int p = a.degree, q = b.degree;
  if (p == 0 && q == 0) return MultiVector::zero(a.chart, 0);
  MultiVector out = MultiVector::zero(a.chart, p + q - 1);
  bool plus = (((p - 1) * (q - 1)) % 2) != 0;
  for (int i = 0; i < a.chart->dim(); ++i) {
    MultiVector da = xi_partial(a, i);
    if (!da.is_zero()) {
      MultiVector term = wedge(da, coeff_partial(b, i));
      if (!term.is_zero()) out = out + term;
    }
    MultiVector db = xi_partial(b, i);
    if (!db.is_zero()) {
      MultiVector term2 = wedge(db, coeff_partial(a, i));
      if (!term2.is_zero()) out = plus ? out + term2 : out - term2;
    }
  }
  return out;
}

int TangentValuedForm::term_count() const {
  int n = 0;
  for (const auto& [form, pos] : parts) {
    (void)pos;
    n += static_cast<int>(form.terms.size());
  }
  return n;
}

bool equal_tvf(const TangentValuedForm& a, const TangentValuedForm& b) {
  if (!symexpr::same_chart(a.chart, b.chart)) return false;
  // collect by tangent position, then compare componentwise
  std::map<int, DiffForm> ca, cb;
  for (const auto& [form, pos] : a.parts) {
    auto it = ca.find(pos);
    if (it == ca.end())
      ca.emplace(pos, form);
    else
      it->second = it->second + form;
  }
  for (const auto& [form, pos] : b.parts) {
    auto it = cb.find(pos);
    if (it == cb.end())
      cb.emplace(pos, form);
    else
      it->second = it->second + form;
  }
  for (auto it = ca.begin(); it != ca.end();)
    it = it->second.is_zero() ? ca.erase(it) : std::next(it);
  for (auto it = cb.begin(); it != cb.end();)
    it = it->second.is_zero() ? cb.erase(it) : std::next(it);
  if (ca.size() != cb.size()) return false;
  auto ia = ca.begin();
  auto ib = cb.begin();
  for (; ia != ca.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!equal_forms(ia->second, ib->second)) return false;
  }
  return true;
}

std::string render_form(const DiffForm& a) {
  return render_terms(a.terms, a.chart, "d");
}

std::string render_multivector(const MultiVector& a) {
  return render_terms(a.terms, a.chart, "∂");
}

std::string render_tvf(const TangentValuedForm& a) {
  if (a.parts.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [form, pos] : a.parts) {
    if (form.is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << render_form(form) << ")⊗∂("
       << a.chart->coords[static_cast<std::size_t>(pos)].name << ")";
  }
  if (first) return "0";
  return os.str();
}

}  // namespace covfield::geometry
