#pragma once

#include <map>
#include <vector>

#include "covfield/scalar.hpp"

namespace covfield::geometry {

using symexpr::Chart;
using symexpr::ChartPtr;
using symexpr::Scalar;

// Strictly increasing chart positions indexing a wedge of basis covectors
// (or basis vectors for multivectors).
using Tuple = std::vector<int>;

// Sorts a tuple ascending in place; returns the permutation sign (+1/-1) or 0
// if an index repeats.
int sort_tuple(Tuple& t);

// Exterior differential form in chart coordinates. Terms map strictly
// increasing tuples to Scalar coefficients; zero coefficients are dropped.
// Degree 0 keeps a single empty-tuple term.
struct DiffForm {
  ChartPtr chart;
  int degree = 0;
  std::map<Tuple, Scalar> terms;

  static DiffForm zero(const ChartPtr& chart, int degree);
  static DiffForm function(const Scalar& f);
  static DiffForm d_coordinate(const ChartPtr& chart, int pos);

  void add_term(Tuple t, const Scalar& c);
  bool is_zero() const { return terms.empty(); }
  Scalar coefficient(const Tuple& t) const;
};

DiffForm operator+(const DiffForm& a, const DiffForm& b);
DiffForm operator-(const DiffForm& a, const DiffForm& b);
DiffForm operator*(const Scalar& c, const DiffForm& a);
bool equal_forms(const DiffForm& a, const DiffForm& b);

DiffForm wedge(const DiffForm& a, const DiffForm& b);
DiffForm exterior_derivative(const DiffForm& a);

// Multivector field: sums of coefficient * wedge of coordinate vector fields.
struct MultiVector {
  ChartPtr chart;
  int degree = 0;
  std::map<Tuple, Scalar> terms;

  static MultiVector zero(const ChartPtr& chart, int degree);
  static MultiVector function(const Scalar& f);
  static MultiVector basis_vector(const ChartPtr& chart, int pos);

  void add_term(Tuple t, const Scalar& c);
  bool is_zero() const { return terms.empty(); }
  Scalar coefficient(const Tuple& t) const;
};

MultiVector operator+(const MultiVector& a, const MultiVector& b);
MultiVector operator-(const MultiVector& a, const MultiVector& b);
MultiVector operator*(const Scalar& c, const MultiVector& a);
bool equal_multivectors(const MultiVector& a, const MultiVector& b);

MultiVector wedge(const MultiVector& a, const MultiVector& b);

// Interior product v ⌟ w. A decomposable tuple acts with its innermost
// (last-listed) factor first: (u1∧...∧ur) ⌟ w = u1 ⌟ (... ⌟ (ur ⌟ w)).
// Degree-0 multivectors act by multiplication.
DiffForm contract(const MultiVector& v, const DiffForm& w);

// Schouten-Nijenhuis bracket, graded so that it restricts to the Lie bracket
// on vector fields and satisfies [u,v] = -(-1)^((|u|-1)(|v|-1)) [v,u].
MultiVector schouten_nijenhuis(const MultiVector& a, const MultiVector& b);

// Tangent-valued form: pairs of a component form with the chart position of
// the tangent direction it multiplies.
struct TangentValuedForm {
  ChartPtr chart;
  std::vector<std::pair<DiffForm, int>> parts;

  int term_count() const;
};

bool equal_tvf(const TangentValuedForm& a, const TangentValuedForm& b);

std::string render_form(const DiffForm& a);
std::string render_multivector(const MultiVector& a);
std::string render_tvf(const TangentValuedForm& a);

}  // namespace covfield::geometry
