#pragma once

#include <map>
#include <utility>
#include <vector>

#include "covfield/forms.hpp"

namespace covfield::geometry {

// Ehresmann connection on a fibred chart, given by coefficients gamma[a][mu]
// for every non-base coordinate a and base index mu. Missing entries are zero.
struct Connection {
  ChartPtr chart;
  std::map<std::pair<int, int>, Scalar> coeffs;

  Scalar coefficient(int coordPos, int baseIdx) const;
};

// Validates positions and that no coefficient involves jet coordinates.
Connection make_connection(const ChartPtr& chart,
                           std::map<std::pair<int, int>, Scalar> coeffs);

bool equal_connections(const Connection& a, const Connection& b);

// The horizontal lift presented as a tangent-valued horizontal one-form
//   dx^mu ⊗ (∂_mu + gamma^a_mu ∂_a).
TangentValuedForm connection_tangent_form(const Connection& c);

// Wedge of the horizontal lifts of all base directions, in base order.
MultiVector connection_to_nvector(const Connection& c);

// Inverse of connection_to_nvector up to normalization. Requires the
// coefficient of the pure base tuple to be nonzero (transversality) and the
// normalized multivector to be decomposable into horizontal lifts.
Connection nvector_to_connection(const MultiVector& v);

// First-order covariant differential relative to the connection: for each
// non-base coordinate a and base index mu the component jet(a,mu) - gamma^a_mu
// on the first jet chart of c.chart.
std::map<std::pair<int, int>, Scalar> covariant_differential(const Connection& c);

// Substitution map sending each jet coordinate of the first jet chart to the
// matching connection coefficient. Composing with it restricts an expression
// to the sections holonomic for the connection.
std::map<int, Scalar> dynamic_shell(const Connection& c);

// Horizontal one-form on the connection's chart, one component per base index.
struct HorizontalOneForm {
  ChartPtr chart;
  std::vector<Scalar> comps;
};

bool equal_horizontal(const HorizontalOneForm& a, const HorizontalOneForm& b);
std::string render_horizontal(const HorizontalOneForm& a);

// Differential of f along the horizontal lift: component mu is
//   ∂_mu f + sum_a gamma^a_mu ∂_a f.
HorizontalOneForm evolution_operator(const Connection& c, const Scalar& f);

}  // namespace covfield::geometry
