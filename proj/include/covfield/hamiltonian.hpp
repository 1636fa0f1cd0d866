#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "covfield/connection.hpp"
#include "covfield/forms.hpp"

namespace covfield::covham {

using geometry::Connection;
using geometry::DiffForm;
using geometry::HorizontalOneForm;
using geometry::MultiVector;
using geometry::TangentValuedForm;
using symexpr::ChartPtr;
using symexpr::Rat;
using symexpr::Scalar;

// Base volume form dx^0∧...∧dx^{n-1} and its contraction with ∂_mu.
DiffForm volume_form(const ChartPtr& chart);
DiffForm volume_contracted(const ChartPtr& chart, int mu);

// Copies a form onto a chart containing coordinates of the same names,
// remapping tuple positions and embedding coefficients.
DiffForm embed_form(const DiffForm& a, const ChartPtr& target);

// Canonical n-form pp*w + sum p^lambda_i dy^i∧w_lambda on a homogeneous
// momentum chart.
DiffForm liouville_form(const ChartPtr& z);

// Its exterior differential.
DiffForm multisymplectic_form(const ChartPtr& z);

// Vertical-cotangent-valued structure on the Legendre bundle:
// sum_lambda (dp^lambda_i∧dy^i∧w) ⊗ ∂_lambda.
TangentValuedForm polysymplectic_form(const ChartPtr& pi);

// For a Hamiltonian density h on a Legendre chart, the n-form
// sum p^lambda_i dy^i∧w_lambda - h*w.
DiffForm hamiltonian_form(const Scalar& h);

// The n-form (pp + h)*w on the homogeneous chart, computed as the difference
// of the canonical form and the pulled-back Hamiltonian form.
DiffForm multisymplectic_hamiltonian_density(const Scalar& h);

// Fibre derivative of a first-order Lagrangian density: momentum position on
// the Legendre chart -> dL/d(jet) on the source jet chart.
std::map<int, Scalar> legendre_map(const Scalar& lagrangian);

// Poisson-type bracket of functions on a one-dimensional-base Legendre chart,
// pairing each fibre coordinate with its momentum.
Scalar vertical_bracket(const Scalar& f, const Scalar& g);

// Bracket of functions on the homogeneous chart with one base coordinate,
// additionally pairing the base coordinate with pp.
Scalar canonical_bracket(const Scalar& f, const Scalar& g);

// The vector field v with v ⌟ d(liouville) = -df on the homogeneous chart.
MultiVector hamiltonian_vector_field(const Scalar& f);

// Affine family of connections: fixed coefficients plus named parameter
// slots subject to linear constraints with rational coefficients.
struct ConnectionFamily {
  struct Constraint {
    std::map<int, Rat> coeffs;  // parameter index -> coefficient
    Scalar rhs;
  };

  ChartPtr chart;
  std::map<std::pair<int, int>, Scalar> fixed;
  std::vector<std::pair<int, int>> params;
  std::vector<Constraint> constraints;

  int free_dimension() const;
  std::string param_name(int i) const;
  Connection instantiate(const std::vector<Scalar>& values) const;
  // instantiate with every unconstrained degree of freedom set to the given
  // constant, solving the constraints for the rest
  Connection instantiate_constant(long fill) const;
};

// Connections whose horizontal lift pairs with the polysymplectic structure
// of h: fibre coefficients are determined, momentum coefficients are free up
// to one trace constraint per fibre coordinate.
ConnectionFamily hamiltonian_connection_polysymplectic(const Scalar& h);

// Solves dx∧(v ⌟ Omega) = d((pp+h)dx) on the homogeneous chart of a
// one-dimensional base for the horizontal lift v of a connection. The
// pp-direction stays a free parameter.
ConnectionFamily solve_hamiltonian_connection(const Scalar& h);

// Forgets the pp-direction of a connection on the homogeneous chart,
// producing a connection on the Legendre chart. Requires the remaining
// coefficients to be independent of pp.
Connection project_zeta(const Connection& conn, const ChartPtr& legendre);

struct Equation {
  Scalar lhs, rhs;
};
std::string render_equation(const Equation& e);

// First-order equations on the jet chart of the Legendre bundle: one solved
// equation per fibre jet and one trace equation per fibre coordinate.
std::vector<Equation> hamilton_equations(const Scalar& h);

struct DynamicVerdict {
  bool dynamic = false;
  int freeJetDimension = 0;
};

// Whether a system of jet-affine equations determines every jet coordinate of
// the chart uniquely; reports the dimension of the unconstrained jet space.
DynamicVerdict is_dynamic_equation(const std::vector<Equation>& eqs,
                                   const ChartPtr& j1);

// (pp + h)/rho on the homogeneous chart. rho must be a base-only expression.
Scalar energy_function(const Scalar& rho, const Scalar& h);

struct MultivectorSolve {
  enum class Status { Solved, DegreeObstruction, InconsistentSystem };
  Status status = Status::DegreeObstruction;
  int requiredDegree = 0;
  MultiVector theta;
};

// Solves theta ⌟ omega = d(sigma) for a multivector of degree
// deg(omega) - deg(sigma) - 1, when that degree is at least one.
MultivectorSolve solve_hamiltonian_multivector(const DiffForm& sigma,
                                               const DiffForm& omega);

// (d/dx f + {h,f})dx on the Legendre chart with one base coordinate.
HorizontalOneForm evolution_operator_vertical(const Scalar& h, const Scalar& f);

struct EvolutionIdentities {
  HorizontalOneForm form;
  bool gammaIndependent = false;
  bool matchesCanonicalBracket = false;
  bool matchesWeightedBracket = false;
};

// Differential of a pp-free function along the solved connection family on
// the homogeneous chart, with the bracket reformulations checked exactly.
EvolutionIdentities evolution_operator_homogeneous(const Scalar& h,
                                                   const Scalar& f,
                                                   const Scalar& rho);

struct PolyEvolution {
  HorizontalOneForm form;  // components on the jet chart of the Legendre bundle
  std::vector<int> residualJets;
  bool isFunctionOperator = false;
};

// Total differential of f along solutions: fibre jets are substituted from
// the solved equations and the diagonal momentum jet of each component is
// eliminated through the trace equation. Remaining jets are reported.
PolyEvolution evolution_operator_legendre(const Scalar& h, const Scalar& f);

struct HorizontalityCheck {
  bool horizontal = false;
  std::vector<std::pair<std::string, Scalar>> assignment;
};

// Whether rho * theta is the horizontal lift of a member of the family;
// reports the parameter values that realize it.
HorizontalityCheck horizontality_check(const MultiVector& theta,
                                       const ConnectionFamily& family,
                                       const Scalar& rho);

}  // namespace covfield::covham
