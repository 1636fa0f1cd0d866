#pragma once

#include <string>
#include <vector>

#include "covfield/connection.hpp"
#include "covfield/transition.hpp"

namespace covfield::globality {

using geometry::HorizontalOneForm;
using geometry::Transition;
using symexpr::BundleKind;
using symexpr::ChartPtr;
using symexpr::Scalar;

// Two-chart atlas: a fibred transition plus the induced transitions on the
// requested bundles.
struct Atlas {
  Transition y;
  std::map<BundleKind, Transition> induced;
};

Atlas make_atlas(const Transition& yTransition,
                 const std::vector<BundleKind>& kinds);
const Transition& atlas_transition(const Atlas& atlas, BundleKind kind);

enum class Verdict { Global, NotGlobal };
std::string verdict_name(Verdict v);

// Do the two representatives agree on the overlap? The discrepancy is
// repA - repB∘φ, expressed in source coordinates.
struct FunctionCheck {
  Verdict verdict = Verdict::NotGlobal;
  Scalar discrepancy;
};
FunctionCheck check_global_function(const Scalar& repA, const Scalar& repB,
                                    const Transition& t);

// Componentwise check of f_mu = sum_lambda (f'_lambda∘φ) dx'^lambda/dx^mu.
struct HorizontalFormCheck {
  Verdict verdict = Verdict::NotGlobal;
  std::vector<Scalar> discrepancy;
};
HorizontalFormCheck check_global_horizontal_form(const HorizontalOneForm& a,
                                                 const HorizontalOneForm& b,
                                                 const Transition& t);

// A density with representative 1 in both charts exists exactly when the
// base Jacobian determinant is identically one.
struct DensityCheck {
  bool unitDensityExists = false;
  Scalar jacobian;
  bool orientationReversing = false;
};
DensityCheck check_unit_density(const Transition& yTransition);

// f ∘ φ^{-1}: the same local object written in target coordinates.
Scalar transport_function(const Scalar& fA, const Transition& t);

// The Hamiltonian representative in the second chart, read off from the
// image of the section pp = -h under the homogeneous transition.
Scalar induce_hamiltonian(const Scalar& hA, const Atlas& atlas);

// Density coefficient in the second chart: transported and rescaled by the
// inverse base Jacobian.
Scalar transport_density(const Scalar& rhoA, const Transition& yTransition);

struct ReportEntry {
  std::string name;
  std::string verdict;
  std::string detail;
};

// Runs every globality check of the toolkit for a Hamiltonian density, a
// probe function, and a density coefficient given in the first chart.
std::vector<ReportEntry> globality_report(const Scalar& hA, const Scalar& fA,
                                          const Scalar& rhoA,
                                          const Atlas& atlas);

}  // namespace covfield::globality
