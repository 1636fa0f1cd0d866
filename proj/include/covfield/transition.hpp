#pragma once

#include <map>

#include "covfield/forms.hpp"

namespace covfield::geometry {

// Invertible fibred coordinate change between two charts of the same bundle.
// forward maps each target coordinate to its expression in source
// coordinates; inverse maps each source coordinate to its expression in
// target coordinates.
struct Transition {
  ChartPtr source;
  ChartPtr target;
  std::map<int, Scalar> forward;
  std::map<int, Scalar> inverse;
};

// Validates completeness, fibredness (the image of a coordinate only depends
// on coordinates at or below its level of the bundle), and that the two maps
// invert each other exactly.
Transition make_transition(const ChartPtr& source, const ChartPtr& target,
                           std::map<int, Scalar> forward,
                           std::map<int, Scalar> inverse);

Transition inverse_of(const Transition& t);

// Compose a: A->B with b: B->C into A->C.
Transition compose(const Transition& a, const Transition& b);

// f ∘ φ for a function f on the target chart.
Scalar pullback(const Scalar& f, const Transition& t);

// φ*ω for a form on the target chart.
DiffForm pullback(const DiffForm& w, const Transition& t);

// Lifts a transition of fibred charts to the named bundle. Momentum and pp
// images are solved from invariance of the canonical contents; jet images
// come from the contact structure. The result is fully verified.
Transition induced_transition(const Transition& yTransition,
                              symexpr::BundleKind kind);

}  // namespace covfield::geometry
