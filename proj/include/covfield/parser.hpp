#pragma once

#include <map>
#include <string>

#include "covfield/scalar.hpp"

namespace covfield::symexpr {

// Context for parsing: the chart resolving coordinate names, plus optional
// named auxiliary expressions (the CLI registers the density under "rho").
struct ParseContext {
  ChartPtr chart;
  std::map<std::string, Scalar> named;
};

// Recursive-descent parser for the expression grammar
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := atom ('^' nonneg-integer)?
//   atom   := integer | ident | fn '(' ... ')' | '(' expr ')' | '-' factor
// with reserved forms jet(i,lam), mom(i,lam), pp, rho and kernels
// sin, cos, exp. Returns the canonical Scalar.
Scalar parse_scalar(const std::string& text, const ParseContext& ctx);
Scalar parse_scalar(const std::string& text, const ChartPtr& chart);

}  // namespace covfield::symexpr
