#pragma once

#include <optional>
#include <string>

#include "covfield/globality.hpp"

namespace covfield::cli {

using globality::Atlas;
using symexpr::ChartPtr;
using symexpr::Scalar;

// A resolved problem file: the charts of the fibred manifold and its momentum
// bundles, plus whatever data sections the file provides.
struct Problem {
  ChartPtr y;
  ChartPtr legendre;
  ChartPtr homogeneous;
  ChartPtr jetLegendre;
  std::optional<Scalar> hamiltonian;  // on the Legendre chart
  std::optional<Scalar> lagrangian;   // on the first jet chart of y
  Scalar rho;                         // base-only and nonzero, defaults to 1
  std::optional<Atlas> atlas;         // from the [chart2] section
};

// Parses the INI problem format. Sections: [base] coords, [fiber] coords,
// [hamiltonian] density, [lagrangian] density, [density] rho, [chart2]
// base/fiber/forward.<coord>/inverse.<coord>. Unknown sections or keys are
// rejected; error messages carry line numbers.
Problem parse_problem(const std::string& text);

Problem load_problem(const std::string& path);

}  // namespace covfield::cli
