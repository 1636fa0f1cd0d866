#pragma once

#include <vector>

#include "covfield/scalar.hpp"

namespace covfield::geometry {

using symexpr::ChartPtr;
using symexpr::Scalar;

// Result of solving A x = b over the field of rational expressions.
// When consistent, the full solution set is
//   particular + span(kernel),
// with particular assigning 0 to every free column. free_columns lists the
// non-pivot columns in ascending order; each kernel vector has value 1 at its
// free column and 0 at the others.
struct LinearSolution {
  bool consistent = false;
  std::vector<Scalar> particular;
  std::vector<std::vector<Scalar>> kernel;
  std::vector<int> pivot_columns;
  std::vector<int> free_columns;
};

LinearSolution solve_linear(std::vector<std::vector<Scalar>> a,
                            std::vector<Scalar> b, const ChartPtr& chart);

// Rank of a matrix of rational expressions, by Gaussian elimination.
int matrix_rank(std::vector<std::vector<Scalar>> a, const ChartPtr& chart);

}  // namespace covfield::geometry
