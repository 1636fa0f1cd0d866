#include "covfield/linsolve.hpp"

#include <algorithm>

#include "covfield/errors.hpp"

namespace covfield::geometry {

namespace {

// Reduced row echelon form in place. Returns the pivot column of each pivot
// row, in elimination order. b may be null (rank-only use).
std::vector<int> rref(std::vector<std::vector<Scalar>>& a,
                      std::vector<Scalar>* b, const ChartPtr& chart) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(a[0].size());
  for (const auto& row : a)
    if (static_cast<int>(row.size()) != cols)
      throw spec_error("ragged coefficient matrix");
  if (b && static_cast<int>(b->size()) != rows)
    throw spec_error("right-hand side size does not match matrix");

  Scalar minusOne = Scalar::from_int(chart, -1);
  std::vector<int> pivots;
  int pr = 0;
  for (int pc = 0; pc < cols && pr < rows; ++pc) {
    int hit = -1;
    for (int r = pr; r < rows; ++r) {
      if (!a[static_cast<std::size_t>(r)][static_cast<std::size_t>(pc)].is_zero()) {
        hit = r;
        break;
      }
    }
    if (hit < 0) continue;
    std::swap(a[static_cast<std::size_t>(pr)], a[static_cast<std::size_t>(hit)]);
    if (b) std::swap((*b)[static_cast<std::size_t>(pr)], (*b)[static_cast<std::size_t>(hit)]);
    Scalar inv = Scalar::from_int(chart, 1) / a[static_cast<std::size_t>(pr)][static_cast<std::size_t>(pc)];
    for (int c = pc; c < cols; ++c)
      a[static_cast<std::size_t>(pr)][static_cast<std::size_t>(c)] =
          inv * a[static_cast<std::size_t>(pr)][static_cast<std::size_t>(c)];
    if (b) (*b)[static_cast<std::size_t>(pr)] = inv * (*b)[static_cast<std::size_t>(pr)];
    for (int r = 0; r < rows; ++r) {
      if (r == pr) continue;
      Scalar f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(pc)];
      if (f.is_zero()) continue;
      Scalar nf = minusOne * f;
      for (int c = pc; c < cols; ++c)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] +
            nf * a[static_cast<std::size_t>(pr)][static_cast<std::size_t>(c)];
      if (b)
        (*b)[static_cast<std::size_t>(r)] =
            (*b)[static_cast<std::size_t>(r)] + nf * (*b)[static_cast<std::size_t>(pr)];
    }
    pivots.push_back(pc);
    ++pr;
  }
  return pivots;
}

}  // namespace

LinearSolution solve_linear(std::vector<std::vector<Scalar>> a,
                            std::vector<Scalar> b, const ChartPtr& chart) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(a[0].size());
  std::vector<int> pivots = rref(a, &b, chart);

  LinearSolution out;
  out.pivot_columns = pivots;
  out.consistent = true;
  for (int r = static_cast<int>(pivots.size()); r < rows; ++r) {
    if (!b[static_cast<std::size_t>(r)].is_zero()) {
      out.consistent = false;
      return out;
    }
  }

  std::vector<bool> isPivot(static_cast<std::size_t>(cols), false);
  for (int pc : pivots) isPivot[static_cast<std::size_t>(pc)] = true;
  for (int c = 0; c < cols; ++c)
    if (!isPivot[static_cast<std::size_t>(c)]) out.free_columns.push_back(c);

  out.particular.assign(static_cast<std::size_t>(cols), Scalar::zero(chart));
  for (std::size_t r = 0; r < pivots.size(); ++r)
    out.particular[static_cast<std::size_t>(pivots[r])] = b[r];

  Scalar minusOne = Scalar::from_int(chart, -1);
  for (int fc : out.free_columns) {
    std::vector<Scalar> v(static_cast<std::size_t>(cols), Scalar::zero(chart));
    v[static_cast<std::size_t>(fc)] = Scalar::from_int(chart, 1);
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      Scalar entry = a[r][static_cast<std::size_t>(fc)];
      if (!entry.is_zero())
        v[static_cast<std::size_t>(pivots[r])] = minusOne * entry;
    }
    out.kernel.push_back(std::move(v));
  }
  return out;
}

int matrix_rank(std::vector<std::vector<Scalar>> a, const ChartPtr& chart) {
  return static_cast<int>(rref(a, nullptr, chart).size());
}

}  // namespace covfield::geometry
