#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <set>
#include <string>

#include "covfield/chart.hpp"

namespace covfield::symexpr {

using Rat = mpq_class;

// Opaque function kernels with registered derivative rules.
enum class KernelFn { Sin, Cos, Exp };
const char* kernel_fn_name(KernelFn fn);

struct KernelApp;

// A polynomial variable: a chart coordinate (by position) or an opaque kernel
// application treated as an independent symbol. Kernels order after all
// coordinates, by their canonical render key.
struct Var {
  int coord = -1;
  std::shared_ptr<const KernelApp> kernel;

  bool is_coord() const { return coord >= 0; }
};

bool operator<(const Var& a, const Var& b);
bool operator==(const Var& a, const Var& b);
inline bool operator!=(const Var& a, const Var& b) { return !(a == b); }

using Monomial = std::map<Var, int>;  // variable -> exponent > 0

int total_degree(const Monomial& m);
// Graded-lex comparison; variables ordered by chart position, earlier variable
// more significant. Returns <0, 0 or >0.
int mono_cmp(const Monomial& a, const Monomial& b);

struct MonoLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

// Multivariate polynomial with exact rational coefficients, stored in a fixed
// monomial order so that equal polynomials have identical term maps.
class Poly {
 public:
  using Terms = std::map<Monomial, Rat, MonoLess>;

  Poly() = default;  // zero
  explicit Poly(const Rat& c);
  static Poly variable(const Var& v);
  static Poly term(const Monomial& m, const Rat& c);

  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const;
  Rat constant_value() const;  // requires is_constant()
  int degree() const;
  std::pair<Monomial, Rat> leading() const;  // requires nonzero
  std::set<Var> vars() const;

  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(const Rat& c) const;
  Poly pow(int k) const;
  bool operator==(const Poly& o) const { return t_ == o.t_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  // Partial derivative treating every variable (kernels included) as
  // independent; the chain rule lives in diff() on Scalar.
  Poly formal_partial(const Var& v) const;

  void add_term(const Monomial& m, const Rat& c);

 private:
  Terms t_;
};

Poly poly_gcd(const Poly& a, const Poly& b);
Poly poly_exact_div(const Poly& a, const Poly& b);

// Normalized fraction of polynomials over a chart: gcd(num, den) = 1 and the
// denominator is monic in the monomial order (1 for polynomials). Structural
// equality on this form decides equality on the rational fragment; kernels
// compare syntactically (sin(y)^2 + cos(y)^2 is not recognized as 1).
class Scalar {
 public:
  Scalar() = default;  // zero over a null chart; give it a chart before use

  static Scalar zero(const ChartPtr& chart);
  static Scalar constant(const ChartPtr& chart, const Rat& c);
  static Scalar from_int(const ChartPtr& chart, long v);
  static Scalar coordinate(const ChartPtr& chart, int pos);
  static Scalar kernel(KernelFn fn, const Scalar& arg);
  static Scalar fraction(const ChartPtr& chart, Poly num, Poly den);

  const ChartPtr& chart() const { return chart_; }
  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const;
  Rat constant_value() const;
  bool is_polynomial() const { return den_.is_constant(); }

  Scalar operator-() const;
  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;
  Scalar pow(int k) const;

 private:
  ChartPtr chart_;
  Poly num_;
  Poly den_ = Poly(Rat(1));
};

struct KernelApp {
  KernelFn fn;
  Scalar arg;
  std::string key;  // canonical render, e.g. "sin(y^2)"
};

// Exact structural equality of canonical forms. Requires the same chart.
bool equals(const Scalar& a, const Scalar& b);

// Partial derivative along a chart coordinate, with the kernel chain rule.
Scalar diff(const Scalar& e, int coordPos);
Scalar diff(const Scalar& e, const std::string& coordName);

// Substitute bound coordinates by Scalars living on `target`; unbound
// coordinates resolve in `target` by name and role. Kernels are rebuilt.
Scalar substitute(const Scalar& e, const std::map<int, Scalar>& bindings,
                  const ChartPtr& target);
Scalar substitute(const Scalar& e, const std::map<int, Scalar>& bindings);

// View an expression on a larger chart (same coordinate names).
Scalar embed(const Scalar& e, const ChartPtr& target);

// Chart coordinates the expression depends on, looking through kernel
// arguments.
std::set<int> used_coordinates(const Scalar& e);
bool depends_on(const Scalar& e, int coordPos);

std::string render(const Scalar& e);
std::string render_poly(const Poly& p, const Chart& chart);

}  // namespace covfield::symexpr
