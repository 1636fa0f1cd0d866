#include "covfield/scalar.hpp"

#include <optional>
#include <vector>

#include "covfield/errors.hpp"

namespace covfield::symexpr {

const char* kernel_fn_name(KernelFn fn) {
  switch (fn) {
    case KernelFn::Sin: return "sin";
    case KernelFn::Cos: return "cos";
    case KernelFn::Exp: return "exp";
  }
  return "?";
}

bool operator<(const Var& a, const Var& b) {
  if (a.is_coord() != b.is_coord()) return a.is_coord();
  if (a.is_coord()) return a.coord < b.coord;
  return a.kernel->key < b.kernel->key;
}

bool operator==(const Var& a, const Var& b) {
  if (a.coord != b.coord) return false;
  if (a.is_coord()) return true;
  return a.kernel->key == b.kernel->key;
}

int total_degree(const Monomial& m) {
  int d = 0;
  for (const auto& [v, e] : m) d += e;
  return d;
}

int mono_cmp(const Monomial& a, const Monomial& b) {
  int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db ? -1 : 1;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) return 1;  // earlier variable present only in a
    if (ib->first < ia->first) return -1;
    if (ia->second != ib->second) return ia->second > ib->second ? 1 : -1;
    ++ia;
    ++ib;
  }
  if (ia != a.end()) return 1;
  if (ib != b.end()) return -1;
  return 0;
}

bool MonoLess::operator()(const Monomial& a, const Monomial& b) const {
  return mono_cmp(a, b) < 0;
}

Poly::Poly(const Rat& c) {
  if (c != 0) t_[Monomial{}] = c;
}

Poly Poly::variable(const Var& v) {
  Poly p;
  Monomial m;
  m[v] = 1;
  p.t_[m] = Rat(1);
  return p;
}

Poly Poly::term(const Monomial& m, const Rat& c) {
  Poly p;
  p.add_term(m, c);
  return p;
}

void Poly::add_term(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto it = t_.find(m);
  if (it == t_.end()) {
    t_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) t_.erase(it);
  }
}

bool Poly::is_constant() const {
  return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty());
}

Rat Poly::constant_value() const {
  if (t_.empty()) return Rat(0);
  return t_.begin()->second;
}

int Poly::degree() const {
  if (t_.empty()) return -1;
  return total_degree(t_.rbegin()->first);
}

std::pair<Monomial, Rat> Poly::leading() const {
  return *t_.rbegin();
}

std::set<Var> Poly::vars() const {
  std::set<Var> out;
  for (const auto& [m, c] : t_)
    for (const auto& [v, e] : m) out.insert(v);
  return out;
}

Poly Poly::operator-() const {
  Poly r;
  for (const auto& [m, c] : t_) r.t_[m] = -c;
  return r;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.t_) r.add_term(m, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.t_) r.add_term(m, -c);
  return r;
}

namespace {
Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  for (const auto& [v, e] : b) r[v] += e;
  return r;
}
}  // namespace

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  for (const auto& [ma, ca] : t_)
    for (const auto& [mb, cb] : o.t_) r.add_term(mono_mul(ma, mb), ca * cb);
  return r;
}

Poly Poly::operator*(const Rat& c) const {
  Poly r;
  if (c == 0) return r;
  for (const auto& [m, k] : t_) r.t_[m] = k * c;
  return r;
}

Poly Poly::pow(int k) const {
  if (k < 0) throw math_error("negative polynomial power");
  Poly r(Rat(1));
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

Poly Poly::formal_partial(const Var& v) const {
  Poly r;
  for (const auto& [m, c] : t_) {
    auto it = m.find(v);
    if (it == m.end()) continue;
    Monomial d = m;
    if (it->second == 1)
      d.erase(v);
    else
      d[v] = it->second - 1;
    r.add_term(d, c * it->second);
  }
  return r;
}

// ---------------------------------------------------------------------------
// gcd of multivariate polynomials over Q: recursive primitive PRS in the
// greatest variable present.

namespace {

std::optional<Var> max_var(const Poly& p) {
  std::optional<Var> mv;
  for (const auto& [m, c] : p.terms()) {
    if (m.empty()) continue;
    const Var& v = m.rbegin()->first;
    if (!mv || *mv < v) mv = v;
  }
  return mv;
}

// Coefficients of powers of v, ascending exponent; trailing zeros trimmed.
std::vector<Poly> usplit(const Poly& p, const Var& v) {
  std::vector<Poly> c;
  for (const auto& [m, coef] : p.terms()) {
    auto it = m.find(v);
    int e = it == m.end() ? 0 : it->second;
    Monomial rest = m;
    if (it != m.end()) rest.erase(v);
    if (static_cast<int>(c.size()) <= e) c.resize(e + 1);
    c[e].add_term(rest, coef);
  }
  while (!c.empty() && c.back().is_zero()) c.pop_back();
  return c;
}

Poly ujoin(const std::vector<Poly>& c, const Var& v) {
  Poly r;
  for (int e = 0; e < static_cast<int>(c.size()); ++e) {
    if (c[e].is_zero()) continue;
    Monomial m;
    if (e > 0) m[v] = e;
    r = r + c[e] * Poly::term(m, Rat(1));
  }
  return r;
}

Poly ucontent(const std::vector<Poly>& c) {
  Poly g;
  for (const auto& p : c)
    if (!p.is_zero()) g = poly_gcd(g, p);
  return g;
}

std::vector<Poly> uprimitive(const std::vector<Poly>& c) {
  Poly cont = ucontent(c);
  std::vector<Poly> out;
  out.reserve(c.size());
  for (const auto& p : c)
    out.push_back(p.is_zero() ? p : poly_exact_div(p, cont));
  return out;
}

// Canonical pseudo-remainder of r by b in the main variable: the result of
// reducing lb^(delta+1) * r modulo b, where delta = deg r - deg b and lb is
// the leading coefficient of b (coefficients are polynomials in the smaller
// variables). Each reduction pass multiplies by lb once; the tail factor
// tops the scaling up to the canonical power.
std::vector<Poly> pseudo_rem(std::vector<Poly> r, const std::vector<Poly>& b) {
  int db = static_cast<int>(b.size()) - 1;
  const Poly& lb = b[db];
  int delta = static_cast<int>(r.size()) - 1 - db;
  int passes = 0;
  while (static_cast<int>(r.size()) - 1 >= db) {
    int dr = static_cast<int>(r.size()) - 1;
    Poly lr = r[dr];
    std::vector<Poly> nr(dr);
    for (int i = 0; i < dr; ++i) nr[i] = lb * r[i];
    int shift = dr - db;
    for (int j = 0; j <= db; ++j) {
      int k = j + shift;
      if (k == dr) continue;  // leading terms cancel exactly
      nr[k] = nr[k] - lr * b[j];
    }
    while (!nr.empty() && nr.back().is_zero()) nr.pop_back();
    r = std::move(nr);
    ++passes;
  }
  if (passes < delta + 1) {
    Poly extra = lb.pow(delta + 1 - passes);
    for (Poly& p : r) p = p * extra;
  }
  return r;
}

}  // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() || b.is_constant()) return Poly(Rat(1));
  auto va = max_var(a);
  auto vb = max_var(b);
  Var v = (*va < *vb) ? *vb : *va;
  auto ca = usplit(a, v);
  auto cb = usplit(b, v);
  if (ca.size() == 1) return poly_gcd(a, ucontent(cb));
  if (cb.size() == 1) return poly_gcd(ucontent(ca), b);
  Poly conta = ucontent(ca);
  Poly contb = ucontent(cb);
  Poly cont = poly_gcd(conta, contb);
  std::vector<Poly> A, B;
  A.reserve(ca.size());
  B.reserve(cb.size());
  for (const auto& p : ca) A.push_back(p.is_zero() ? p : poly_exact_div(p, conta));
  for (const auto& p : cb) B.push_back(p.is_zero() ? p : poly_exact_div(p, contb));
  if (A.size() < B.size()) std::swap(A, B);
  // Subresultant remainder sequence: dividing each pseudo-remainder by
  // lc * h^delta keeps the coefficients small without recomputing contents
  // at every step; one primitive part at the end recovers the gcd.
  Poly g;
  Poly lc(Rat(1));
  Poly h(Rat(1));
  while (true) {
    int delta = static_cast<int>(A.size() - B.size());
    auto R = pseudo_rem(A, B);
    if (R.empty()) {
      g = ujoin(uprimitive(B), v);
      break;
    }
    if (R.size() == 1) {
      g = Poly(Rat(1));
      break;
    }
    Poly div = lc * h.pow(delta);
    A = std::move(B);
    B.clear();
    B.reserve(R.size());
    for (const auto& p : R) B.push_back(p.is_zero() ? p : poly_exact_div(p, div));
    lc = A.back();
    if (delta == 1)
      h = lc;
    else if (delta > 1)
      h = poly_exact_div(lc.pow(delta), h.pow(delta - 1));
  }
  return cont * g;
}

Poly poly_exact_div(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw math_error("division by zero polynomial");
  if (a.is_zero()) return a;
  if (b.is_constant()) return a * (Rat(1) / b.constant_value());
  Poly q;
  Poly r = a;
  auto [mb, cb] = b.leading();
  while (!r.is_zero()) {
    auto [mr, cr] = r.leading();
    Monomial m = mr;
    for (const auto& [v, e] : mb) {
      auto it = m.find(v);
      if (it == m.end() || it->second < e) throw math_error("exact polynomial division failed");
      it->second -= e;
      if (it->second == 0) m.erase(it);
    }
    Poly t = Poly::term(m, cr / cb);
    q = q + t;
    r = r - t * b;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Scalar

Scalar Scalar::zero(const ChartPtr& chart) {
  return constant(chart, Rat(0));
}

Scalar Scalar::constant(const ChartPtr& chart, const Rat& c) {
  return fraction(chart, Poly(c), Poly(Rat(1)));
}

Scalar Scalar::from_int(const ChartPtr& chart, long v) {
  return constant(chart, Rat(v));
}

Scalar Scalar::coordinate(const ChartPtr& chart, int pos) {
  if (!chart) throw spec_error("coordinate on null chart");
  if (pos < 0 || pos >= chart->dim()) throw spec_error("coordinate position out of range");
  Var v;
  v.coord = pos;
  return fraction(chart, Poly::variable(v), Poly(Rat(1)));
}

Scalar Scalar::fraction(const ChartPtr& chart, Poly n, Poly d) {
  if (!chart) throw spec_error("scalar without chart");
  if (d.is_zero()) throw math_error("zero denominator");
  Scalar s;
  s.chart_ = chart;
  if (n.is_zero()) return s;
  if (!d.is_constant()) {
    Poly g = poly_gcd(n, d);
    if (!g.is_constant()) {
      n = poly_exact_div(n, g);
      d = poly_exact_div(d, g);
    }
  }
  if (d.is_constant()) {
    s.num_ = n * (Rat(1) / d.constant_value());
    s.den_ = Poly(Rat(1));
  } else {
    Rat c = d.leading().second;
    s.num_ = n * (Rat(1) / c);
    s.den_ = d * (Rat(1) / c);
  }
  return s;
}

bool Scalar::is_constant() const {
  return num_.is_constant() && den_.is_constant();
}

Rat Scalar::constant_value() const {
  if (!is_constant()) throw math_error("scalar is not constant");
  return num_.constant_value();
}

namespace {
const ChartPtr& common_chart(const Scalar& a, const Scalar& b) {
  if (!same_chart(a.chart(), b.chart()))
    throw spec_error("scalars live on different charts");
  if (!a.chart()) throw spec_error("scalar without chart");
  return a.chart();
}
}  // namespace

Scalar Scalar::operator-() const {
  if (!chart_) return *this;
  Scalar s = *this;
  s.num_ = -s.num_;
  return s;
}

Scalar Scalar::operator+(const Scalar& o) const {
  const ChartPtr& ch = common_chart(*this, o);
  return fraction(ch, num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Scalar Scalar::operator-(const Scalar& o) const {
  const ChartPtr& ch = common_chart(*this, o);
  return fraction(ch, num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Scalar Scalar::operator*(const Scalar& o) const {
  const ChartPtr& ch = common_chart(*this, o);
  return fraction(ch, num_ * o.num_, den_ * o.den_);
}

Scalar Scalar::operator/(const Scalar& o) const {
  const ChartPtr& ch = common_chart(*this, o);
  if (o.is_zero()) throw math_error("division by zero");
  return fraction(ch, num_ * o.den_, den_ * o.num_);
}

Scalar Scalar::pow(int k) const {
  if (k < 0) throw math_error("negative power");
  if (!chart_) throw spec_error("scalar without chart");
  Scalar r = constant(chart_, Rat(1));
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

bool equals(const Scalar& a, const Scalar& b) {
  if (!same_chart(a.chart(), b.chart()))
    throw spec_error("equals: scalars live on different charts");
  return a.num() == b.num() && a.den() == b.den();
}

// ---------------------------------------------------------------------------
// rendering (needed by Scalar::kernel for canonical keys)

namespace {
std::string rat_str(const Rat& c) {
  return c.get_str();
}

std::string var_name(const Var& v, const Chart& chart) {
  if (v.is_coord()) return chart.coords[v.coord].name;
  return v.kernel->key;
}
}  // namespace

std::string render_poly(const Poly& p, const Chart& chart) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const Monomial& m = it->first;
    Rat a = it->second;
    bool neg = a < 0;
    if (neg) a = -a;
    if (first) {
      if (neg) out += "-";
      first = false;
    } else {
      out += neg ? " - " : " + ";
    }
    std::string mono;
    for (const auto& [v, e] : m) {
      if (!mono.empty()) mono += "*";
      mono += var_name(v, chart);
      if (e > 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty()) {
      out += rat_str(a);
    } else {
      if (a != 1) {
        out += rat_str(a);
        out += "*";
      }
      out += mono;
    }
  }
  return out;
}

std::string render(const Scalar& e) {
  if (!e.chart()) return "0";
  if (e.den() == Poly(Rat(1))) return render_poly(e.num(), *e.chart());
  std::string n = render_poly(e.num(), *e.chart());
  if (e.num().terms().size() > 1) n = "(" + n + ")";
  std::string d = render_poly(e.den(), *e.chart());
  bool bare = e.den().terms().size() == 1 && e.den().terms().begin()->first.size() == 1;
  if (!bare) d = "(" + d + ")";
  return n + "/" + d;
}

Scalar Scalar::kernel(KernelFn fn, const Scalar& arg) {
  if (!arg.chart()) throw spec_error("kernel argument without chart");
  auto app = std::make_shared<KernelApp>();
  app->fn = fn;
  app->arg = arg;
  app->key = std::string(kernel_fn_name(fn)) + "(" + render(arg) + ")";
  Var v;
  v.kernel = app;
  Scalar s;
  s.chart_ = arg.chart();
  s.num_ = Poly::variable(v);
  s.den_ = Poly(Rat(1));
  return s;
}

// ---------------------------------------------------------------------------
// differentiation

namespace {
Scalar kernel_derivative(const KernelApp& app, int coordPos) {
  Scalar da = diff(app.arg, coordPos);
  if (da.is_zero()) return da;
  Scalar outer;
  switch (app.fn) {
    case KernelFn::Sin: outer = Scalar::kernel(KernelFn::Cos, app.arg); break;
    case KernelFn::Cos: outer = -Scalar::kernel(KernelFn::Sin, app.arg); break;
    case KernelFn::Exp: outer = Scalar::kernel(KernelFn::Exp, app.arg); break;
  }
  return outer * da;
}
}  // namespace

Scalar diff(const Scalar& e, int coordPos) {
  const ChartPtr& ch = e.chart();
  if (!ch) throw spec_error("diff on scalar without chart");
  if (coordPos < 0 || coordPos >= ch->dim())
    throw spec_error("diff: coordinate position out of range");
  std::set<Var> vs = e.num().vars();
  for (const auto& v : e.den().vars()) vs.insert(v);
  Scalar dn = Scalar::zero(ch);
  Scalar dd = Scalar::zero(ch);
  for (const Var& v : vs) {
    Scalar dv;
    if (v.is_coord()) {
      if (v.coord != coordPos) continue;
      dv = Scalar::constant(ch, Rat(1));
    } else {
      dv = kernel_derivative(*v.kernel, coordPos);
      if (dv.is_zero()) continue;
    }
    Poly pn = e.num().formal_partial(v);
    if (!pn.is_zero()) dn = dn + Scalar::fraction(ch, pn, Poly(Rat(1))) * dv;
    Poly pd = e.den().formal_partial(v);
    if (!pd.is_zero()) dd = dd + Scalar::fraction(ch, pd, Poly(Rat(1))) * dv;
  }
  Scalar N = Scalar::fraction(ch, e.num(), Poly(Rat(1)));
  Scalar D = Scalar::fraction(ch, e.den(), Poly(Rat(1)));
  return (dn * D - N * dd) / (D * D);
}

Scalar diff(const Scalar& e, const std::string& coordName) {
  if (!e.chart()) throw spec_error("diff on scalar without chart");
  int pos = e.chart()->find_name(coordName);
  if (pos < 0) throw spec_error("diff: unknown coordinate '" + coordName + "'");
  return diff(e, pos);
}

// ---------------------------------------------------------------------------
// substitution

namespace {
Scalar eval_poly_subst(const Poly& p, const ChartPtr& src,
                       const std::map<int, Scalar>& bindings, const ChartPtr& target) {
  Scalar acc = Scalar::zero(target);
  for (const auto& [m, c] : p.terms()) {
    Scalar t = Scalar::constant(target, c);
    for (const auto& [v, e] : m) {
      Scalar val;
      if (v.is_coord()) {
        auto it = bindings.find(v.coord);
        if (it != bindings.end()) {
          val = it->second;
        } else if (same_chart(src, target)) {
          val = Scalar::coordinate(target, v.coord);
        } else {
          const CoordId& cid = src->coords[v.coord];
          int pos = target->find_name(cid.name);
          if (pos < 0 || target->coords[pos].role != cid.role)
            throw spec_error("substitute: coordinate '" + cid.name +
                             "' has no image in the target chart");
          val = Scalar::coordinate(target, pos);
        }
      } else {
        Scalar na = substitute(v.kernel->arg, bindings, target);
        val = Scalar::kernel(v.kernel->fn, na);
      }
      t = t * val.pow(e);
    }
    acc = acc + t;
  }
  return acc;
}
}  // namespace

Scalar substitute(const Scalar& e, const std::map<int, Scalar>& bindings,
                  const ChartPtr& target) {
  if (!e.chart()) throw spec_error("substitute on scalar without chart");
  if (!target) throw spec_error("substitute: null target chart");
  for (const auto& [pos, val] : bindings) {
    if (pos < 0 || pos >= e.chart()->dim())
      throw spec_error("substitute: binding position out of range");
    if (!same_chart(val.chart(), target))
      throw spec_error("substitute: binding value is not on the target chart");
  }
  Scalar n = eval_poly_subst(e.num(), e.chart(), bindings, target);
  Scalar d = eval_poly_subst(e.den(), e.chart(), bindings, target);
  if (d.is_zero()) throw math_error("zero denominator after substitution");
  return n / d;
}

Scalar substitute(const Scalar& e, const std::map<int, Scalar>& bindings) {
  return substitute(e, bindings, e.chart());
}

Scalar embed(const Scalar& e, const ChartPtr& target) {
  return substitute(e, {}, target);
}

namespace {
void collect_coords(const Poly& p, std::set<int>& out) {
  for (const auto& [m, c] : p.terms()) {
    for (const auto& [v, e] : m) {
      if (v.is_coord()) {
        out.insert(v.coord);
      } else {
        collect_coords(v.kernel->arg.num(), out);
        collect_coords(v.kernel->arg.den(), out);
      }
    }
  }
}
}  // namespace

std::set<int> used_coordinates(const Scalar& e) {
  std::set<int> out;
  collect_coords(e.num(), out);
  collect_coords(e.den(), out);
  return out;
}

bool depends_on(const Scalar& e, int coordPos) {
  return used_coordinates(e).count(coordPos) > 0;
}

}  // namespace covfield::symexpr
