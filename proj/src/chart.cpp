#include "covfield/chart.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "covfield/errors.hpp"

namespace covfield::symexpr {

bool operator==(const CoordId& a, const CoordId& b) {
  return a.name == b.name && a.role == b.role && a.i1 == b.i1 && a.i2 == b.i2;
}

const char* bundle_kind_name(BundleKind k) {
  switch (k) {
    case BundleKind::Y: return "Y";
    case BundleKind::J1Y: return "J1Y";
    case BundleKind::VstarY: return "VstarY";
    case BundleKind::TstarY: return "TstarY";
    case BundleKind::Pi: return "Pi";
    case BundleKind::Z: return "Z";
    case BundleKind::J1Pi: return "J1Pi";
    case BundleKind::J1Z: return "J1Z";
  }
  return "?";
}

int Chart::find_name(const std::string& name) const {
  for (int i = 0; i < dim(); ++i)
    if (coords[i].name == name) return i;
  return -1;
}

int Chart::find_momentum(int fiberPos, int baseIdx) const {
  for (int i = 0; i < dim(); ++i) {
    const CoordId& c = coords[i];
    if (c.role == CoordRole::PolyMomentum && c.i1 == fiberPos && c.i2 == baseIdx)
      return i;
  }
  return -1;
}

int Chart::find_jet(int targetPos, int baseIdx) const {
  for (int i = 0; i < dim(); ++i) {
    const CoordId& c = coords[i];
    if ((c.role == CoordRole::Jet || c.role == CoordRole::Jet2) && c.i1 == targetPos &&
        c.i2 == baseIdx)
      return i;
  }
  return -1;
}

int Chart::find_pp() const {
  for (int i = 0; i < dim(); ++i)
    if (coords[i].role == CoordRole::HomogMomentum) return i;
  return -1;
}

std::vector<int> Chart::positions(CoordRole role) const {
  std::vector<int> out;
  for (int i = 0; i < dim(); ++i)
    if (coords[i].role == role) out.push_back(i);
  return out;
}

bool same_chart(const Chart& a, const Chart& b) {
  if (a.kind != b.kind || a.baseDim != b.baseDim || a.fiberDim != b.fiberDim) return false;
  if (a.coords.size() != b.coords.size()) return false;
  for (size_t i = 0; i < a.coords.size(); ++i)
    if (!(a.coords[i] == b.coords[i])) return false;
  return true;
}

bool same_chart(const ChartPtr& a, const ChartPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return same_chart(*a, *b);
}

bool valid_coordinate_name(const std::string& name) {
  static const std::set<std::string> reserved = {"pp",  "rho", "jet", "mom",
                                                 "sin", "cos", "exp"};
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') return false;
  for (char ch : name)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
  return reserved.count(name) == 0;
}

ChartPtr make_fibred_chart(const std::vector<std::string>& baseNames,
                           const std::vector<std::string>& fiberNames) {
  if (baseNames.empty()) throw spec_error("chart needs at least one base coordinate");
  if (fiberNames.empty()) throw spec_error("chart needs at least one fiber coordinate");
  auto c = std::make_shared<Chart>();
  c->kind = BundleKind::Y;
  c->baseDim = static_cast<int>(baseNames.size());
  c->fiberDim = static_cast<int>(fiberNames.size());
  std::set<std::string> seen;
  for (const auto& n : baseNames) {
    if (!valid_coordinate_name(n)) throw spec_error("invalid coordinate name '" + n + "'");
    if (!seen.insert(n).second) throw spec_error("duplicate coordinate name '" + n + "'");
    c->coords.push_back({n, CoordRole::Base, -1, -1});
  }
  std::vector<std::string> fibers = fiberNames;
  std::sort(fibers.begin(), fibers.end());
  for (const auto& n : fibers) {
    if (!valid_coordinate_name(n)) throw spec_error("invalid coordinate name '" + n + "'");
    if (!seen.insert(n).second) throw spec_error("duplicate coordinate name '" + n + "'");
    c->coords.push_back({n, CoordRole::Fiber, -1, -1});
  }
  return c;
}

namespace {

ChartPtr require_y(const ChartPtr& y, const char* what) {
  if (!y) throw spec_error(std::string(what) + ": null chart");
  if (y->kind != BundleKind::Y)
    throw spec_error(std::string(what) + " expects a fibred-manifold chart");
  return y;
}

void append_momenta(Chart& c, const Chart& y) {
  for (int f = y.baseDim; f < y.dim(); ++f) {
    for (int b = 0; b < y.baseDim; ++b) {
      CoordId m;
      m.name = "mom(" + y.coords[f].name + "," + y.coords[b].name + ")";
      m.role = CoordRole::PolyMomentum;
      m.i1 = f;
      m.i2 = b;
      c.coords.push_back(m);
    }
  }
}

}  // namespace

ChartPtr legendre_bundle_chart(const ChartPtr& y) {
  require_y(y, "legendre_bundle_chart");
  auto c = std::make_shared<Chart>(*y);
  c->kind = y->baseDim == 1 ? BundleKind::VstarY : BundleKind::Pi;
  append_momenta(*c, *y);
  return c;
}

ChartPtr homogeneous_chart(const ChartPtr& y) {
  require_y(y, "homogeneous_chart");
  auto c = std::make_shared<Chart>(*y);
  c->kind = y->baseDim == 1 ? BundleKind::TstarY : BundleKind::Z;
  c->coords.push_back({"pp", CoordRole::HomogMomentum, -1, -1});
  append_momenta(*c, *y);
  return c;
}

ChartPtr j1_chart(const ChartPtr& q) {
  if (!q) throw spec_error("j1_chart: null chart");
  BundleKind jk;
  switch (q->kind) {
    case BundleKind::Y: jk = BundleKind::J1Y; break;
    case BundleKind::VstarY:
    case BundleKind::Pi: jk = BundleKind::J1Pi; break;
    case BundleKind::TstarY:
    case BundleKind::Z: jk = BundleKind::J1Z; break;
    default: throw spec_error("j1_chart: chart already carries jet coordinates");
  }
  auto c = std::make_shared<Chart>(*q);
  c->kind = jk;
  // Fiber jets first, then jets of momentum-type coordinates, in chart order.
  for (int t = 0; t < q->dim(); ++t) {
    if (q->coords[t].role != CoordRole::Fiber) continue;
    for (int b = 0; b < q->baseDim; ++b) {
      CoordId j;
      j.name = "jet(" + q->coords[t].name + "," + q->coords[b].name + ")";
      j.role = CoordRole::Jet;
      j.i1 = t;
      j.i2 = b;
      c->coords.push_back(j);
    }
  }
  for (int t = 0; t < q->dim(); ++t) {
    CoordRole r = q->coords[t].role;
    if (r != CoordRole::PolyMomentum && r != CoordRole::HomogMomentum) continue;
    for (int b = 0; b < q->baseDim; ++b) {
      CoordId j;
      j.name = "jet(" + q->coords[t].name + "," + q->coords[b].name + ")";
      j.role = CoordRole::Jet2;
      j.i1 = t;
      j.i2 = b;
      c->coords.push_back(j);
    }
  }
  return c;
}

ChartPtr y_chart_of(const ChartPtr& q) {
  if (!q) throw spec_error("y_chart_of: null chart");
  auto c = std::make_shared<Chart>();
  c->kind = BundleKind::Y;
  c->baseDim = q->baseDim;
  c->fiberDim = q->fiberDim;
  for (const auto& co : q->coords)
    if (co.role == CoordRole::Base || co.role == CoordRole::Fiber) c->coords.push_back(co);
  return c;
}

}  // namespace covfield::symexpr
