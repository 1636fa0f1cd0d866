#pragma once

#include <memory>
#include <string>
#include <vector>

namespace covfield::symexpr {

// Coordinate roles on the bundles handled here. Rank order is the chart order:
// base < fiber < homogeneous momentum < poly momentum < first jets of fibers
// < first jets of momenta (and of pp).
enum class CoordRole { Base, Fiber, HomogMomentum, PolyMomentum, Jet, Jet2 };

// A chart coordinate. The index fields depend on the role:
//   PolyMomentum: i1 = chart position of the fiber coordinate, i2 = base index
//   Jet:          i1 = chart position of the fiber coordinate, i2 = base index
//   Jet2:         i1 = chart position of the momentum (or pp) coordinate, i2 = base index
// Names are derived and unique: "mom(y,x0)", "jet(y,x0)", "jet(mom(y,x0),x1)", "pp".
struct CoordId {
  std::string name;
  CoordRole role = CoordRole::Base;
  int i1 = -1;
  int i2 = -1;
};

bool operator==(const CoordId& a, const CoordId& b);

enum class BundleKind { Y, J1Y, VstarY, TstarY, Pi, Z, J1Pi, J1Z };

const char* bundle_kind_name(BundleKind k);

// Ordered coordinate list with roles; the order is the canonical chart order
// used for monomials and wedge tuples alike.
struct Chart {
  BundleKind kind = BundleKind::Y;
  int baseDim = 0;
  int fiberDim = 0;
  std::vector<CoordId> coords;

  int dim() const { return static_cast<int>(coords.size()); }
  // Position of a coordinate by name, -1 if absent.
  int find_name(const std::string& name) const;
  // Position of a momentum coordinate p^{base}_{fiber}, -1 if absent.
  int find_momentum(int fiberPos, int baseIdx) const;
  // Position of the jet coordinate of coordinate `targetPos` in direction `baseIdx`.
  int find_jet(int targetPos, int baseIdx) const;
  int find_pp() const;
  std::vector<int> positions(CoordRole role) const;
  bool is_base(int pos) const { return coords[pos].role == CoordRole::Base; }
};

using ChartPtr = std::shared_ptr<const Chart>;

bool same_chart(const Chart& a, const Chart& b);
bool same_chart(const ChartPtr& a, const ChartPtr& b);

// True for names usable as coordinates: identifier syntax and not reserved
// (pp, rho, jet, mom, sin, cos, exp).
bool valid_coordinate_name(const std::string& name);

// Chart of a fibred manifold Y -> X. Base names keep declaration order (they
// orient the base volume form); fiber names are stored sorted.
ChartPtr make_fibred_chart(const std::vector<std::string>& baseNames,
                           const std::vector<std::string>& fiberNames);

// Chart of the Legendre bundle over Y: adds momenta mom(y,x) per fiber/base
// pair. Kind VstarY when the base is one-dimensional, Pi otherwise.
ChartPtr legendre_bundle_chart(const ChartPtr& y);

// Chart of the homogeneous Legendre bundle: Legendre chart plus the
// homogeneous momentum pp. Kind TstarY when the base is one-dimensional, Z
// otherwise.
ChartPtr homogeneous_chart(const ChartPtr& y);

// First-jet chart: adds jet coordinates for every non-base coordinate.
ChartPtr j1_chart(const ChartPtr& q);

// The underlying Y chart (base + fiber coordinates only).
ChartPtr y_chart_of(const ChartPtr& q);

}  // namespace covfield::symexpr
