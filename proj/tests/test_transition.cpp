#include <doctest.h>

#include "covfield/errors.hpp"
#include "covfield/hamiltonian.hpp"
#include "covfield/parser.hpp"
#include "covfield/transition.hpp"
#include "support/oracles.hpp"

using namespace covfield;
using namespace covfield::symexpr;
using namespace covfield::geometry;
using namespace covfield::testing;

namespace {

ChartPtr yA() {
  static ChartPtr c = make_fibred_chart({"x"}, {"y"});
  return c;
}
ChartPtr yB() {
  static ChartPtr c = make_fibred_chart({"u"}, {"v"});
  return c;
}

Transition base_rescale() {
  return make_transition(yA(), yB(),
                         {{0, parse_scalar("2*x", yA())},
                          {1, parse_scalar("y", yA())}},
                         {{0, parse_scalar("u/2", yB())},
                          {1, parse_scalar("v", yB())}});
}

Transition fiber_shear() {
  return make_transition(yA(), yB(),
                         {{0, parse_scalar("2*x", yA())},
                          {1, parse_scalar("y + x^2", yA())}},
                         {{0, parse_scalar("u/2", yB())},
                          {1, parse_scalar("v - u^2/4", yB())}});
}

}  // namespace

TEST_CASE("transitions must invert exactly") {
  CHECK_THROWS_AS(make_transition(yA(), yB(),
                                  {{0, parse_scalar("2*x", yA())},
                                   {1, parse_scalar("y", yA())}},
                                  {{0, parse_scalar("u/3", yB())},
                                   {1, parse_scalar("v", yB())}}),
                  Error);
}

TEST_CASE("transitions must respect the fibred structure") {
  // base image depending on a fibre coordinate is rejected
  CHECK_THROWS_AS(make_transition(yA(), yB(),
                                  {{0, parse_scalar("x + y", yA())},
                                   {1, parse_scalar("y", yA())}},
                                  {{0, parse_scalar("u - v", yB())},
                                   {1, parse_scalar("v", yB())}}),
                  Error);
}

TEST_CASE("pullback round trip is the identity") {
  Transition t = fiber_shear();
  for (int i = 0; i < 10; ++i) {
    Scalar f = random_polynomial(yB());
    CHECK(equals(pullback(pullback(f, t), inverse_of(t)), f));
  }
  DiffForm w = random_form(yB(), 1);
  CHECK(equal_forms(pullback(pullback(w, t), inverse_of(t)), w));
}

TEST_CASE("pullback commutes with the exterior derivative") {
  Transition t = fiber_shear();
  for (int i = 0; i < 10; ++i) {
    DiffForm w = random_form(yB(), random_int(0, 1));
    CHECK(equal_forms(pullback(exterior_derivative(w), t),
                      exterior_derivative(pullback(w, t))));
  }
}

TEST_CASE("base rescale induces the density laws") {
  Transition yT = base_rescale();

  Transition tv = induced_transition(yT, BundleKind::VstarY);
  ChartPtr piB = tv.target;
  ChartPtr piA = tv.source;
  CHECK(equals(tv.forward.at(piB->find_momentum(piB->find_name("v"), 0)),
               parse_scalar("mom(y,x)", piA)));

  Transition tz = induced_transition(yT, BundleKind::TstarY);
  CHECK(equals(tz.forward.at(tz.target->find_pp()),
               parse_scalar("pp/2", tz.source)));

  Transition tj = induced_transition(yT, BundleKind::J1Y);
  ChartPtr j1b = tj.target;
  CHECK(equals(tj.forward.at(j1b->find_jet(j1b->find_name("v"), 0)),
               parse_scalar("jet(y,x)/2", tj.source)));

  // a base shift leaves every induced coordinate unchanged
  Transition shift = make_transition(yA(), yB(),
                                     {{0, parse_scalar("x + 3", yA())},
                                      {1, parse_scalar("y", yA())}},
                                     {{0, parse_scalar("u - 3", yB())},
                                      {1, parse_scalar("v", yB())}});
  Transition sz = induced_transition(shift, BundleKind::TstarY);
  CHECK(equals(sz.forward.at(sz.target->find_pp()),
               parse_scalar("pp", sz.source)));
}

TEST_CASE("fiber rescale divides the momentum") {
  Transition yT = make_transition(yA(), yB(),
                                  {{0, parse_scalar("x", yA())},
                                   {1, parse_scalar("2*y", yA())}},
                                  {{0, parse_scalar("u", yB())},
                                   {1, parse_scalar("v/2", yB())}});
  Transition tv = induced_transition(yT, BundleKind::VstarY);
  ChartPtr piB = tv.target;
  CHECK(equals(tv.forward.at(piB->find_momentum(piB->find_name("v"), 0)),
               parse_scalar("mom(y,x)/2", tv.source)));
}

TEST_CASE("anisotropic base rescale splits the momentum components") {
  ChartPtr y2 = make_fibred_chart({"x0", "x1"}, {"y"});
  ChartPtr y2B = make_fibred_chart({"u0", "u1"}, {"v"});
  Transition yT = make_transition(y2, y2B,
                                  {{0, parse_scalar("2*x0", y2)},
                                   {1, parse_scalar("x1", y2)},
                                   {2, parse_scalar("y", y2)}},
                                  {{0, parse_scalar("u0/2", y2B)},
                                   {1, parse_scalar("u1", y2B)},
                                   {2, parse_scalar("v", y2B)}});
  Transition tp = induced_transition(yT, BundleKind::Pi);
  ChartPtr b = tp.target;
  int vpos = b->find_name("v");
  CHECK(equals(tp.forward.at(b->find_momentum(vpos, 0)),
               parse_scalar("mom(y,x0)", tp.source)));
  CHECK(equals(tp.forward.at(b->find_momentum(vpos, 1)),
               parse_scalar("mom(y,x1)/2", tp.source)));
}

TEST_CASE("induced transitions preserve the canonical content") {
  // the homogeneous transition pulls the canonical form back onto itself
  for (const Transition& yT : {base_rescale(), fiber_shear()}) {
    Transition tz = induced_transition(yT, BundleKind::TstarY);
    DiffForm xiB = covham::liouville_form(tz.target);
    DiffForm xiA = covham::liouville_form(tz.source);
    CHECK(equal_forms(pullback(xiB, tz), xiA));
  }
}

TEST_CASE("induction is functorial under composition") {
  ChartPtr yC = make_fibred_chart({"w"}, {"q"});
  Transition ab = fiber_shear();
  Transition bc = make_transition(yB(), yC,
                                  {{0, parse_scalar("u + 3", yB())},
                                   {1, parse_scalar("v", yB())}},
                                  {{0, parse_scalar("w - 3", yC)},
                                   {1, parse_scalar("q", yC)}});
  Transition lhs = induced_transition(compose(ab, bc), BundleKind::TstarY);
  Transition rhs = compose(induced_transition(ab, BundleKind::TstarY),
                           induced_transition(bc, BundleKind::TstarY));
  for (int pos = 0; pos < lhs.target->dim(); ++pos)
    CHECK(equals(lhs.forward.at(pos), rhs.forward.at(pos)));
}
