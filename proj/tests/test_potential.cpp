#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qtun/potential.hpp"

using namespace qtun;

namespace {

PotentialSpec square(double V0, double width, double center = 0.0, Interval dom = {-6.0, 6.0}) {
  return {SquareBarrier{V0, width, center}, dom};
}

// Independent root counter: scan g = V - E for sign changes at a given
// resolution. Used as the oracle for turning-point counts.
int count_sign_changes(const PotentialSpec& spec, double E, int cells) {
  int count = 0;
  double prev = evaluate(spec, spec.domain.lo) - E;
  for (int i = 1; i <= cells; ++i) {
    double x = spec.domain.lo + spec.domain.width() * i / cells;
    double g = evaluate(spec, x) - E;
    if ((prev < 0.0) != (g < 0.0)) ++count;
    prev = g;
  }
  return count;
}

}  // namespace

TEST_CASE("evaluate: catalog point values") {
  CHECK(evaluate(square(1.0, 2.0), 0.0) == 1.0);
  CHECK(evaluate(square(1.0, 2.0), 3.0) == 0.0);
  CHECK(evaluate({HarmonicWell{1.0, 0.0, 0.0}, {-4, 4}}, 2.0) == 2.0);
  CHECK(evaluate({GaussianBarrier{1.0, 1.0, 0.0}, {-6, 6}}, 0.0) == 1.0);
  CHECK(evaluate({ParabolicBarrier{1.0, 1.0, 0.0}, {-3, 3}}, 0.0) == 1.0);
  CHECK(evaluate({Eckart{1.0, 1.0, 0.0}, {-8, 8}}, 0.0) == 1.0);
}

TEST_CASE("evaluate: left-closed breakpoint convention") {
  auto spec = square(1.0, 2.0);
  CHECK(evaluate(spec, -1.0) == 1.0);  // barrier piece owns its left edge
  CHECK(evaluate(spec, 1.0) == 0.0);   // outside piece owns the right edge
  PotentialSpec pl{PiecewiseLinear{{0.0, 1.0, 2.0}, {0.0, 2.0, 0.0}}, {0.0, 2.0}};
  CHECK(evaluate(pl, 1.0) == 2.0);
  CHECK(evaluate(pl, 0.5) == Catch::Approx(1.0));
}

TEST_CASE("evaluate: tabulated domain error") {
  PotentialSpec tab{Tabulated{{-1.0, 0.0, 1.0}, {0.5, 0.0, 0.5}}, {-1.0, 1.0}};
  CHECK(evaluate(tab, 0.25) == Catch::Approx(0.125));
  CHECK_THROWS_AS(evaluate(tab, 2.0), error);
  try {
    evaluate(tab, 2.0);
  } catch (const error& e) {
    CHECK(e.code() == errc::domain);
  }
}

TEST_CASE("derivative: analytic families") {
  CHECK(derivative({HarmonicWell{1.0, 0.0, 0.0}, {-4, 4}}, 2.0) == 2.0);
  CHECK(derivative({GaussianBarrier{1.0, 1.0, 0.0}, {-6, 6}}, 0.0) == 0.0);

  PotentialSpec par{ParabolicBarrier{1.0, 1.0, 0.0}, {-3, 3}};
  double d = derivative(par, 0.5);
  CHECK(d == -0.5);
  // Finite-difference oracle for the derived value.
  double h = 1e-6;
  double fd = (evaluate(par, 0.5 + h) - evaluate(par, 0.5 - h)) / (2.0 * h);
  CHECK(d == Catch::Approx(fd).margin(1e-9));

  // Eckart and gaussian derivatives against the same oracle.
  for (double x : {-1.3, 0.4, 2.0}) {
    PotentialSpec eck{Eckart{1.0, 1.0, 0.0}, {-8, 8}};
    double fde = (evaluate(eck, x + h) - evaluate(eck, x - h)) / (2.0 * h);
    CHECK(derivative(eck, x) == Catch::Approx(fde).margin(1e-8));
    PotentialSpec gau{GaussianBarrier{2.0, 1.5, 0.3}, {-9, 9}};
    double fdg = (evaluate(gau, x + h) - evaluate(gau, x - h)) / (2.0 * h);
    CHECK(derivative(gau, x) == Catch::Approx(fdg).margin(1e-8));
  }
}

TEST_CASE("derivative: breakpoints are non-differentiable") {
  CHECK_THROWS_AS(derivative(square(1.0, 2.0), 1.0), error);
  PotentialSpec pl{PiecewiseLinear{{0.0, 1.0, 2.0}, {0.0, 2.0, 0.0}}, {0.0, 2.0}};
  CHECK_THROWS_AS(derivative(pl, 1.0), error);
  CHECK(derivative(pl, 0.5) == 2.0);
  try {
    derivative(pl, 1.0);
  } catch (const error& e) {
    CHECK(e.code() == errc::non_differentiable);
  }
}

TEST_CASE("derivative: tabulated uses a recorded finite-difference step") {
  PotentialSpec tab{Tabulated{{-1.0, -0.5, 0.0, 0.5, 1.0}, {1.0, 0.25, 0.0, 0.25, 1.0}}, {-1, 1}};
  auto d = derivative_detail(tab, 0.25);
  CHECK(d.fd_step > 0.0);
  CHECK(d.value == Catch::Approx(0.5).margin(1e-12));  // slope of the x^2 samples' chord
}

TEST_CASE("find_turning_points: harmonic well at E = 1/2") {
  PotentialSpec well{HarmonicWell{1.0, 0.0, 0.0}, {-4, 4}};
  auto tp = find_turning_points(well, 0.5);
  REQUIRE(tp.points.size() == 2);
  CHECK(tp.points[0].x == Catch::Approx(-1.0).margin(1e-10));
  CHECK(tp.points[1].x == Catch::Approx(1.0).margin(1e-10));
  CHECK_FALSE(tp.points[0].tangential);
  REQUIRE(tp.regions.size() == 3);
  CHECK(tp.regions[0].kind == RegionKind::barrier);
  CHECK(tp.regions[1].kind == RegionKind::normal);
  CHECK(tp.regions[2].kind == RegionKind::barrier);
}

TEST_CASE("find_turning_points: parabolic barrier at E = 1/2") {
  PotentialSpec bar{ParabolicBarrier{1.0, 1.0, 0.0}, {-3, 3}};
  auto tp = find_turning_points(bar, 0.5);
  REQUIRE(tp.points.size() == 2);
  CHECK(tp.points[0].x == Catch::Approx(-1.0).margin(1e-10));
  CHECK(tp.points[1].x == Catch::Approx(1.0).margin(1e-10));
  REQUIRE(tp.regions.size() == 3);
  CHECK(tp.regions[0].kind == RegionKind::normal);
  CHECK(tp.regions[1].kind == RegionKind::barrier);
  CHECK(tp.regions[2].kind == RegionKind::normal);
}

TEST_CASE("find_turning_points: E above the barrier -> one normal region") {
  auto tp = find_turning_points(square(1.0, 2.0), 2.0);
  CHECK(tp.points.empty());
  REQUIRE(tp.regions.size() == 1);
  CHECK(tp.regions[0].kind == RegionKind::normal);
  CHECK(tp.regions[0].lo == -6.0);
  CHECK(tp.regions[0].hi == 6.0);
}

TEST_CASE("find_turning_points: square barrier edges at E < V0") {
  auto tp = find_turning_points(square(1.0, 2.0), 0.5);
  REQUIRE(tp.points.size() == 2);
  CHECK(tp.points[0].x == Catch::Approx(-1.0).margin(1e-10));
  CHECK(tp.points[1].x == Catch::Approx(1.0).margin(1e-10));
  REQUIRE(tp.regions.size() == 3);
  CHECK(tp.regions[1].kind == RegionKind::barrier);
}

TEST_CASE("find_turning_points: square well walls") {
  auto tp = find_turning_points(square(-1.0, 2.0), -0.5);
  REQUIRE(tp.points.size() == 2);
  CHECK(tp.points[0].x == Catch::Approx(-1.0).margin(1e-10));
  CHECK(tp.points[1].x == Catch::Approx(1.0).margin(1e-10));
  REQUIRE(tp.regions.size() == 3);
  CHECK(tp.regions[0].kind == RegionKind::barrier);
  CHECK(tp.regions[1].kind == RegionKind::normal);
  CHECK(tp.regions[2].kind == RegionKind::barrier);
}

TEST_CASE("find_turning_points: eckart against the analytic root") {
  PotentialSpec eck{Eckart{1.0, 1.0, 0.0}, {-8, 8}};
  double expected = std::acosh(std::sqrt(2.0));  // cosh^2(x) = V0/E = 2
  auto tp = find_turning_points(eck, 0.5);
  REQUIRE(tp.points.size() == 2);
  CHECK(tp.points[0].x == Catch::Approx(-expected).margin(1e-10));
  CHECK(tp.points[1].x == Catch::Approx(expected).margin(1e-10));
}

TEST_CASE("find_turning_points: tangential root at the parabola peak") {
  PotentialSpec bar{ParabolicBarrier{1.0, 1.0, 0.0}, {-3, 3}};
  auto tp = find_turning_points(bar, 1.0);
  REQUIRE(tp.points.size() == 1);
  CHECK(tp.points[0].x == Catch::Approx(0.0).margin(1e-7));
  CHECK(tp.points[0].tangential);
  // Both sides of a tangential point share a kind: no alternation across it.
  REQUIRE(tp.regions.size() == 2);
  CHECK(tp.regions[0].kind == RegionKind::normal);
  CHECK(tp.regions[1].kind == RegionKind::normal);
}

TEST_CASE("find_turning_points: flat V == E stretch reported as barrier") {
  auto tp = find_turning_points(square(1.0, 2.0), 1.0);
  REQUIRE(tp.points.size() == 2);
  CHECK(tp.points[0].x == Catch::Approx(-1.0).margin(1e-2));
  CHECK(tp.points[1].x == Catch::Approx(1.0).margin(1e-2));
  CHECK(tp.points[0].tangential);
  bool found_barrier = false;
  for (const auto& r : tp.regions)
    if (r.kind == RegionKind::barrier && r.lo > -1.5 && r.hi < 1.5) found_barrier = true;
  CHECK(found_barrier);
}

TEST_CASE("turning point property: V(x*) is close to E (continuous families)") {
  std::mt19937 rng(20240811u);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int trial = 0; trial < 50; ++trial) {
    double E = unif(rng);
    PotentialSpec spec = (trial % 2 == 0)
                             ? PotentialSpec{GaussianBarrier{1.0, 1.0, 0.0}, {-6, 6}}
                             : PotentialSpec{Eckart{1.0, 1.5, 0.0}, {-10, 10}};
    auto tp = find_turning_points(spec, E);
    for (const auto& p : tp.points) {
      double h = 1e-6 * spec.domain.width();
      double lip = std::abs(evaluate(spec, p.x + h) - evaluate(spec, p.x - h)) / (2.0 * h);
      double tol_E = std::max(lip, 1.0) * 1e-11 * spec.domain.width();
      CHECK(std::abs(evaluate(spec, p.x) - E) <= tol_E);
    }
  }
}

TEST_CASE("turning point property: symmetry for even potentials") {
  std::mt19937 rng(77u);
  std::uniform_real_distribution<double> unif(0.1, 0.9);
  PotentialSpec spec{GaussianBarrier{1.0, 1.2, 0.0}, {-7, 7}};
  for (int trial = 0; trial < 20; ++trial) {
    auto tp = find_turning_points(spec, unif(rng));
    REQUIRE(tp.points.size() == 2);
    CHECK(tp.points[0].x == Catch::Approx(-tp.points[1].x).margin(1e-9));
  }
}

TEST_CASE("turning point property: root count matches an independent scan") {
  std::mt19937 rng(4242u);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int trial = 0; trial < 30; ++trial) {
    double E = unif(rng);
    PotentialSpec spec{Eckart{1.0, 0.8, 0.5}, {-9, 9}};
    auto tp = find_turning_points(spec, E);
    int simple = 0;
    for (const auto& p : tp.points)
      if (!p.tangential) ++simple;
    CHECK(simple == count_sign_changes(spec, E, 8192));
    CHECK(simple == count_sign_changes(spec, E, 16384));
  }
}

TEST_CASE("region classification is sign-consistent") {
  PotentialSpec spec{GaussianBarrier{2.0, 1.0, -0.5}, {-8, 8}};
  auto tp = find_turning_points(spec, 0.7);
  for (const auto& r : tp.regions) {
    double mid = 0.5 * (r.lo + r.hi);
    double g = evaluate(spec, mid) - 0.7;
    if (r.kind == RegionKind::normal)
      CHECK(g <= 0.0);
    else
      CHECK(g >= 0.0);
  }
}

TEST_CASE("validate: rejects bad parameters") {
  CHECK_THROWS_AS(validate({SquareBarrier{1.0, -2.0, 0.0}, {-6, 6}}), error);
  CHECK_THROWS_AS(validate({HarmonicWell{0.0, 0.0, 0.0}, {-6, 6}}), error);
  CHECK_THROWS_AS(validate({GaussianBarrier{1.0, 0.0, 0.0}, {-6, 6}}), error);
  CHECK_THROWS_AS(validate({SquareBarrier{1.0, 2.0, 0.0}, {6, -6}}), error);
  CHECK_THROWS_AS(validate({Tabulated{{0.0, 0.0, 1.0}, {0, 1, 0}}, {0, 1}}), error);
}

TEST_CASE("negated evaluates to exactly -V") {
  std::mt19937 rng(99u);
  std::uniform_real_distribution<double> unif(-2.5, 2.5);
  std::vector<PotentialSpec> specs = {
      square(1.0, 2.0),
      {ParabolicBarrier{1.0, 1.0, 0.0}, {-3, 3}},
      {HarmonicWell{2.0, 0.25, -0.5}, {-3, 3}},
      {Eckart{1.0, 1.0, 0.0}, {-3, 3}},
      {GaussianBarrier{1.5, 0.8, 0.1}, {-3, 3}},
      {PiecewiseLinear{{-3.0, 0.0, 3.0}, {0.0, 1.0, 0.0}}, {-3, 3}},
  };
  for (const auto& spec : specs) {
    auto neg = negated(spec);
    for (int i = 0; i < 200; ++i) {
      double x = unif(rng);
      CHECK(evaluate(neg, x) == -evaluate(spec, x));
    }
  }
}

TEST_CASE("mirrored evaluates to V(-x)") {
  PotentialSpec spec{GaussianBarrier{1.0, 1.0, 0.7}, {-6, 6}};
  auto mir = mirrored(spec);
  for (double x : {-2.0, -0.3, 0.0, 1.1, 4.0})
    CHECK(evaluate(mir, x) == Catch::Approx(evaluate(spec, -x)).margin(0.0));
  PotentialSpec pl{PiecewiseLinear{{-1.0, 0.0, 2.0}, {0.0, 1.0, 0.5}}, {-1, 2}};
  auto mpl = mirrored(pl);
  CHECK(evaluate(mpl, -1.5) == Catch::Approx(evaluate(pl, 1.5)));
  CHECK(mpl.domain.lo == -2.0);
  CHECK(mpl.domain.hi == 1.0);
}
