#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "qtun/operators.hpp"

using namespace qtun;
using namespace std::complex_literals;

TEST_CASE("momentum_apply: plane wave is an eigenfunction of the wave momentum") {
  auto run = [](size_t n) {
    auto f = make_grid_function(-5.0, 5.0, n,
                                [](double x) { return std::exp(2.0i * x); });
    auto pf = momentum_apply(MomentumRep::wave, f, 1.0);
    double max_err = 0.0;
    for (size_t j = 1; j + 1 < f.values.size(); ++j)
      max_err = std::max(max_err, std::abs(pf.values[j] - 2.0 * f.values[j]));
    return max_err;
  };
  double coarse = run(512), fine = run(1024);
  CHECK(coarse < 1e-3);
  CHECK(convergence_order(coarse, fine) == Catch::Approx(2.0).margin(0.1));
}

TEST_CASE("momentum_apply: real decaying exponential under the corpuscular momentum") {
  // The flat-barrier eigenfunction exp(-p x / hbar) with p = sqrt(2 m (V0-E)):
  // the corpuscular momentum returns the real eigenvalue p, the wave momentum
  // returns i p.
  double p = 1.0;
  auto f = make_grid_function(0.0, 4.0, 512, [&](double x) { return std::exp(-p * x); });
  auto ev_corp = eigenvalue_estimate(MomentumRep::corpuscular, f, 1.0);
  CHECK(ev_corp.imag() == 0.0);
  CHECK(ev_corp.real() == Catch::Approx(p).margin(1e-4));

  auto ev_wave = eigenvalue_estimate(MomentumRep::wave, f, 1.0);
  CHECK(ev_wave.real() == Catch::Approx(0.0).margin(1e-15));
  CHECK(ev_wave.imag() == Catch::Approx(p).margin(1e-4));
}

TEST_CASE("momentum_apply: constant function maps to zero on the interior") {
  auto f = make_grid_function(-1.0, 1.0, 64, [](double) { return 3.25; });
  auto pf = momentum_apply(MomentumRep::corpuscular, f, 1.0);
  for (size_t j = 1; j + 1 < pf.values.size(); ++j)
    CHECK(std::abs(pf.values[j]) <= 1e-13);
}

TEST_CASE("GridFunction validation") {
  GridFunction tiny;
  tiny.xs = {0, 1, 2, 3};
  tiny.values = {1, 1, 1, 1};
  CHECK_THROWS_AS(momentum_apply(MomentumRep::wave, tiny, 1.0), error);

  GridFunction skew = make_grid_function(0.0, 1.0, 16, [](double) { return 1.0; });
  skew.xs[7] += 1e-3;
  CHECK_THROWS_AS(momentum_apply(MomentumRep::wave, skew, 1.0), error);
}

TEST_CASE("hermiticity_defect: both defects sit at the rounding floor") {
  // Central differences with the trapezoidal inner product satisfy exact
  // discrete summation by parts for boundary-vanishing functions, so the
  // (anti-)hermiticity defect is zero to rounding on every grid -- stronger
  // than the nominal second-order convergence.
  for (size_t n : {256u, 512u, 1024u}) {
    auto pairs = battery_pairs(gaussian_battery(-5.0, 5.0, n));
    auto anti = hermiticity_defect(MomentumRep::corpuscular, pairs, 1.0);
    auto herm = hermiticity_defect(MomentumRep::wave, pairs, 1.0);
    CHECK(anti.defect <= 1e-13);
    CHECK(herm.defect <= 1e-13);
    CHECK(anti.grid_n == static_cast<int>(n));
  }
}

TEST_CASE("hermiticity_defect: <f, p f> vanishes for a real gaussian (corpuscular)") {
  auto battery = gaussian_battery(-5.0, 5.0, 512);
  auto pf = momentum_apply(MomentumRep::corpuscular, battery[0], 1.0);
  auto ip = inner_product(battery[0], pf);
  CHECK(std::abs(ip) <= 1e-13);
}

TEST_CASE("hermiticity_defect: non-vanishing boundaries are rejected") {
  auto plane = make_grid_function(-5.0, 5.0, 256,
                                  [](double x) { return std::exp(1.0i * x); });
  std::vector<std::pair<GridFunction, GridFunction>> pairs{{plane, plane}};
  CHECK_THROWS_AS(hermiticity_defect(MomentumRep::wave, pairs, 1.0), error);
  try {
    hermiticity_defect(MomentumRep::wave, pairs, 1.0);
  } catch (const error& e) {
    CHECK(e.code() == errc::boundary_condition);
  }
}

TEST_CASE("commutator_defect: second-order convergence under grid doubling") {
  auto defect_at = [](MomentumRep rep, size_t n) {
    double worst = 0.0;
    for (const auto& f : gaussian_battery(-5.0, 5.0, n))
      worst = std::max(worst, commutator_defect(rep, f, 1.0).defect);
    return worst;
  };
  double w256 = defect_at(MomentumRep::wave, 256);
  double w512 = defect_at(MomentumRep::wave, 512);
  double w1024 = defect_at(MomentumRep::wave, 1024);
  CHECK(convergence_order(w256, w512) == Catch::Approx(2.0).margin(0.15));
  CHECK(convergence_order(w512, w1024) == Catch::Approx(2.0).margin(0.15));

  // Same algebra with a real kappa: identical defect magnitudes.
  double c512 = defect_at(MomentumRep::corpuscular, 512);
  CHECK(c512 == Catch::Approx(w512).epsilon(1e-12));
}

TEST_CASE("commutator_defect: exact on a linear function") {
  // The central stencil reproduces (f_{j+1}+f_{j-1})/2 = f_j exactly for
  // linear f; what remains is rounding of x*f terms at the 1/dx scale.
  auto f = make_grid_function(-2.0, 2.0, 128, [](double x) { return x; });
  CHECK(commutator_defect(MomentumRep::wave, f, 1.0).defect <= 1e-13);
  CHECK(commutator_defect(MomentumRep::corpuscular, f, 1.0).defect <= 1e-13);
}

TEST_CASE("mass_transform: rest frame and the 0.6c benchmarks") {
  CHECK(mass_transform(MomentumRep::wave, 1.0, 0.0, 1.0) == 1.0);
  CHECK(mass_transform(MomentumRep::corpuscular, 1.0, 0.0, 1.0) == 1.0);
  CHECK(mass_transform(MomentumRep::wave, 1.0, 0.6, 1.0) == Catch::Approx(1.25).epsilon(1e-15));
  CHECK(mass_transform(MomentumRep::corpuscular, 1.0, 0.6, 1.0) ==
        Catch::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("mass_transform: domain errors at and beyond c") {
  CHECK_THROWS_AS(mass_transform(MomentumRep::wave, 1.0, 1.0, 1.0), error);
  CHECK_THROWS_AS(mass_transform(MomentumRep::corpuscular, 1.0, -1.5, 1.0), error);
}

TEST_CASE("mass_transform: product law and corpuscular monotonicity") {
  std::mt19937 rng(31415u);
  std::uniform_real_distribution<double> vdist(-0.99, 0.99);
  for (int i = 0; i < 100; ++i) {
    double v = vdist(rng);
    double mw = mass_transform(MomentumRep::wave, 1.7, v, 1.0);
    double mc = mass_transform(MomentumRep::corpuscular, 1.7, v, 1.0);
    CHECK(std::abs(mw * mc - 1.7 * 1.7) <= 1e-14 * 1.7 * 1.7);
  }
  double prev = 1.0;
  for (double v : {0.1, 0.3, 0.6, 0.9, 0.99, 0.999999}) {
    double mc = mass_transform(MomentumRep::corpuscular, 1.0, v, 1.0);
    CHECK(mc < prev);
    prev = mc;
  }
  CHECK(prev < 2e-3);  // vanishes as v -> c
}

TEST_CASE("RepresentationParams: omega0 is the derived clock frequency") {
  RepresentationParams params{2.0, 3.0, 0.7};
  CHECK(params.omega0() == 2.0 * 3.0 * 3.0 / 0.7);
  CHECK(std::abs(params.omega0() * params.hbar - params.m0 * params.c * params.c) <=
        4e-16 * params.m0 * params.c * params.c);
}
