#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qtun/exact.hpp"
#include "qtun/wkb.hpp"

using namespace qtun;
constexpr double kPi = std::numbers::pi;

namespace {

PotentialSpec square(double V0 = 1.0, double width = 2.0, Interval dom = {-6, 6}) {
  return {SquareBarrier{V0, width, 0.0}, dom};
}

// Textbook rectangular-barrier transmission (m0 = hbar = 1 unless given).
double rect_T(double V0, double a, double E, double m0 = 1.0, double hbar = 1.0) {
  if (E == V0) {
    double coef = m0 * a * a * V0 * V0 / (2.0 * hbar * hbar * E);
    return 1.0 / (1.0 + coef);
  }
  if (E < V0) {
    double kappa = std::sqrt(2.0 * m0 * (V0 - E)) / hbar;
    double s = std::sinh(kappa * a);
    return 1.0 / (1.0 + V0 * V0 * s * s / (4.0 * E * (V0 - E)));
  }
  double k2 = std::sqrt(2.0 * m0 * (E - V0)) / hbar;
  double s = std::sin(k2 * a);
  return 1.0 / (1.0 + V0 * V0 * s * s / (4.0 * E * (E - V0)));
}

// Sech^2 barrier V = V0 / cosh^2(x/a): Landau-Lifshitz closed form, valid
// for 8 m V0 a^2 / hbar^2 > 1.
double eckart_T(double V0, double a, double E, double m0 = 1.0, double hbar = 1.0) {
  double k = std::sqrt(2.0 * m0 * E) / hbar;
  double u = 8.0 * m0 * V0 * a * a / (hbar * hbar);
  double sh = std::sinh(kPi * k * a);
  double ch = std::cosh(0.5 * kPi * std::sqrt(u - 1.0));
  return sh * sh / (sh * sh + ch * ch);
}

}  // namespace

TEST_CASE("exact_transmission: rectangular barrier matches the closed form at grid_n = 64") {
  auto res = exact_transmission(square(), 0.5, 1.0, 1.0, 64);
  double oracle = rect_T(1.0, 2.0, 0.5);
  CHECK(oracle == Catch::Approx(1.0 / (1.0 + std::pow(std::sinh(2.0), 2))).epsilon(1e-14));
  CHECK(res.T == Catch::Approx(oracle).epsilon(1e-10));
  CHECK(std::abs(res.T + res.R - 1.0) <= 1e-10);
  CHECK(res.richardson_defect <= 1e-12);
  CHECK(res.method == ScatteringMethod::transfer_matrix);
}

TEST_CASE("exact_transmission: rectangular barrier across an energy sweep") {
  for (int i = 0; i < 25; ++i) {
    double E = 0.08 + 0.2 * i;
    auto res = exact_transmission(square(), E, 1.0, 1.0, 128);
    CHECK(res.T == Catch::Approx(rect_T(1.0, 2.0, E)).epsilon(1e-9));
    CHECK(std::abs(res.T + res.R - 1.0) <= 1e-10);
  }
}

TEST_CASE("exact_transmission: free propagation") {
  auto res = exact_transmission({SquareBarrier{0.0, 1.0, 0.0}, {-8, 8}}, 0.7, 1.0, 1.0, 64);
  CHECK(res.T == Catch::Approx(1.0).epsilon(1e-13));
  CHECK(res.R <= 1e-13);
}

TEST_CASE("exact_transmission: high-energy limit is transparent") {
  auto res = exact_transmission(square(), 10.0, 1.0, 1.0, 128);
  CHECK(res.T == Catch::Approx(rect_T(1.0, 2.0, 10.0)).epsilon(1e-9));
  CHECK(res.T >= 0.9);
}

TEST_CASE("exact_transmission: E exactly at the barrier top (zero-curvature segment)") {
  auto res = exact_transmission(square(), 1.0, 1.0, 1.0, 64);
  CHECK(res.T == Catch::Approx(rect_T(1.0, 2.0, 1.0)).epsilon(1e-10));
  CHECK(res.T == Catch::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("exact_transmission: eckart barrier against the analytic formula") {
  PotentialSpec eck{Eckart{1.0, 1.0, 0.0}, {-14, 14}};
  for (double E : {0.3, 0.5, 0.8, 1.2}) {
    auto res = exact_transmission(eck, E, 1.0, 1.0, 4096);
    CHECK(res.T == Catch::Approx(eckart_T(1.0, 1.0, E)).epsilon(2e-5));
  }
}

TEST_CASE("exact_transmission: grid convergence at second order or better") {
  PotentialSpec gauss{GaussianBarrier{1.0, 1.0, 0.0}, {-10, 10}};
  auto d = [&](int n) { return exact_transmission(gauss, 0.5, 1.0, 1.0, n).richardson_defect; };
  double d512 = d(512), d1024 = d(1024);
  double order = std::log2(d512 / d1024);
  CHECK(order > 1.7);
}

TEST_CASE("exact_transmission: reciprocity under mirroring") {
  PotentialSpec asym{PiecewiseLinear{{-6.0, -2.0, -0.5, 0.3, 1.8, 6.0}, {0.0, 0.0, 1.2, 0.7, 0.0, 0.0}},
                     {-6, 6}};
  auto fwd = exact_transmission(asym, 0.6, 1.0, 1.0, 512);
  auto rev = exact_transmission(mirrored(asym), 0.6, 1.0, 1.0, 512);
  CHECK(fwd.T == Catch::Approx(rev.T).epsilon(1e-12));
}

TEST_CASE("exact_transmission: errors") {
  // E below the asymptotic level: no propagating channel.
  CHECK_THROWS_AS(exact_transmission(square(), -0.5, 1.0, 1.0, 64), error);
  try {
    exact_transmission(square(), -0.5, 1.0, 1.0, 64);
  } catch (const error& e) {
    CHECK(e.code() == errc::no_propagating_channel);
  }
  // Tails not flat: the domain clips the gaussian too early.
  PotentialSpec clipped{GaussianBarrier{1.0, 1.5, 0.0}, {-4, 4}};
  CHECK_THROWS_AS(exact_transmission(clipped, 0.5, 1.0, 1.0, 64), error);
  try {
    exact_transmission(clipped, 0.5, 1.0, 1.0, 64);
  } catch (const error& e) {
    CHECK(e.code() == errc::domain);
  }
  CHECK_THROWS_AS(exact_transmission(square(), 0.5, 1.0, 1.0, 32), error);
}

TEST_CASE("WKB consistency: log-transmissions agree for smooth thick barriers") {
  PotentialSpec gauss{GaussianBarrier{4.0, 1.5, 0.0}, {-12, 12}};
  for (double E : {0.8, 1.5, 2.5}) {
    double twkb = std::log(wkb_transmission(gauss, E, 1.0, 1.0).T);
    double texact = std::log(exact_transmission(gauss, E, 1.0, 1.0, 2048).T);
    double rel = std::abs(twkb - texact) / std::abs(texact);
    CHECK(rel <= 0.1);
  }
}

TEST_CASE("bound_profile: plane wave for V = 0") {
  auto prof = bound_profile({SquareBarrier{0.0, 1.0, 0.0}, {-8, 8}}, 0.7, 1.0, 1.0, 512);
  CHECK(prof.T == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(prof.R <= 1e-12);
  for (double d : prof.density) CHECK(d == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("bound_profile: decaying exponential inside a thick barrier") {
  // kappa = 1; the density ratio between x = -2 and x = -4 (the left edge)
  // is e^{-2 kappa Delta} up to an e^{-2 kappa (L-Delta)} growing-branch
  // admixture and an O(h^4) grid error.
  auto spec = square(1.0, 8.0, {-8, 8});
  auto prof = bound_profile(spec, 0.5, 1.0, 1.0, 4097);
  auto density_at = [&](double x) {
    size_t j = static_cast<size_t>(std::llround((x + 8.0) / (16.0 / 4096.0)));
    return prof.density[j];
  };
  double ratio = std::sqrt(density_at(-2.0) / density_at(-4.0));
  CHECK(ratio == Catch::Approx(std::exp(-2.0)).epsilon(1e-3));
}

TEST_CASE("bound_profile: monotone decay deep under a wide barrier") {
  auto spec = square(1.0, 4.0, {-8, 8});
  auto prof = bound_profile(spec, 0.2, 1.0, 1.0, 2048);
  double prev = 1e300;
  for (size_t j = 0; j < prof.xs.size(); ++j) {
    if (prof.xs[j] < -1.9 || prof.xs[j] > 1.9) continue;
    CHECK(prof.density[j] < prev);
    prev = prof.density[j];
  }
}

TEST_CASE("bound_profile: transmission cross-checks the transfer matrix") {
  PotentialSpec gauss{GaussianBarrier{2.0, 1.0, 0.0}, {-10, 10}};
  for (double E : {0.8, 1.4}) {
    auto nume = bound_profile(gauss, E, 1.0, 1.0, 8192);
    auto tm = exact_transmission(gauss, E, 1.0, 1.0, 8192);
    CHECK(nume.T == Catch::Approx(tm.T).epsilon(1e-5));
    CHECK(std::abs(nume.T + nume.R - 1.0) <= 1e-6);
  }
}

TEST_CASE("bound_profile: automatic renormalization under an extreme barrier") {
  // kappa = sqrt(2*4.5)/0.25 = 12 over width 20: the growing solution spans
  // e^{240}, far past one 1e100 rescale.
  auto spec = square(5.0, 20.0, {-12, 12});
  auto prof = bound_profile(spec, 0.5, 1.0, 0.25, 8193);
  CHECK(prof.renormalizations >= 1);
  CHECK(prof.T > 0.0);
  // The transfer matrix is exact here; Numerov carries localized O(h^2)
  // error at the potential jumps, so compare logs at a matching tolerance.
  auto tm = exact_transmission(spec, 0.5, 1.0, 0.25, 1024);
  CHECK(std::log(prof.T) == Catch::Approx(std::log(tm.T)).epsilon(2e-4));
}
