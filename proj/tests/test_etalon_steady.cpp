#include <cmath>

#include "doctest.h"
#include "mimcav/errors.hpp"
#include "mimcav/etalon_steady.hpp"
#include "property.hpp"

using namespace mimcav;

namespace {

// Half-width of the Airy peak from the closed form cos(delta) = (1 + R^2 - 2 (1 - R)^2) / (2 R).
double closed_form_finesse(double r) {
  const double c = (1.0 + r * r - 2.0 * (1.0 - r) * (1.0 - r)) / (2.0 * r);
  return kPi / std::acos(c);
}

}  // namespace

TEST_CASE("finesse matches the closed-form half width") {
  prop::for_all(300, 202, [](prop::Gen& g, int) -> std::string {
    const double r = g.real(0.18, 0.995);
    const double f = finesse_from_round_trip(r);
    const double ref = closed_form_finesse(r);
    if (std::abs(f / ref - 1.0) > 1e-8) return prop::describe("R=", r, " got ", f, " want ", ref);
    return {};
  });
}

TEST_CASE("finesse reference values") {
  const double r[] = {0.3618, 0.3571, 0.2652};
  const double want[] = {2.8088, 2.7657, 1.9773};
  for (int i = 0; i < 3; ++i) {
    const auto c = SlabCoefficients::ideal(r[i]);
    CHECK(finesse_fwhm(c, c) == doctest::Approx(want[i]).epsilon(1e-4));
  }
  CHECK(reflectivity_from_finesse(2.8088) == doctest::Approx(0.3618).epsilon(1e-4));
  CHECK_THROWS_AS(finesse_from_round_trip(0.1), DomainError);
}

TEST_CASE("high reflectivity approaches pi sqrt(R) / (1 - R)") {
  const double r = 0.999;
  CHECK(finesse_from_round_trip(r) == doctest::Approx(kPi * std::sqrt(r) / (1.0 - r)).epsilon(1e-5));
}

TEST_CASE("resonant length puts the round-trip factor on the real axis") {
  prop::for_all(200, 203, [](prop::Gen& g, int) -> std::string {
    const double lambda = g.real(400e-9, 1100e-9);
    const auto c1 = slab_coefficients({g.real(1.5, 3.0), g.real(20e-9, 200e-9)}, lambda);
    const auto c2 = slab_coefficients({g.real(1.5, 3.0), g.real(20e-9, 200e-9)}, lambda);
    const double approx = g.real(1e-6, 30e-6);
    const double l0 = resonant_length(c1, c2, lambda, approx);
    if (std::abs(l0 - approx) > lambda / 4.0 + 1e-15) return prop::describe("L0 far from guess: ", l0 - approx);
    const cplx mu = round_trip_factor(c1, c2, EtalonGeometry::make(l0), lambda);
    if (std::abs(std::arg(mu)) > 1e-9) return prop::describe("arg mu = ", std::arg(mu));
    return {};
  });
}

TEST_CASE("transmission is periodic in the mismatch with period lambda/2") {
  const double lambda = 532e-9;
  const auto c = SlabCoefficients::ideal(0.3618, kPi / 2.0);
  const double l0 = resonant_length(c, c, lambda, 5.707e-6);
  prop::for_all(200, 204, [&](prop::Gen& g, int) -> std::string {
    const double dl = g.real(-lambda, lambda);
    const double a = steady_transmission(c, c, EtalonGeometry::make(l0, dl), lambda);
    const double b = steady_transmission(c, c, EtalonGeometry::make(l0, dl + lambda / 2.0), lambda);
    if (std::abs(a - b) > 1e-9) return prop::describe("dl=", dl, " ", a, " vs ", b);
    return {};
  });
  CHECK(steady_transmission(c, c, EtalonGeometry::make(l0), lambda) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fringe scan is normalised to its peak") {
  const double lambda = 632.8e-9;
  const auto c1 = SlabCoefficients::ideal(0.3, 0.2);
  const auto c2 = SlabCoefficients::ideal(0.5, -0.4);
  const double l0 = resonant_length(c1, c2, lambda, 10e-6);
  std::vector<double> grid;
  for (int i = -200; i <= 200; ++i) grid.push_back(i * lambda / 800.0);
  const auto scan = fringe_scan(c1, c2, EtalonGeometry::make(l0), lambda, grid);
  CHECK(scan.x_name == "displacement_m");
  CHECK(scan.y_name == "transmission_norm");
  CHECK(scan.y[200] == doctest::Approx(1.0).epsilon(1e-12));
  for (double y : scan.y) CHECK(y <= 1.0 + 1e-12);
}

TEST_CASE("geometry bookkeeping") {
  const auto g = EtalonGeometry::make(5e-6, 10e-9, 1e-6);
  CHECK(g.length() == doctest::Approx(5.01e-6));
  CHECK(g.x2 == doctest::Approx(6.01e-6));
  CHECK(g.tau == doctest::Approx(2.0 * 5.01e-6 / kSpeedOfLight));
  CHECK(g.fsr == doctest::Approx(kSpeedOfLight / (2.0 * 5.01e-6)));
  CHECK_THROWS_AS(EtalonGeometry::make(1e-6, -2e-6), DomainError);
  const auto perfect = SlabCoefficients::ideal(1.0);
  CHECK_THROWS_AS(steady_transmission(perfect, perfect, EtalonGeometry::make(5e-6), 532e-9), DivergenceError);
}
