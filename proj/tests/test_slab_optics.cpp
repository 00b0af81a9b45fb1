#include <cmath>

#include "doctest.h"
#include "mimcav/errors.hpp"
#include "mimcav/slab_optics.hpp"
#include "property.hpp"

using namespace mimcav;

TEST_CASE("lossless slab conserves energy and its two-port matrix is unitary") {
  prop::for_all(1000, 101, [](prop::Gen& g, int) -> std::string {
    const SlabParams slab{g.real(1.0, 4.0), g.real(0.0, 2e-6)};
    const double lambda = g.real(300e-9, 2000e-9);
    const auto c = slab_coefficients(slab, lambda);
    const double sum = std::norm(c.r) + std::norm(c.t);
    if (std::abs(sum - 1.0) > 1e-12) return prop::describe("|r|^2+|t|^2 = ", sum);
    // M = [[t, r], [-r*, t*]]; M^dagger M = I
    const cplx off = std::conj(c.t) * c.r - c.r * std::conj(c.t);
    if (std::abs(off) > 1e-12) return prop::describe("off-diagonal ", std::abs(off));
    if (std::abs(c.R - std::norm(c.r)) > 1e-15) return "R field inconsistent";
    return {};
  });
}

TEST_CASE("quarter-wave slab reaches the maximum reflectivity") {
  for (double n : {1.5, 2.0, 2.046, 3.4}) {
    const double lambda = 800e-9;
    const auto c = slab_coefficients({n, lambda / (4.0 * n)}, lambda);
    const double expected = std::pow((n * n - 1.0) / (n * n + 1.0), 2);
    CHECK(c.R == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("half-wave and index-matched slabs are transparent") {
  const double lambda = 633e-9;
  const auto half = slab_coefficients({2.0, lambda / 4.0}, lambda);
  CHECK(half.R < 1e-25);
  const auto matched = slab_coefficients({1.0, 100e-9}, lambda);
  CHECK(std::abs(matched.r) < 1e-15);
  CHECK(std::abs(std::abs(matched.t) - 1.0) < 1e-15);
}

TEST_CASE("thin-slab limit: reflectivity grows quadratically with thickness") {
  const double lambda = 532e-9;
  const double n = 2.0;
  const auto a = slab_coefficients({n, 1e-10}, lambda);
  const auto b = slab_coefficients({n, 2e-10}, lambda);
  CHECK(b.R / a.R == doctest::Approx(4.0).epsilon(1e-4));
}

TEST_CASE("invalid slab parameters are rejected") {
  CHECK_THROWS_AS(slab_coefficients({0.9, 1e-7}, 500e-9), DomainError);
  CHECK_THROWS_AS(slab_coefficients({2.0, -1e-9}, 500e-9), DomainError);
  CHECK_THROWS_AS(slab_coefficients({2.0, 1e-7}, 0.0), DomainError);
  CHECK_THROWS_AS(SlabCoefficients::from_amplitudes({0.5, 0.0}, {0.5, 0.0}), DomainError);
  CHECK_THROWS_AS(SlabCoefficients::ideal(1.2), DomainError);
}

TEST_CASE("ideal coefficients carry the requested reflectivity and phase") {
  const auto c = SlabCoefficients::ideal(0.3618, 0.7);
  CHECK(c.R == doctest::Approx(0.3618));
  CHECK(std::arg(c.r) == doctest::Approx(0.7));
  CHECK(std::norm(c.r) + std::norm(c.t) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("index models") {
  SUBCASE("table interpolates linearly and clamps") {
    const auto m = IndexModel::table("t", {{500e-9, 2.0}, {700e-9, 1.8}});
    CHECK(m(600e-9) == doctest::Approx(1.9));
    CHECK(m(400e-9) == doctest::Approx(2.0));
    CHECK(m(900e-9) == doctest::Approx(1.8));
  }
  SUBCASE("calibrated default reproduces the measured reflectivities at 75.2 nm") {
    const auto m = IndexModel::si3n4_calibrated();
    const std::pair<double, double> points[] = {{532e-9, 0.3618}, {632.8e-9, 0.3571}, {980e-9, 0.2652}};
    for (const auto& [lambda, r] : points) {
      CHECK(slab_coefficients({m(lambda), 75.2e-9}, lambda).R == doctest::Approx(r).epsilon(2e-4));
    }
  }
  SUBCASE("sellmeier is normal-dispersive in the visible") {
    const auto m = IndexModel::si3n4_sellmeier();
    CHECK(m(500e-9) > m(700e-9));
    CHECK(m(633e-9) == doctest::Approx(2.02).epsilon(0.02));
  }
  SUBCASE("lookup by name") {
    CHECK(IndexModel::by_name("constant", 2.2)(1e-6) == doctest::Approx(2.2));
    CHECK(IndexModel::by_name("si3n4-calibrated").name() == "si3n4-calibrated");
    CHECK_THROWS_AS(IndexModel::by_name("glass"), DomainError);
  }
}

TEST_CASE("reflectivity curve") {
  const std::vector<double> grid{500e-9, 600e-9, 700e-9};
  const auto curve = reflectivity_curve(75.2e-9, IndexModel::constant(2.0), grid);
  CHECK(curve.x_name == "wavelength_m");
  CHECK(curve.y_name == "reflectivity");
  REQUIRE(curve.size() == 3);
  CHECK(curve.y[1] == doctest::Approx(slab_coefficients({2.0, 75.2e-9}, 600e-9).R));
  const std::vector<double> bad{600e-9, 500e-9};
  CHECK_THROWS_AS(reflectivity_curve(75.2e-9, IndexModel::constant(2.0), bad), DomainError);
  CHECK_THROWS_AS(reflectivity_curve(75.2e-9, IndexModel::constant(2.0), std::vector<double>{}), DomainError);
}
