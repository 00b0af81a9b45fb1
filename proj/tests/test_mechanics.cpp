#include <cmath>

#include "doctest.h"
#include "mimcav/errors.hpp"
#include "mimcav/mechanics.hpp"
#include "property.hpp"

using namespace mimcav;

TEST_CASE("mode frequency conventions for the nominal 1 mm membrane") {
  const MembranePlate plate{1e-3, 1e-3, 1e9, 3100.0};
  CHECK(mode_frequency(plate, 1, 1, FrequencyConvention::as_written) == doctest::Approx(803.2e3).epsilon(1e-4));
  CHECK(mode_frequency(plate, 1, 1, FrequencyConvention::half_factor) == doctest::Approx(401.6e3).epsilon(1e-4));
  CHECK(mode_frequency(plate, 2, 2) == doctest::Approx(2.0 * mode_frequency(plate, 1, 1)));
  CHECK(mode_frequency(plate, 1, 2) == doctest::Approx(mode_frequency(plate, 2, 1)));
  CHECK_THROWS_AS(mode_frequency(plate, 0, 1), DomainError);
  CHECK_THROWS_AS(mode_frequency({0.0, 1e-3, 1e9, 3100.0}, 1, 1), DomainError);
}

TEST_CASE("side lengths are recovered from exact mode frequencies") {
  for (auto convention : {FrequencyConvention::half_factor, FrequencyConvention::as_written}) {
    prop::for_all(100, 501, [&](prop::Gen& g, int) -> std::string {
      const MembranePlate plate{g.real(0.5e-3, 2e-3), g.real(0.5e-3, 2e-3), g.real(0.2e9, 1.5e9), 3100.0};
      std::vector<ModeObservation> obs;
      for (int n = 1; n <= 3; ++n) {
        for (int m = 1; m <= 3; ++m) obs.push_back({n, m, mode_frequency(plate, n, m, convention)});
      }
      const auto fit = infer_side_lengths(obs, plate.stress_pa, plate.density_kg_m3, convention);
      if (!fit.converged) return "not converged";
      if (std::abs(fit.side_x_m / plate.side_x_m - 1.0) > 1e-9 || std::abs(fit.side_y_m / plate.side_y_m - 1.0) > 1e-9) {
        return prop::describe("Lx ", fit.side_x_m, " Ly ", fit.side_y_m);
      }
      for (double s : fit.relative_shift) {
        if (std::abs(s) > 1e-9) return prop::describe("shift ", s);
      }
      return {};
    });
  }
}

TEST_CASE("side-length inversion needs modes that separate the axes") {
  const MembranePlate plate{1e-3, 1.1e-3, 1e9, 3100.0};
  const std::vector<ModeObservation> symmetric{{1, 1, mode_frequency(plate, 1, 1)},
                                               {2, 2, mode_frequency(plate, 2, 2)}};
  CHECK_THROWS_AS(infer_side_lengths(symmetric, 1e9, 3100.0), DomainError);
  const std::vector<ModeObservation> bad{{1, 1, -5.0}, {1, 2, 1e5}};
  CHECK_THROWS_AS(infer_side_lengths(bad, 1e9, 3100.0), DomainError);
}

TEST_CASE("susceptibility of a damped mode") {
  const auto mode = MechMode::from_frequency(400e3, 1e4, 2e-11);
  CHECK(mode.quality() == doctest::Approx(1e4));
  const cplx at_res = susceptibility(mode, mode.omega);
  CHECK(std::abs(at_res.real()) < 1e-12 * std::abs(at_res));
  CHECK(at_res.imag() < 0.0);
  CHECK(std::abs(at_res) == doctest::Approx(1.0 / (mode.mass * mode.gamma * mode.omega)));
  CHECK(std::abs(susceptibility(mode, 0.0)) == doctest::Approx(1.0 / (mode.mass * mode.omega * mode.omega)));
  // half power at omega_m +- gamma/2
  const double half = std::norm(susceptibility(mode, mode.omega + 0.5 * mode.gamma)) / std::norm(at_res);
  CHECK(half == doctest::Approx(0.5).epsilon(1e-3));
  CHECK_THROWS_AS(MechMode::from_frequency(400e3, 0.0, 1e-11), DomainError);
}

TEST_CASE("displacement spectra") {
  const auto m1 = MechMode::from_frequency(400e3, 1e4, 2e-11, 1.0, 2e-12);
  const auto m2 = MechMode::from_frequency(401e3, 2e4, 3e-11, 1.0, 1e-12);
  prop::for_all(200, 502, [&](prop::Gen& g, int) -> std::string {
    const double w = kTwoPi * g.real(390e3, 410e3);
    const auto u = displacement_spectra(m1, m2, w, ForceCorrelation::uncorrelated);
    const auto c = displacement_spectra(m1, m2, w, ForceCorrelation::common_drive);
    if (u.s12 != cplx{}) return "uncorrelated cross spectrum is not zero";
    if (u.s11 != c.s11 || u.s22 != c.s22) return "auto spectra depend on correlation";
    // Cauchy-Schwarz, with equality for a common drive
    if (std::abs(std::norm(c.s12) - c.s11 * c.s22) > 1e-9 * c.s11 * c.s22) return "|S12|^2 != S11 S22";
    if (std::abs(u.s11 - std::norm(susceptibility(m1, w)) * 4e-24) > 1e-12 * u.s11) return "S11 scale";
    return {};
  });
}

TEST_CASE("piezo shift and effective mass") {
  CHECK(piezo_shifted_omega(100.0, 0.01, 2.0) == doctest::Approx(102.0));
  CHECK(piezo_shifted_omega(100.0, 0.0, 5.0) == 100.0);
  const MembranePlate plate{1e-3, 1e-3, 1e9, 3100.0};
  CHECK(default_effective_mass(plate, 75e-9) == doctest::Approx(3100.0 * 1e-6 * 75e-9 / 4.0));
  CHECK_THROWS_AS(default_effective_mass(plate, 0.0), DomainError);
}
