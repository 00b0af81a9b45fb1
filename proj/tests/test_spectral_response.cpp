#include <cmath>

#include "doctest.h"
#include "mimcav/errors.hpp"
#include "mimcav/field_dynamics.hpp"
#include "mimcav/spectral_response.hpp"
#include "property.hpp"

using namespace mimcav;

namespace {

ResponseParams params(const SlabCoefficients& c1, const SlabCoefficients& c2, double dl, double lambda = 532e-9) {
  ResponseParams p;
  p.c1 = c1;
  p.c2 = c2;
  p.wavelength_m = lambda;
  p.geometry = EtalonGeometry::make(resonant_length(c1, c2, lambda, 5.707e-6), dl);
  return p;
}

}  // namespace

TEST_CASE("modulation index") {
  CHECK(modulation_index(1e-9, 532e-9) == doctest::Approx(4.0 * kPi * 1e-9 / 532e-9));
  ResponseParams p;
  p.xi2 = 0.2;
  CHECK(p.perturbative_warning());
  p.xi2 = 0.05;
  CHECK_FALSE(p.perturbative_warning());
}

TEST_CASE("zeroth-order responses conserve energy at DC") {
  prop::for_all(500, 401, [](prop::Gen& g, int) -> std::string {
    const double lambda = g.real(400e-9, 1100e-9);
    const auto c1 = slab_coefficients({g.real(1.3, 3.0), g.real(10e-9, 300e-9)}, lambda);
    const auto c2 = slab_coefficients({g.real(1.3, 3.0), g.real(10e-9, 300e-9)}, lambda);
    const auto p = params(c1, c2, g.real(-lambda, lambda), lambda);
    const double sum = std::norm(reflection_response_r0(p, 0.0)) + std::norm(transmission_response_t0(p, 0.0));
    if (std::abs(sum - 1.0) > 1e-12) return prop::describe("|R0|^2+|T0|^2 = ", sum);
    return {};
  });
}

TEST_CASE("DC cavity response is the steady intracavity field") {
  const auto c = SlabCoefficients::ideal(0.3618, kPi / 2.0);
  const auto p = params(c, c, 40e-9);
  const cplx mu = round_trip_factor(c, c, p.geometry, p.wavelength_m);
  CHECK(std::abs(cavity_response_c0(p, 0.0) - c.t / (1.0 - mu)) < 1e-14);
  CHECK(std::abs(d_of_s(p, 0.0) - (1.0 - mu)) < 1e-15);
}

TEST_CASE("modulation lowers the carrier round-trip gain by J0 factors") {
  const auto c = SlabCoefficients::ideal(0.5);
  auto p = params(c, c, 0.0);
  p.xi1 = 0.3;
  p.xi2 = 0.1;
  const cplx mu = round_trip_factor(c, c, p.geometry, p.wavelength_m);
  CHECK(std::abs(d_of_s(p, 0.0) - (1.0 - mu * std::cyl_bessel_j(0.0, 0.3) * std::cyl_bessel_j(0.0, 0.1))) < 1e-14);
}

TEST_CASE("transparent rear membrane reduces to single-slab reflection") {
  prop::for_all(100, 402, [](prop::Gen& g, int) -> std::string {
    const auto c1 = SlabCoefficients::ideal(g.real(0.01, 0.9), g.real(-kPi, kPi));
    auto p = params(c1, SlabCoefficients::transparent(), g.real(-1e-7, 1e-7));
    p.omega_m1 = g.real(1e5, 1e7);
    p.omega_m2 = g.real(1e5, 1e7);
    const cplx s{0.0, g.real(-1e12, 1e12)};
    if (std::abs(reflection_response_r0(p, s) + std::conj(c1.r)) > 0.0) return "R0 differs from -r1*";
    for (int sign : {-1, 1}) {
      if (std::abs(reflection_response_r1(p, 1, s, sign) - 0.5 * std::conj(c1.r)) > 0.0) return "R1_1 differs";
      if (std::abs(reflection_response_r1(p, 2, s, sign)) > 0.0) return "R1_2 is not zero";
    }
    return {};
  });
}

TEST_CASE("first-order predictions match the time-domain sidebands") {
  const double lambda = 532e-9;
  const auto c = slab_coefficients({IndexModel::si3n4_calibrated()(lambda), 75.2e-9}, lambda);
  for (double dl : {-60e-9, 0.0, 25e-9}) {
    auto p = params(c, c, dl);
    const double period = 12.0 * p.geometry.tau;
    for (int m = 1; m <= 2; ++m) {
      const double xi = 1e-4;
      auto traj = MembraneTrajectory::sinusoid(xi * lambda / (4.0 * kPi), kTwoPi / period);
      DriveField drive;
      drive.wavelength_m = lambda;
      const double mu = std::abs(round_trip_factor(c, c, p.geometry, lambda));
      const double duration = (static_cast<double>(ring_up_round_trips(mu)) + 12.0 * 25.0) * p.geometry.tau;
      const auto rec = m == 1 ? simulate(c, c, p.geometry, drive, traj, {}, duration, 48)
                              : simulate(c, c, p.geometry, drive, {}, traj, duration, 48);
      auto q = p;
      (m == 1 ? q.xi1 : q.xi2) = xi;
      (m == 1 ? q.omega_m1 : q.omega_m2) = kTwoPi / period;
      for (auto [rc, fc] : {std::pair{ResponseChannel::cavity, FieldChannel::cavity},
                            std::pair{ResponseChannel::reflected, FieldChannel::reflected}}) {
        const auto pred = predict_first_order_sidebands(q, m, rc);
        const auto meas = extract_sidebands(rec, fc, 1.0 / period, 1);
        CHECK(std::abs(meas.upper[0] - pred.upper) < 1e-3 * std::abs(pred.upper));
        CHECK(std::abs(meas.lower[0] - pred.lower) < 1e-3 * std::abs(pred.lower));
      }
    }
  }
}

TEST_CASE("high-finesse denominator approximates the exact one near resonance") {
  const double lambda = 1064e-9;
  const auto c = SlabCoefficients::ideal(0.999);
  const auto base = params(c, c, 0.0, lambda);
  const auto hf = HighFinesseParams::from_coefficients(c, c, base.geometry);
  CHECK(hf.kappa == doctest::Approx(0.001 * base.geometry.fsr));
  for (double detune : {-0.3, 0.0, 0.5}) {
    // mismatch expressed in linewidths: 2 k dL = detune * (1 - R)
    const double dl = detune * 0.001 / (2.0 * kTwoPi / lambda);
    auto p = params(c, c, dl, lambda);
    for (double frac : {0.0, 0.05, 0.1, 0.5, 1.0}) {
      const double omega = frac * hf.kappa;
      const cplx exact = d_of_s(p, cplx{0.0, omega});
      const cplx approx = high_finesse_d(hf, p.geometry, lambda, omega);
      CHECK(std::abs(approx - exact) < 0.01 * std::abs(exact));
    }
  }
}

TEST_CASE("bad-cavity coefficients and regime warning") {
  const auto c = SlabCoefficients::ideal(0.3618, kPi / 2.0);
  auto p = params(c, c, 0.0);
  p.omega_m1 = kTwoPi * 400e3;
  p.omega_m2 = kTwoPi * 410e3;
  const auto bc = bad_cavity_reflection(p);
  CHECK_FALSE(bc.regime_warning);
  CHECK(std::abs(bc.r1_1 - reflection_response_r1(p, 1, 0.0, 1)) < 1e-6);
  CHECK(std::abs(bc.r0 - reflection_response_r0(p, 0.0)) == 0.0);
  p.omega_m2 = kTwoPi * 0.05 * p.geometry.fsr;
  CHECK(bad_cavity_reflection(p).regime_warning);
}

TEST_CASE("argument validation") {
  const auto c = SlabCoefficients::ideal(0.3);
  const auto p = params(c, c, 0.0);
  CHECK_THROWS_AS(cavity_response_c1(p, 3, 0.0, 1), DomainError);
  CHECK_THROWS_AS(cavity_response_c1(p, 1, 0.0, 0), DomainError);
  auto q = p;
  q.xi1 = -1.0;
  CHECK_THROWS_AS(d_of_s(q, 0.0), DomainError);
}
