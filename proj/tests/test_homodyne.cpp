#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mimcav/errors.hpp"
#include "mimcav/homodyne.hpp"
#include "property.hpp"

using namespace mimcav;

namespace {

SweepSpec small_spec() {
  SweepSpec spec;
  spec.c1 = SlabCoefficients::ideal(0.3618, kPi / 2.0);
  spec.c2 = spec.c1;
  spec.resonant_length_m = resonant_length(spec.c1, spec.c2, spec.wavelength_m, 5.707e-6);
  spec.mode1 = MechMode::from_frequency(411.2e3, 1e4, 5.6e-11, 0.1, 1e-12);
  spec.mode2 = MechMode::from_frequency(411.3e3, 1e4, 5.6e-11, 1.0, 1e-12);
  for (int i = 0; i < 40; ++i) spec.dl_grid.push_back(i / 20.0);
  for (int i = 0; i < 200; ++i) spec.freq_grid.push_back(411.0e3 + 2.5 * i);
  return spec;
}

}  // namespace

TEST_CASE("photocurrent of the balanced detector") {
  DetectionChain chain;
  chain.input_power_w = 4e-3;
  chain.lo_power_w = 1e-3;
  chain.lo_phase_rad = kPi / 2.0;
  chain.gain_v_per_a = 1e4;
  chain.responsivity_a_per_w = 0.5;
  const cplx field{0.01, 0.03};
  const auto s = photocurrent(field, chain);
  const double expected = 2.0 * std::sqrt(4e-6) * (0.03 / std::sqrt(4e-3));
  CHECK(s.current_a == doctest::Approx(expected));
  CHECK(s.voltage_v == doctest::Approx(5e3 * expected));
  chain.input_power_w = 0.0;
  CHECK_THROWS_AS(photocurrent(field, chain), DomainError);
}

TEST_CASE("quadrature weight selects the imaginary part at pi/2") {
  prop::for_all(100, 601, [](prop::Gen& g, int) -> std::string {
    const cplx r{g.real(-1, 1), g.real(-1, 1)};
    if (std::abs(quadrature_weight(r, kPi / 2.0) - r.imag()) > 1e-15) return "weight != Im";
    if (std::abs(quadrature_weight(r, 0.0) - r.real()) > 0.0) return "weight != Re at 0";
    return {};
  });
}

TEST_CASE("pi/2 is the optimal local-oscillator phase for purely imaginary responses") {
  // Ideal slabs with r = i sqrt(R), on resonance: the bad-cavity R1 coefficients are imaginary.
  ResponseParams p;
  p.c1 = SlabCoefficients::ideal(0.3618, kPi / 2.0);
  p.c2 = p.c1;
  p.geometry = EtalonGeometry::make(resonant_length(p.c1, p.c2, p.wavelength_m, 5.707e-6));
  const auto bc = bad_cavity_reflection(p);
  for (cplx r1 : {bc.r1_1, bc.r1_2}) {
    CHECK(std::abs(r1.real()) < 1e-12 * std::abs(r1));
    double best_phase = 0.0;
    double best = -1.0;
    for (int i = 0; i < 3600; ++i) {
      const double phi = kTwoPi * i / 3600.0;
      const double w = std::abs(quadrature_weight(r1, phi));
      if (w > best) {
        best = w;
        best_phase = phi;
      }
    }
    CHECK(std::abs(std::sin(best_phase)) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("noise spectrum structure") {
  auto spec = small_spec();
  ResponseParams p;
  p.c1 = spec.c1;
  p.c2 = spec.c2;
  p.geometry = EtalonGeometry::make(spec.resonant_length_m, 20e-9);
  const auto bc = bad_cavity_reflection(p);

  SUBCASE("uncorrelated forces add the two single-mode spectra") {
    auto only1 = spec.mode1;
    auto only2 = spec.mode2;
    auto silent1 = spec.mode1;
    auto silent2 = spec.mode2;
    silent1.force = 0.0;
    silent2.force = 0.0;
    const auto both = voltage_noise_spectrum(spec.chain, bc, spec.wavelength_m, only1, only2,
                                             ForceCorrelation::uncorrelated, spec.freq_grid);
    const auto a = voltage_noise_spectrum(spec.chain, bc, spec.wavelength_m, only1, silent2,
                                          ForceCorrelation::uncorrelated, spec.freq_grid);
    const auto b = voltage_noise_spectrum(spec.chain, bc, spec.wavelength_m, silent1, only2,
                                          ForceCorrelation::uncorrelated, spec.freq_grid);
    for (std::size_t i = 0; i < both.size(); ++i) CHECK(both.y[i] == doctest::Approx(a.y[i] + b.y[i]));
  }
  SUBCASE("common drive spectrum is non-negative and above the floor") {
    spec.chain.noise_floor_v2_per_hz = 1e-15;
    prop::for_all(50, 602, [&](prop::Gen& g, int) -> std::string {
      auto m1 = spec.mode1;
      auto m2 = spec.mode2;
      m1.overlap = g.real(0.0, 10.0);
      m2.overlap = g.real(0.0, 10.0);
      m2.omega = m1.omega * g.real(0.999, 1.001);
      const auto s = voltage_noise_spectrum(spec.chain, bc, spec.wavelength_m, m1, m2,
                                            ForceCorrelation::common_drive, spec.freq_grid);
      for (double y : s.y) {
        if (!(y >= 1e-15)) return prop::describe("PSD ", y);
      }
      return {};
    });
  }
  SUBCASE("peak sits at the mechanical resonance with the expected scale") {
    auto silent1 = spec.mode1;
    silent1.force = 0.0;
    const std::vector<double> f{spec.mode2.omega / kTwoPi};
    const auto s = voltage_noise_spectrum(spec.chain, bc, spec.wavelength_m, silent1, spec.mode2,
                                          ForceCorrelation::common_drive, f, 2.0);
    const double omega_l = kTwoPi * kSpeedOfLight / spec.wavelength_m;
    const double g = 4.0 * spec.chain.gain_v_per_a * spec.chain.responsivity_a_per_w * omega_l / kSpeedOfLight *
                     std::sqrt(2.0 * spec.chain.lo_power_w * spec.chain.input_power_w);
    const double w2 = spec.mode2.overlap * bc.r1_2.imag();
    const double s22 = std::norm(susceptibility(spec.mode2, spec.mode2.omega)) * 1e-24;
    CHECK(s.y[0] == doctest::Approx(2.0 * g * g * w2 * w2 * s22));
  }
}

TEST_CASE("sweep maps") {
  const auto spec = small_spec();
  SUBCASE("parallel and serial maps are identical for any worker count") {
    const auto serial = sweep_map_serial(spec);
    for (int workers : {1, 2, 3, 8}) CHECK(sweep_map(spec, workers) == serial);
    CHECK(serial.psd.size() == spec.dl_grid.size() * spec.freq_grid.size());
  }
  SUBCASE("rows repeat every half wavelength without the piezo stress shift") {
    const auto map = sweep_map(spec);
    for (std::size_t r = 0; r + 20 < spec.dl_grid.size(); ++r) {
      for (std::size_t c = 0; c < spec.freq_grid.size(); ++c) {
        CHECK(map.at(r, c) == doctest::Approx(map.at(r + 20, c)).epsilon(1e-6));
      }
    }
  }
  SUBCASE("piezo shift moves the peak of the glued membrane") {
    auto shifted = spec;
    shifted.piezo_beta = 2e-4;
    shifted.overlap_ratio = 0.0;
    const auto map = sweep_map(shifted);
    auto peak_col = [&](std::size_t row) {
      std::size_t best = 0;
      for (std::size_t c = 0; c < shifted.freq_grid.size(); ++c) {
        if (map.at(row, c) > map.at(row, best)) best = c;
      }
      return best;
    };
    CHECK(peak_col(39) > peak_col(0));
  }
  SUBCASE("invalid specs") {
    auto bad = spec;
    bad.dl_grid.clear();
    CHECK_THROWS_AS(sweep_map(bad), DomainError);
    bad = spec;
    bad.piezo_membrane = 3;
    CHECK_THROWS_AS(sweep_map_serial(bad), DomainError);
  }
}
