#include "mimcav/selftest.hpp"

#include <cmath>
#include <cstdio>

#include "mimcav/bessel.hpp"
#include "mimcav/etalon_steady.hpp"
#include "mimcav/field_dynamics.hpp"
#include "mimcav/homodyne.hpp"
#include "mimcav/random.hpp"
#include "mimcav/slab_optics.hpp"
#include "mimcav/spectral_response.hpp"

namespace mimcav {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

SelfCheck slab_energy() {
  NoiseSource rng(7, 0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const SlabParams slab{rng.uniform(1.0, 3.5), rng.uniform(0.0, 1e-6)};
    const auto c = slab_coefficients(slab, rng.uniform(300e-9, 2000e-9));
    worst = std::max(worst, std::abs(std::norm(c.r) + std::norm(c.t) - 1.0));
  }
  return {"slab |r|^2+|t|^2 = 1", worst < 1e-12, "max deviation " + sci(worst)};
}

SelfCheck cavity_energy() {
  NoiseSource rng(7, 1);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double lambda = rng.uniform(400e-9, 1100e-9);
    const auto c1 = slab_coefficients({rng.uniform(1.2, 3.0), rng.uniform(10e-9, 300e-9)}, lambda);
    const auto c2 = slab_coefficients({rng.uniform(1.2, 3.0), rng.uniform(10e-9, 300e-9)}, lambda);
    ResponseParams p;
    p.c1 = c1;
    p.c2 = c2;
    p.wavelength_m = lambda;
    p.geometry = EtalonGeometry::make(rng.uniform(1e-6, 50e-6), rng.uniform(-1e-7, 1e-7));
    const double sum = std::norm(reflection_response_r0(p, 0.0)) + std::norm(transmission_response_t0(p, 0.0));
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return {"steady cavity |r0|^2+|t0|^2 = 1", worst < 1e-9, "max deviation " + sci(worst)};
}

SelfCheck finesse_value() {
  const auto c = SlabCoefficients::ideal(0.3618);
  const double f = finesse_fwhm(c, c);
  return {"finesse(R=0.3618) = 2.809", std::abs(f / 2.809 - 1.0) < 5e-3, "got " + sci(f)};
}

SelfCheck bessel_oracle() {
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = 0.05 * i;
    worst = std::max(worst, std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)));
    worst = std::max(worst, std::abs(bessel_j1(x) - std::cyl_bessel_j(1.0, x)));
  }
  return {"Bessel series vs std::cyl_bessel_j", worst < 1e-13, "max deviation " + sci(worst)};
}

SelfCheck static_simulation() {
  const double lambda = 532e-9;
  const auto c = SlabCoefficients::ideal(0.3618, kPi / 2.0);
  const auto g = EtalonGeometry::make(resonant_length(c, c, lambda, 5.707e-6), 20e-9);
  DriveField drive;
  drive.wavelength_m = lambda;
  const double mu = std::abs(round_trip_factor(c, c, g, lambda));
  const double duration = (static_cast<double>(ring_up_round_trips(mu)) + 60.0) * g.tau;
  const auto rec = simulate(c, c, g, drive, MembraneTrajectory::at_rest(), MembraneTrajectory::at_rest(), duration, 8);
  const double got = std::norm(rec.transmitted.back());
  const double want = steady_transmission(c, c, g, lambda);
  const double err = std::abs(got - want);
  return {"static time-domain field reaches the Airy value", err < 1e-9, "deviation " + sci(err)};
}

SelfCheck parallel_sweep() {
  SweepSpec spec;
  spec.c1 = SlabCoefficients::ideal(0.3618, kPi / 2.0);
  spec.c2 = spec.c1;
  spec.resonant_length_m = resonant_length(spec.c1, spec.c2, spec.wavelength_m, 5.707e-6);
  spec.mode1 = MechMode::from_frequency(401.0e3, 1e4, 1e-10, 0.1);
  spec.mode2 = MechMode::from_frequency(401.1e3, 1e4, 1e-10, 1.0);
  for (int i = 0; i < 24; ++i) spec.dl_grid.push_back(i / 12.0);
  for (int i = 0; i < 64; ++i) spec.freq_grid.push_back(400.8e3 + 5.0 * i);
  const bool same = sweep_map(spec, 4) == sweep_map_serial(spec);
  return {"parallel sweep equals serial reference", same, same ? "bit-identical" : "maps differ"};
}

}  // namespace

std::vector<SelfCheck> run_selftest() {
  std::vector<SelfCheck> out;
  for (auto* check : {&slab_energy, &cavity_energy, &finesse_value, &bessel_oracle, &static_simulation, &parallel_sweep}) {
    try {
      out.push_back(check());
    } catch (const std::exception& e) {
      out.push_back({"check threw", false, e.what()});
    }
  }
  return out;
}

}  // namespace mimcav
