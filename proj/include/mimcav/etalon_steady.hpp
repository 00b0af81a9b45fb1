#pragma once

// Static-mirror etalon: round-trip factor, Airy transmission, FWHM finesse.

#include <span>

#include "mimcav/constants.hpp"
#include "mimcav/series.hpp"
#include "mimcav/slab_optics.hpp"

namespace mimcav {

/// Cavity length L = L0 + deltaL between the membranes. L0 is the resonant
/// length (see resonant_length); deltaL is the stationary mismatch.
struct EtalonGeometry {
  double L0 = 0.0;
  double deltaL = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  double tau = 0.0;  // round-trip time, s
  double fsr = 0.0;  // Hz
  bool large_mismatch = false;  // |deltaL| > 10% of L0

  static EtalonGeometry make(double L0, double deltaL = 0.0, double x1 = 0.0);
  double length() const { return L0 + deltaL; }
  EtalonGeometry with_mismatch(double new_deltaL) const { return make(L0, new_deltaL, x1); }
};

/// Length closest to approx_length at which arg(mu) = 0 mod 2 pi.
double resonant_length(const SlabCoefficients& c1, const SlabCoefficients& c2, double wavelength_m,
                       double approx_length_m);

/// omega_L * tau reduced to [0, 2 pi) without losing digits for long cavities.
double round_trip_phase(const EtalonGeometry& geometry, double wavelength_m);

/// r2bar = -r2 e^{i omega_L tau}; returns conj(r2bar).
cplx r2bar_conj(const SlabCoefficients& c2, const EtalonGeometry& geometry, double wavelength_m);

/// mu = r1 * conj(r2bar), |mu| = sqrt(R1 R2).
cplx round_trip_factor(const SlabCoefficients& c1, const SlabCoefficients& c2, const EtalonGeometry& geometry,
                       double wavelength_m);

/// |t1 t2|^2 / |1 - mu|^2. Throws DivergenceError when |mu| >= 1.
double steady_transmission(const SlabCoefficients& c1, const SlabCoefficients& c2,
                           const EtalonGeometry& geometry, double wavelength_m);

/// Free spectral range over the FWHM of the Airy peak for round-trip
/// magnitude |mu|, with the half-maximum crossing found by bisection.
/// Throws DomainError if the Airy minimum stays above half maximum
/// (|mu| < 3 - 2 sqrt(2)).
double finesse_from_round_trip(double mu_abs);
double finesse_fwhm(const SlabCoefficients& c1, const SlabCoefficients& c2);
/// Inverse of finesse_from_round_trip for identical membranes (R = |mu|).
double reflectivity_from_finesse(double finesse);

/// Peak-normalised transmission versus displacement of membrane 2 added to
/// deltaL. Period lambda/2.
SpectrumSeries fringe_scan(const SlabCoefficients& c1, const SlabCoefficients& c2, const EtalonGeometry& geometry,
                           double wavelength_m, std::span<const double> displacements_m);

}  // namespace mimcav
