#include "mimcav/etalon_steady.hpp"

#include <cmath>

#include "mimcav/errors.hpp"

namespace mimcav {

namespace {

// Fractional part of 2L/lambda, split so the large L0 term does not swamp deltaL.
double half_wave_fraction(double L0, double deltaL, double wavelength_m) {
  const double a = 2.0 * L0 / wavelength_m;
  const double b = 2.0 * deltaL / wavelength_m;
  double f = (a - std::floor(a)) + (b - std::floor(b));
  return f - std::floor(f);
}

void require_convergent(double mu_abs) {
  if (!(mu_abs < 1.0)) throw DivergenceError("round-trip factor |mu| >= 1: cavity sum diverges");
}

double airy_relative(double mu_abs, double phase) {
  // |1 - mu|^{-2} normalised to its peak (1 - |mu|)^{-2}
  const double d = 1.0 + mu_abs * mu_abs - 2.0 * mu_abs * std::cos(phase);
  return (1.0 - mu_abs) * (1.0 - mu_abs) / d;
}

}  // namespace

EtalonGeometry EtalonGeometry::make(double L0, double deltaL, double x1) {
  if (!(L0 + deltaL > 0.0)) throw DomainError("cavity length must be positive");
  EtalonGeometry g;
  g.L0 = L0;
  g.deltaL = deltaL;
  g.x1 = x1;
  g.x2 = x1 + L0 + deltaL;
  g.tau = 2.0 * (L0 + deltaL) / kSpeedOfLight;
  g.fsr = 1.0 / g.tau;
  g.large_mismatch = std::abs(deltaL) > 0.1 * std::abs(L0);
  return g;
}

double round_trip_phase(const EtalonGeometry& geometry, double wavelength_m) {
  if (!(wavelength_m > 0.0)) throw DomainError("wavelength must be positive");
  return kTwoPi * half_wave_fraction(geometry.L0, geometry.deltaL, wavelength_m);
}

cplx r2bar_conj(const SlabCoefficients& c2, const EtalonGeometry& geometry, double wavelength_m) {
  return -std::conj(c2.r) * std::polar(1.0, -round_trip_phase(geometry, wavelength_m));
}

cplx round_trip_factor(const SlabCoefficients& c1, const SlabCoefficients& c2, const EtalonGeometry& geometry,
                       double wavelength_m) {
  return c1.r * r2bar_conj(c2, geometry, wavelength_m);
}

double resonant_length(const SlabCoefficients& c1, const SlabCoefficients& c2, double wavelength_m,
                       double approx_length_m) {
  if (!(wavelength_m > 0.0)) throw DomainError("wavelength must be positive");
  // arg(mu) = arg(-r1 r2*) - 4 pi L / lambda; solve for 0 mod 2 pi.
  const cplx base = -c1.r * std::conj(c2.r);
  const double phi0 = std::abs(base) > 0.0 ? std::arg(base) : 0.0;
  const double half = wavelength_m / 2.0;
  const double L_ref = phi0 / kTwoPi * half;
  const double m = std::round((approx_length_m - L_ref) / half);
  double L = L_ref + m * half;
  if (L <= 0.0) L += half;
  return L;
}

double steady_transmission(const SlabCoefficients& c1, const SlabCoefficients& c2,
                           const EtalonGeometry& geometry, double wavelength_m) {
  const cplx mu = round_trip_factor(c1, c2, geometry, wavelength_m);
  require_convergent(std::abs(mu));
  return std::norm(c1.t * c2.t) / std::norm(1.0 - mu);
}

double finesse_from_round_trip(double mu_abs) {
  require_convergent(mu_abs);
  if (!(mu_abs >= 0.0)) throw DomainError("round-trip magnitude must be non-negative");
  // Half-width phase: Airy falls monotonically on [0, pi].
  if (airy_relative(mu_abs, kPi) >= 0.5) {
    throw DomainError("Airy contrast too low for a half-maximum width (|mu| below 3 - 2 sqrt 2)");
  }
  double lo = 0.0;
  double hi = kPi;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (airy_relative(mu_abs, mid) > 0.5 ? lo : hi) = mid;
  }
  const double fwhm = lo + hi;  // 2 * half-width
  return kTwoPi / fwhm;
}

double finesse_fwhm(const SlabCoefficients& c1, const SlabCoefficients& c2) {
  return finesse_from_round_trip(std::sqrt(c1.R * c2.R));
}

double reflectivity_from_finesse(double finesse) {
  constexpr double kMinMu = 0.171572875253809903;  // 3 - 2 sqrt 2
  double lo = kMinMu + 1e-12;
  double hi = 1.0 - 1e-12;
  if (!(finesse >= finesse_from_round_trip(lo) && finesse <= finesse_from_round_trip(hi))) {
    throw DomainError("finesse outside the invertible range");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (finesse_from_round_trip(mid) < finesse ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SpectrumSeries fringe_scan(const SlabCoefficients& c1, const SlabCoefficients& c2, const EtalonGeometry& geometry,
                           double wavelength_m, std::span<const double> displacements_m) {
  if (displacements_m.empty()) throw DomainError("displacement grid is empty");
  const double mu_abs = std::sqrt(c1.R * c2.R);
  require_convergent(mu_abs);
  const double peak = std::norm(c1.t * c2.t) / ((1.0 - mu_abs) * (1.0 - mu_abs));

  SpectrumSeries out{"displacement_m", "transmission_norm", {}, {}};
  out.x.assign(displacements_m.begin(), displacements_m.end());
  out.y.resize(displacements_m.size());
  for (std::size_t i = 0; i < displacements_m.size(); ++i) {
    const auto g = geometry.with_mismatch(geometry.deltaL + displacements_m[i]);
    out.y[i] = steady_transmission(c1, c2, g, wavelength_m) / peak;
  }
  return out;
}

}  // namespace mimcav
