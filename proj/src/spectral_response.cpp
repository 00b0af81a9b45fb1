#include "mimcav/spectral_response.hpp"

#include <algorithm>
#include <cmath>

#include "mimcav/bessel.hpp"
#include "mimcav/errors.hpp"

namespace mimcav {

namespace {

void check_membrane(int membrane) {
  if (membrane != 1 && membrane != 2) throw DomainError("membrane index must be 1 or 2");
}

void check_sign(int sign) {
  if (sign != 1 && sign != -1) throw DomainError("sideband sign must be +1 or -1");
}

cplx nonzero(cplx d) {
  if (std::abs(d) < 1e-300) throw SingularityError("response denominator D(s) vanished");
  return d;
}

cplx mu_of(const ResponseParams& p) { return round_trip_factor(p.c1, p.c2, p.geometry, p.wavelength_m); }

// Coefficients with an explicit mechanical shift so the bad-cavity limit can
// take s_m -> 0 independently of the stored mode frequencies.
cplx c1_with_shift(const ResponseParams& p, cplx s, cplx shift) {
  const cplx d = nonzero(d_of_s(p, s));
  const cplx d_shift = nonzero(d_of_s(p, s + shift));
  return 0.5 * p.c1.t * (1.0 - d) / d * std::exp(-shift * p.geometry.tau) / d_shift;
}

cplx r1_with_shift(const ResponseParams& p, int membrane, cplx s, cplx shift) {
  const cplx d = nonzero(d_of_s(p, s));
  const cplx d_shift = nonzero(d_of_s(p, s + shift));
  const cplx r2b = r2bar_conj(p.c2, p.geometry, p.wavelength_m);
  const cplx memory = 0.5 * r2b * std::norm(p.c1.t) * std::exp(-(s + shift) * p.geometry.tau) / d_shift;
  if (membrane == 1) return 0.5 * std::conj(p.c1.r) + memory * (1.0 - d) / d;
  return memory / d;
}

}  // namespace

double ResponseParams::mode_omega(int membrane) const {
  check_membrane(membrane);
  return membrane == 1 ? omega_m1 : omega_m2;
}

double ResponseParams::xi(int membrane) const {
  check_membrane(membrane);
  return membrane == 1 ? xi1 : xi2;
}

double modulation_index(double displacement_m, double wavelength_m) {
  if (!(wavelength_m > 0.0)) throw DomainError("wavelength must be positive");
  return 2.0 * (kTwoPi / wavelength_m) * displacement_m;
}

cplx d_of_s(const ResponseParams& p, cplx s) {
  if (p.xi1 < 0.0 || p.xi2 < 0.0) throw DomainError("modulation indices must be non-negative");
  return 1.0 - mu_of(p) * std::exp(-s * p.geometry.tau) * bessel_j0(p.xi1) * bessel_j0(p.xi2);
}

cplx cavity_response_c0(const ResponseParams& p, cplx s) { return p.c1.t / nonzero(d_of_s(p, s)); }

cplx cavity_response_c1(const ResponseParams& p, int membrane, cplx s, int sign) {
  check_membrane(membrane);
  check_sign(sign);
  return c1_with_shift(p, s, cplx{0.0, sign * p.mode_omega(membrane)});
}

cplx reflection_response_r0(const ResponseParams& p, cplx s) {
  const cplx d = nonzero(d_of_s(p, s));
  const cplx r2b = r2bar_conj(p.c2, p.geometry, p.wavelength_m);
  return -std::conj(p.c1.r) + r2b * std::norm(p.c1.t) * std::exp(-s * p.geometry.tau) / d;
}

cplx reflection_response_r1(const ResponseParams& p, int membrane, cplx s, int sign) {
  check_membrane(membrane);
  check_sign(sign);
  return r1_with_shift(p, membrane, s, cplx{0.0, sign * p.mode_omega(membrane)});
}

cplx transmission_response_t0(const ResponseParams& p, cplx s) {
  return p.c1.t * p.c2.t / nonzero(d_of_s(p, s));
}

BadCavityReflection bad_cavity_reflection(const ResponseParams& p) {
  BadCavityReflection out;
  out.r0 = reflection_response_r0(p, 0.0);
  out.r1_1 = r1_with_shift(p, 1, 0.0, 0.0);
  out.r1_2 = r1_with_shift(p, 2, 0.0, 0.0);
  const double bandwidth = kTwoPi * p.geometry.fsr * (1.0 - std::abs(mu_of(p)));
  out.regime_warning = std::max(std::abs(p.omega_m1), std::abs(p.omega_m2)) > 0.01 * bandwidth;
  return out;
}

SidebandPrediction predict_first_order_sidebands(const ResponseParams& p, int membrane, ResponseChannel channel) {
  check_membrane(membrane);
  const double w = p.mode_omega(membrane);
  const double sign_j = membrane == 1 ? -1.0 : 1.0;
  const double xi = p.xi(membrane);
  const cplx up{0.0, w};

  auto coeff = [&](cplx s, int sign) {
    return channel == ResponseChannel::cavity ? cavity_response_c1(p, membrane, s, sign)
                                              : reflection_response_r1(p, membrane, s, sign);
  };
  // exp(+i w t): output s = +s_m fed from the carrier through the (s, -s_m) term.
  SidebandPrediction out;
  out.upper = -xi * sign_j * coeff(up, -1);
  out.lower = xi * sign_j * coeff(-up, +1);
  return out;
}

HighFinesseParams HighFinesseParams::from_coefficients(const SlabCoefficients& c1, const SlabCoefficients& c2,
                                                       const EtalonGeometry& geometry, double laser_detuning) {
  HighFinesseParams hf;
  hf.kappa1 = 0.5 * std::norm(c1.t) * geometry.fsr;
  hf.kappa2 = 0.5 * std::norm(c2.t) * geometry.fsr;
  hf.kappa = hf.kappa1 + hf.kappa2;
  hf.detuning = laser_detuning;
  return hf;
}

cplx high_finesse_d(const HighFinesseParams& hf, const EtalonGeometry& geometry, double wavelength_m, double omega) {
  if (!(wavelength_m > 0.0)) throw DomainError("wavelength must be positive");
  const double omega_l = kTwoPi * kSpeedOfLight / wavelength_m;
  const double length_detuning = 2.0 * omega_l * geometry.deltaL / kSpeedOfLight * geometry.fsr;
  return cplx{hf.kappa, hf.detuning + length_detuning + omega} / geometry.fsr;
}

cplx normalized_amplitude(cplx field, const EtalonGeometry& geometry) { return field / std::sqrt(geometry.fsr); }

}  // namespace mimcav
