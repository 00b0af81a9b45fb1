#pragma once

// Frequency-domain transfer functions of the moving-membrane etalon,
// expanded to first order in the modulation indices xi_j = 2 k dx_j.
//
// Conventions (s = i omega, rad/s):
//   D(s)      = 1 - mu e^{-s tau} J0(xi1) J0(xi2)
//   C0(s)     = t1 / D(s)
//   C1_j(s,±) = (t1/2) [1 - D(s)]/D(s) e^{∓ s_mj tau} / D(s ± s_mj)
//   R0(s)     = -r1* + r2bar* |t1|^2 e^{-s tau} / D(s)
//   R1_1(s,±) = r1*/2 + (r2bar*/2) |t1|^2 [1 - D(s)]/D(s) e^{-(s ± s_m1) tau} / D(s ± s_m1)
//   R1_2(s,±) = (r2bar*/2) |t1|^2 e^{-(s ± s_m2) tau} / (D(s) D(s ± s_m2))
//
// The first-order field is  xi_j (-1)^j [X_j(s,+) Ein(s + s_mj) - X_j(s,-) Ein(s - s_mj)]
// for X = C1 (cavity) or R1 (reflection). R1_2 carries the direct phase
// imprint of membrane 2 on the light it reflects, so it reduces to r2bar*/2
// for a lone second membrane.

#include "mimcav/constants.hpp"
#include "mimcav/etalon_steady.hpp"
#include "mimcav/slab_optics.hpp"

namespace mimcav {

struct ResponseParams {
  SlabCoefficients c1;
  SlabCoefficients c2;
  EtalonGeometry geometry;
  double wavelength_m = 532e-9;
  double xi1 = 0.0;
  double xi2 = 0.0;
  double omega_m1 = 0.0;  // rad/s
  double omega_m2 = 0.0;  // rad/s

  /// True when a modulation index exceeds 0.1 (first order unreliable).
  bool perturbative_warning() const { return xi1 > 0.1 || xi2 > 0.1; }
  double mode_omega(int membrane) const;
  double xi(int membrane) const;
};

/// xi = 2 omega_L dx / c
double modulation_index(double displacement_m, double wavelength_m);

cplx d_of_s(const ResponseParams& p, cplx s);

cplx cavity_response_c0(const ResponseParams& p, cplx s);
/// sign = +1 for the (s, +s_mj) coefficient, -1 for (s, -s_mj).
cplx cavity_response_c1(const ResponseParams& p, int membrane, cplx s, int sign);

cplx reflection_response_r0(const ResponseParams& p, cplx s);
cplx reflection_response_r1(const ResponseParams& p, int membrane, cplx s, int sign);

/// Transmission amplitude t1 t2 / D(s) (the e^{-s tau/2} transit phase omitted).
cplx transmission_response_t0(const ResponseParams& p, cplx s);

/// Responses with s and s_m much smaller than the cavity bandwidth.
struct BadCavityReflection {
  cplx r0{};
  cplx r1_1{};
  cplx r1_2{};
  bool regime_warning = false;  // a mode frequency is not << 2 pi FSR (1 - |mu|)
};

BadCavityReflection bad_cavity_reflection(const ResponseParams& p);

/// First-order sidebands of a constant drive: amplitudes of
/// exp(+i omega_mj t) and exp(-i omega_mj t) per unit input amplitude,
/// including the xi_j factor.
struct SidebandPrediction {
  cplx upper{};
  cplx lower{};
};

enum class ResponseChannel { cavity, reflected };

SidebandPrediction predict_first_order_sidebands(const ResponseParams& p, int membrane, ResponseChannel channel);

/// Lorentzian (high-finesse) cavity: half linewidths in 1/s with
/// 2 kappa_j = |t_j|^2 FSR, detuning in rad/s.
struct HighFinesseParams {
  double kappa = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double detuning = 0.0;  // laser detuning from the L0 resonance, rad/s

  static HighFinesseParams from_coefficients(const SlabCoefficients& c1, const SlabCoefficients& c2,
                                             const EtalonGeometry& geometry, double laser_detuning = 0.0);
};

/// D ~ [kappa + i(Delta + 2 omega_L deltaL/c * FSR) + i omega] / FSR
cplx high_finesse_d(const HighFinesseParams& hf, const EtalonGeometry& geometry, double wavelength_m, double omega);

/// a(s) = E(s) / sqrt(FSR)
cplx normalized_amplitude(cplx field, const EtalonGeometry& geometry);

}  // namespace mimcav
