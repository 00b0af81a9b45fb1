#pragma once

// Balanced homodyne readout of the reflected field and the voltage noise
// spectrum around the mechanical resonances.

#include <span>

#include "mimcav/constants.hpp"
#include "mimcav/mechanics.hpp"
#include "mimcav/series.hpp"
#include "mimcav/spectral_response.hpp"

namespace mimcav {

struct DetectionChain {
  double input_power_w = 1e-3;
  double lo_power_w = 1e-3;
  double lo_phase_rad = kPi / 2.0;
  double gain_v_per_a = 1e5;
  double responsivity_a_per_w = 0.3;
  double bandwidth_rad_s = 0.0;  // recorded only; no filtering is applied
  double noise_floor_v2_per_hz = 0.0;
};

struct HomodyneSample {
  double current_a = 0.0;
  double voltage_v = 0.0;
};

/// I = 2 sqrt(P_lo P_in) Re{f* e^{-i phi_l} E_r / sqrt(P_in)}, V = g_T S I.
HomodyneSample photocurrent(cplx reflected_field, const DetectionChain& chain, cplx envelope = 1.0);

/// Quadrature weight Re{R1_j e^{-i phi_l}}; equals Im R1_j at phi_l = pi/2.
double quadrature_weight(cplx r1, double lo_phase_rad);

/// Single-sided S_W(f) on a frequency grid (Hz):
///   level (4 g S omega_L/c sqrt(2 P_lo P_in))^2
///     { (eta1 w1)^2 S11 + (eta2 w2)^2 S22 - eta1 eta2 w1 w2 Re S12 } + floor
/// with w_j = quadrature_weight(R1_j(0), phi_l).
SpectrumSeries voltage_noise_spectrum(const DetectionChain& chain, const BadCavityReflection& response,
                                      double wavelength_m, const MechMode& mode1, const MechMode& mode2,
                                      ForceCorrelation correlation, std::span<const double> freq_hz,
                                      double level = 1.0);

/// Everything needed to build a length-by-frequency map.
struct SweepSpec {
  SlabCoefficients c1;
  SlabCoefficients c2;
  double resonant_length_m = 0.0;  // L0
  double wavelength_m = 532e-9;
  DetectionChain chain;
  MechMode mode1;
  MechMode mode2;
  ForceCorrelation correlation = ForceCorrelation::common_drive;
  std::vector<double> dl_grid;    // delta L in units of lambda/2
  std::vector<double> freq_grid;  // Hz
  double overlap_ratio = 0.0;     // eta1/eta2 when > 0 (eta2 kept), else the modes' own overlaps
  double piezo_beta = 0.0;        // fractional frequency shift per unit delta L/(lambda/2)
  int piezo_membrane = 2;         // membrane glued to the length piezo
  double level = 1.0;
};

/// One map row: the spectrum at cavity mismatch dl_grid[row].
std::vector<double> sweep_row(const SweepSpec& spec, std::size_t row);

/// Rows computed in parallel (OpenMP), merged by index.
SweepMap sweep_map(const SweepSpec& spec, int workers = 0);
/// Single-threaded reference implementation.
SweepMap sweep_map_serial(const SweepSpec& spec);

}  // namespace mimcav
