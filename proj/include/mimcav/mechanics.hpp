#pragma once

// Membrane normal modes, susceptibilities and displacement spectra.

#include <span>
#include <vector>

#include "mimcav/constants.hpp"

namespace mimcav {

struct MembranePlate {
  double side_x_m = 1e-3;
  double side_y_m = 1e-3;
  double stress_pa = 1e9;
  double density_kg_m3 = 3100.0;
};

/// as_written: nu = sqrt(sigma/rho ((n/Lx)^2 + (m/Ly)^2));
/// half_factor: the standard string/membrane result, half of that.
enum class FrequencyConvention { as_written, half_factor };

/// Normal-mode frequency in Hz; n, m >= 1.
double mode_frequency(const MembranePlate& plate, int n, int m,
                      FrequencyConvention convention = FrequencyConvention::half_factor);

/// Effective mass assumed for a square-membrane mode: rho Lx Ly L_m / 4.
double default_effective_mass(const MembranePlate& plate, double thickness_m);

struct MechMode {
  double omega = 0.0;  // rad/s
  double gamma = 0.0;  // rad/s
  double mass = 1.0;   // kg
  double overlap = 1.0;
  double force = 1.0;  // drive amplitude, N (or N/sqrt(Hz))

  double quality() const { return omega / gamma; }
  static MechMode from_frequency(double freq_hz, double quality, double mass, double overlap = 1.0,
                                 double force = 1.0);
};

/// chi(omega) = (1/m) / (omega_m^2 - omega^2 + i gamma omega)
cplx susceptibility(const MechMode& mode, double omega);

enum class ForceCorrelation { uncorrelated, common_drive };

struct DisplacementSpectra {
  double s11 = 0.0;
  double s22 = 0.0;
  cplx s12{};
};

DisplacementSpectra displacement_spectra(const MechMode& mode1, const MechMode& mode2, double omega,
                                         ForceCorrelation correlation);

/// omega(V) = omega0 (1 + beta V); phenomenological stress shift from the
/// length piezo.
double piezo_shifted_omega(double omega0, double beta, double control);

struct ModeObservation {
  int n = 1;
  int m = 1;
  double freq_hz = 0.0;
};

struct SideLengthFit {
  double side_x_m = 0.0;
  double side_y_m = 0.0;
  double sigma_x_m = 0.0;
  double sigma_y_m = 0.0;
  std::vector<double> relative_shift;  // (measured - model) / model per observation
  bool converged = false;
};

/// Least-squares inversion of mode_frequency for (Lx, Ly).
SideLengthFit infer_side_lengths(std::span<const ModeObservation> modes, double stress_pa, double density_kg_m3,
                                 FrequencyConvention convention = FrequencyConvention::half_factor);

}  // namespace mimcav
