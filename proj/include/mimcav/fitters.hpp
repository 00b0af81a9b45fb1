#pragma once

// Characterisation fits: cavity length from a white-light spectrum,
// finesse from a length scan, slab thickness from reflectivities, and
// Q factors from mechanical peaks.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimcav/slab_optics.hpp"

namespace mimcav {

struct FitParameter {
  std::string name;
  std::string unit;
  double value = 0.0;
  double sigma = 0.0;
};

struct FitResult {
  std::vector<FitParameter> parameters;
  double residual_norm = 0.0;  // sqrt of the residual sum of squares, data units
  bool converged = false;      // false: estimates are unreliable
  int iterations = 0;
  std::vector<std::string> warnings;

  const FitParameter& get(std::string_view name) const;
  double value(std::string_view name) const { return get(name).value; }
  double sigma(std::string_view name) const { return get(name).sigma; }
};

// ---- white-light Airy spectrum ----------------------------------------

struct AiryWavelengthOptions {
  double initial_length_m = 0.0;  // <= 0: seed from the fringe spacing
  double search_fraction = 0.1;   // scanned +- range around the seed
  double thickness_m = 75.2e-9;   // identical membranes
  IndexModel index = IndexModel::si3n4_calibrated();
};

/// amplitude * |t|^4 / |1 - mu|^2 with slab dispersion folded in.
std::vector<double> airy_wavelength_curve(std::span<const double> wavelengths_m, double length_m,
                                          double thickness_m, const IndexModel& index, double amplitude = 1.0);

/// Parameters: length_m, amplitude.
FitResult fit_airy_wavelength(std::span<const double> wavelengths_m, std::span<const double> transmission,
                              const AiryWavelengthOptions& options = {});

// ---- piezo time scan ----------------------------------------------------

struct TimescanOptions {
  double wavelength_m = 532e-9;
  double displacement_per_volt_guess = 0.0;  // m/V; 0: from fringe spacing only
};

/// theta(V) = phase0 + 4 pi/lambda (a V + b V^2);
/// T = amplitude (1 - rho)^2 / (1 + rho^2 - 2 rho cos theta).
std::vector<double> airy_timescan_curve(std::span<const double> voltage, double rho, double phase0,
                                        double disp_per_volt, double disp_per_volt2, double wavelength_m,
                                        double amplitude = 1.0);

/// Transmission maxima separated by dips (hysteresis at 30/70% of the range).
/// Empty when the trace has under 5% contrast.
std::vector<std::size_t> find_fringe_peaks(std::span<const double> y);

/// Parameters: finesse, reflectivity, amplitude, phase0_rad, disp_per_volt_m,
/// disp_per_volt2_m. Throws DomainError on fewer than two fringe peaks.
FitResult fit_airy_timescan(std::span<const double> voltage, std::span<const double> transmission,
                            const TimescanOptions& options = {});

// ---- slab thickness -----------------------------------------------------

struct ReflectivityPoint {
  double wavelength_m = 0.0;
  double reflectivity = 0.0;
  double sigma = 1.0;
};

struct ThicknessFit {
  FitResult fit;                       // parameter thickness_m
  std::vector<double> local_minima_m;  // refined minima of the objective, ascending
};

/// One-parameter fit of |r|^2 over [0, max lambda/(2n)]. The estimate is the
/// minimum nearest initial_guess_m, or the global minimum when no guess.
ThicknessFit fit_thickness(std::span<const ReflectivityPoint> points, const IndexModel& index,
                           double initial_guess_m = 0.0);

// ---- Lorentzian peaks ---------------------------------------------------

struct LorentzPeak {
  double center_hz = 0.0;
  double fwhm_hz = 0.0;
  double height = 0.0;
};

std::vector<double> lorentzian_curve(std::span<const double> freq_hz, std::span<const LorentzPeak> peaks,
                                     double floor);

/// Indices of local maxima above factor * median, tallest first.
std::vector<std::size_t> find_peaks_above_median(std::span<const double> y, double factor = 3.0);

/// Multi-Lorentzian plus constant floor. Parameters per peak k (1-based):
/// center_hz_k, fwhm_hz_k, height_k, q_k, gamma_rad_s_k; plus floor.
/// A segment without the requested peaks above 3x median returns an
/// unconverged result with a warning.
FitResult fit_lorentzian(std::span<const double> freq_hz, std::span<const double> psd, int peak_count);

}  // namespace mimcav
