#pragma once

// Lossless dielectric slab: complex amplitude reflection/transmission and
// the intensity quantities derived from them.

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mimcav/constants.hpp"
#include "mimcav/series.hpp"

namespace mimcav {

struct SlabParams {
  double index = 2.0;        // real refractive index, > 1
  double thickness_m = 0.0;  // >= 0
};

/// Amplitude coefficients of one membrane in the two-port convention
/// [[t, r], [-r*, t*]] used by the cavity model. R = |r|^2, phase = arg r.
struct SlabCoefficients {
  cplx r{0.0, 0.0};
  cplx t{1.0, 0.0};
  double R = 0.0;
  double phase = 0.0;

  /// Validates |r|^2 + |t|^2 = 1 (1e-12) and fills R and phase.
  static SlabCoefficients from_amplitudes(cplx r, cplx t);
  /// r = sqrt(R) e^{i phase}, t = sqrt(1 - R).
  static SlabCoefficients ideal(double reflectivity, double phase = 0.0);
  static SlabCoefficients transparent() { return {}; }
};

SlabCoefficients slab_coefficients(const SlabParams& slab, double wavelength_m);

/// Refractive index as a function of vacuum wavelength.
class IndexModel {
 public:
  static IndexModel constant(double n);
  /// Piecewise-linear in wavelength through (wavelength_m, n) points,
  /// clamped outside the table.
  static IndexModel table(std::string name, std::vector<std::pair<double, double>> points);
  /// Si3N4 two-term Sellmeier (Philipp 1973 fit).
  static IndexModel si3n4_sellmeier();
  /// Default table. The three entries are the indices at which a
  /// 75.2 nm slab reproduces R = 0.3618 / 0.3571 / 0.2652 at
  /// 532 / 632.8 / 980 nm. This is an assumed index model, not a
  /// measured dispersion curve.
  static IndexModel si3n4_calibrated();
  static IndexModel by_name(std::string_view name, double constant_index = 2.046);

  double operator()(double wavelength_m) const;
  const std::string& name() const { return name_; }

 private:
  enum class Kind { constant, table, sellmeier };
  Kind kind_ = Kind::constant;
  std::string name_;
  double constant_ = 2.0;
  std::vector<std::pair<double, double>> points_;
};

/// R(lambda) for a fixed-index slab. Grid must be non-empty and strictly increasing.
SpectrumSeries reflectivity_curve(const SlabParams& slab, std::span<const double> wavelengths_m);
/// R(lambda) with the index taken from a dispersion model at each point.
SpectrumSeries reflectivity_curve(double thickness_m, const IndexModel& model,
                                  std::span<const double> wavelengths_m);

}  // namespace mimcav
