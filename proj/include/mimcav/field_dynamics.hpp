#pragma once

// Time-domain fields of the two-membrane etalon with moving membranes.
// This is the brute-force model every frequency-domain result is checked
// against: the intracavity delay recursion is evolved sample by sample.

#include <cstddef>
#include <functional>
#include <vector>

#include "mimcav/constants.hpp"
#include "mimcav/etalon_steady.hpp"
#include "mimcav/slab_optics.hpp"

namespace mimcav {

/// Input field E1(t) = sqrt(P_in) f(t), zero before t = 0.
struct DriveField {
  double power_w = 1.0;
  double wavelength_m = 532e-9;
  std::function<cplx(double)> envelope;  // empty means f(t) = 1

  cplx amplitude(double t) const;
  double omega() const { return kTwoPi * kSpeedOfLight / wavelength_m; }
  double wavenumber() const { return kTwoPi / wavelength_m; }
};

/// Displacement of one membrane from its rest position.
struct MembraneTrajectory {
  std::function<double(double)> displacement;  // empty means at rest
  double amplitude_m = 0.0;  // peak |dx| when known, used for validity flags
  double omega = 0.0;        // rad/s, 0 for non-sinusoidal motion

  static MembraneTrajectory at_rest() { return {}; }
  /// dx(t) = amplitude sin(omega t)
  static MembraneTrajectory sinusoid(double amplitude_m, double omega);
  double operator()(double t) const { return displacement ? displacement(t) : 0.0; }
};

/// Uniformly sampled fields in sqrt(W). Samples before steady_start belong
/// to the ring-up transient.
struct FieldRecord {
  double dt = 0.0;
  std::vector<double> t;
  std::vector<cplx> cavity;
  std::vector<cplx> transmitted;
  std::vector<cplx> reflected;
  std::size_t steady_start = 0;
  bool ring_up_incomplete = false;  // record ends before the transient has decayed
  bool retardation_flag = false;    // omega_m tau > 0.01
  bool displacement_flag = false;   // |dx| > 1e-3 (L0 + deltaL)

  std::size_t size() const { return t.size(); }
};

inline constexpr int kDefaultSubdivisions = 64;

/// Round trips after which the empty-cavity transient is below 1e-10 of
/// the field: |mu|^n <= 1e-10. Holds for any membrane motion since the
/// modulation is unimodular.
std::size_t ring_up_round_trips(double mu_abs);

FieldRecord simulate(const SlabCoefficients& c1, const SlabCoefficients& c2, const EtalonGeometry& geometry,
                     const DriveField& drive, const MembraneTrajectory& traj1, const MembraneTrajectory& traj2,
                     double duration_s, int subdivisions = kDefaultSubdivisions);

/// Truncated round-trip sum for the intracavity field at time t (orders 0..N).
cplx neumann_field(const SlabCoefficients& c1, const SlabCoefficients& c2, const EtalonGeometry& geometry,
                   const DriveField& drive, const MembraneTrajectory& traj1, const MembraneTrajectory& traj2,
                   double t, int order);

/// |mu|^{N+1} / (1 - |mu|)
double neumann_residual_bound(double mu_abs, int order);

enum class FieldChannel { cavity, transmitted, reflected };

enum class Window { rectangular, hann };

/// Complex amplitudes of exp(+-i 2 pi k f t) components, k = 1..orders.
struct SidebandSet {
  double freq_hz = 0.0;
  cplx dc{};
  std::vector<cplx> upper;  // upper[k-1] multiplies exp(+i 2 pi k f t)
  std::vector<cplx> lower;  // lower[k-1] multiplies exp(-i 2 pi k f t)
};

/// Discrete Fourier projection over the largest whole number of periods of
/// freq_hz after `start` (defaults to the record's steady_start). Needs at
/// least 20 periods.
SidebandSet extract_sidebands(const FieldRecord& record, FieldChannel channel, double freq_hz, int orders,
                              Window window = Window::rectangular);
SidebandSet extract_sidebands(const FieldRecord& record, FieldChannel channel, double freq_hz, int orders,
                              std::size_t start, Window window);

const std::vector<cplx>& channel_samples(const FieldRecord& record, FieldChannel channel);

}  // namespace mimcav
