#include "mimcav/mechanics.hpp"

#include <cmath>

#include "mimcav/errors.hpp"
#include "mimcav/least_squares.hpp"

namespace mimcav {

namespace {

void check_plate(const MembranePlate& p) {
  if (!(p.side_x_m > 0.0 && p.side_y_m > 0.0 && p.stress_pa > 0.0 && p.density_kg_m3 > 0.0)) {
    throw DomainError("membrane plate parameters must all be positive");
  }
}

double convention_factor(FrequencyConvention c) { return c == FrequencyConvention::half_factor ? 0.5 : 1.0; }

}  // namespace

double mode_frequency(const MembranePlate& plate, int n, int m, FrequencyConvention convention) {
  check_plate(plate);
  if (n < 1 || m < 1) throw DomainError("mode indices must be >= 1");
  const double a = n / plate.side_x_m;
  const double b = m / plate.side_y_m;
  return convention_factor(convention) * std::sqrt(plate.stress_pa / plate.density_kg_m3 * (a * a + b * b));
}

double default_effective_mass(const MembranePlate& plate, double thickness_m) {
  check_plate(plate);
  if (!(thickness_m > 0.0)) throw DomainError("membrane thickness must be positive");
  return 0.25 * plate.density_kg_m3 * plate.side_x_m * plate.side_y_m * thickness_m;
}

MechMode MechMode::from_frequency(double freq_hz, double quality, double mass, double overlap, double force) {
  if (!(freq_hz > 0.0 && quality > 0.0 && mass > 0.0)) {
    throw DomainError("mode frequency, quality factor and mass must be positive");
  }
  MechMode mode;
  mode.omega = kTwoPi * freq_hz;
  mode.gamma = mode.omega / quality;
  mode.mass = mass;
  mode.overlap = overlap;
  mode.force = force;
  return mode;
}

cplx susceptibility(const MechMode& mode, double omega) {
  return (1.0 / mode.mass) / cplx{mode.omega * mode.omega - omega * omega, mode.gamma * omega};
}

DisplacementSpectra displacement_spectra(const MechMode& mode1, const MechMode& mode2, double omega,
                                         ForceCorrelation correlation) {
  const cplx chi1 = susceptibility(mode1, omega);
  const cplx chi2 = susceptibility(mode2, omega);
  DisplacementSpectra out;
  out.s11 = std::norm(chi1) * mode1.force * mode1.force;
  out.s22 = std::norm(chi2) * mode2.force * mode2.force;
  if (correlation == ForceCorrelation::common_drive) out.s12 = std::conj(chi1) * chi2 * mode1.force * mode2.force;
  return out;
}

double piezo_shifted_omega(double omega0, double beta, double control) { return omega0 * (1.0 + beta * control); }

SideLengthFit infer_side_lengths(std::span<const ModeObservation> modes, double stress_pa, double density_kg_m3,
                                 FrequencyConvention convention) {
  if (!(stress_pa > 0.0 && density_kg_m3 > 0.0)) throw DomainError("stress and density must be positive");
  for (const auto& o : modes) {
    if (o.n < 1 || o.m < 1 || !(o.freq_hz > 0.0)) throw DomainError("invalid mode observation");
  }
  // nu^2 / (f^2 sigma/rho) = n^2 u + m^2 v with u = 1/Lx^2, v = 1/Ly^2: linear.
  const double f = convention_factor(convention);
  const double scale = f * f * stress_pa / density_kg_m3;
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (const auto& o : modes) {
    const double p = o.n * o.n;
    const double q = o.m * o.m;
    const double y = o.freq_hz * o.freq_hz / scale;
    a11 += p * p;
    a12 += p * q;
    a22 += q * q;
    b1 += p * y;
    b2 += q * y;
  }
  const double det = a11 * a22 - a12 * a12;
  if (modes.size() < 2 || !(det > 1e-9 * a11 * a22)) {
    throw DomainError("mode set cannot separate Lx from Ly (need two non-degenerate modes)");
  }
  const double u = (a22 * b1 - a12 * b2) / det;
  const double v = (a11 * b2 - a12 * b1) / det;
  if (!(u > 0.0 && v > 0.0)) throw DomainError("mode frequencies are inconsistent with a rectangular membrane");

  // Refine on relative frequency residuals, parametrised in millimetres.
  LeastSquaresProblem problem;
  problem.num_residuals = modes.size();
  problem.residuals = [&](std::span<const double> x, std::span<double> out) {
    const MembranePlate plate{x[0] * 1e-3, x[1] * 1e-3, stress_pa, density_kg_m3};
    for (std::size_t i = 0; i < modes.size(); ++i) {
      out[i] = mode_frequency(plate, modes[i].n, modes[i].m, convention) / modes[i].freq_hz - 1.0;
    }
  };
  const auto lm = levenberg_marquardt(problem, {1e3 / std::sqrt(u), 1e3 / std::sqrt(v)});

  SideLengthFit out;
  out.side_x_m = lm.params[0] * 1e-3;
  out.side_y_m = lm.params[1] * 1e-3;
  out.sigma_x_m = lm.sigma[0] * 1e-3;
  out.sigma_y_m = lm.sigma[1] * 1e-3;
  out.converged = lm.converged;
  const MembranePlate plate{out.side_x_m, out.side_y_m, stress_pa, density_kg_m3};
  for (const auto& o : modes) {
    const double model = mode_frequency(plate, o.n, o.m, convention);
    out.relative_shift.push_back((o.freq_hz - model) / model);
  }
  return out;
}

}  // namespace mimcav
