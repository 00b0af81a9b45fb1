#include "mimcav/field_dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "mimcav/errors.hpp"

namespace mimcav {

cplx DriveField::amplitude(double t) const {
  if (t < 0.0) return {};
  const double a = std::sqrt(power_w);
  return envelope ? a * envelope(t) : cplx{a, 0.0};
}

MembraneTrajectory MembraneTrajectory::sinusoid(double amplitude_m, double omega) {
  MembraneTrajectory m;
  m.amplitude_m = std::abs(amplitude_m);
  m.omega = omega;
  m.displacement = [amplitude_m, omega](double t) { return amplitude_m * std::sin(omega * t); };
  return m;
}

std::size_t ring_up_round_trips(double mu_abs) {
  if (mu_abs <= 0.0) return 1;
  if (!(mu_abs < 1.0)) throw DivergenceError("round-trip factor |mu| >= 1: cavity sum diverges");
  return static_cast<std::size_t>(std::ceil(std::log(1e-10) / std::log(mu_abs)));
}

FieldRecord simulate(const SlabCoefficients& c1, const SlabCoefficients& c2, const EtalonGeometry& geometry,
                     const DriveField& drive, const MembraneTrajectory& traj1, const MembraneTrajectory& traj2,
                     double duration_s, int subdivisions) {
  if (subdivisions < 1) throw DomainError("subdivisions must be >= 1");
  if (!(duration_s > 0.0)) throw DomainError("duration must be positive");
  if (!(drive.power_w >= 0.0)) throw DomainError("drive power must be non-negative");

  const cplx mu = round_trip_factor(c1, c2, geometry, drive.wavelength_m);
  const double mu_abs = std::abs(mu);
  if (!(mu_abs < 1.0)) throw DivergenceError("round-trip factor |mu| >= 1: cavity sum diverges");

  const cplx r2b = r2bar_conj(c2, geometry, drive.wavelength_m);
  const cplx refl_direct = -std::conj(c1.r);
  const cplx refl_memory = std::conj(c1.t) * r2b;
  const double two_k = 2.0 * drive.wavenumber();

  const auto delay = static_cast<std::size_t>(subdivisions);
  const double dt = geometry.tau / subdivisions;
  const auto n = static_cast<std::size_t>(std::floor(duration_s / dt)) + 1;

  FieldRecord rec;
  rec.dt = dt;
  rec.t.resize(n);
  rec.cavity.resize(n);
  rec.transmitted.resize(n);
  rec.reflected.resize(n);

  const bool odd = (delay % 2) != 0;
  const std::size_t half_hi = delay / 2 + (odd ? 1 : 0);  // samples for the later neighbour of t - tau/2
  const std::size_t half_lo = delay / 2;
  double max_dx = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const cplx e1 = drive.amplitude(t);
    const double dx1 = traj1(t);
    const double dx2 = traj2(t);
    max_dx = std::max({max_dx, std::abs(dx1), std::abs(dx2)});

    const cplx delayed = i >= delay ? rec.cavity[i - delay] : cplx{};
    const double phi = two_k * (dx2 - dx1);
    rec.t[i] = t;
    rec.cavity[i] = c1.t * e1 + mu * delayed * std::polar(1.0, -phi);
    rec.reflected[i] =
        refl_direct * e1 * std::polar(1.0, -two_k * dx1) + refl_memory * delayed * std::polar(1.0, -two_k * dx2);

    cplx half;
    if (!odd) {
      half = i >= half_lo ? rec.cavity[i - half_lo] : cplx{};
    } else {
      const cplx a = i >= half_hi ? rec.cavity[i - half_hi] : cplx{};
      const cplx b = i >= half_lo ? rec.cavity[i - half_lo] : cplx{};
      half = 0.5 * (a + b);
    }
    rec.transmitted[i] = c2.t * half;
  }

  rec.steady_start = std::min(n, ring_up_round_trips(mu_abs) * delay);
  const double min_duration = 50.0 * geometry.tau / (1.0 - mu_abs);
  rec.ring_up_incomplete = rec.steady_start >= n || duration_s < min_duration;
  rec.retardation_flag = std::max(traj1.omega, traj2.omega) * geometry.tau > 0.01;
  rec.displacement_flag = max_dx > 1e-3 * geometry.length();
  return rec;
}

cplx neumann_field(const SlabCoefficients& c1, const SlabCoefficients& c2, const EtalonGeometry& geometry,
                   const DriveField& drive, const MembraneTrajectory& traj1, const MembraneTrajectory& traj2,
                   double t, int order) {
  if (order < 0) throw DomainError("truncation order must be non-negative");
  const cplx mu = round_trip_factor(c1, c2, geometry, drive.wavelength_m);
  const double two_k = 2.0 * drive.wavenumber();
  const double slack = 1e-9 * geometry.tau;

  cplx sum{};
  cplx weight{1.0, 0.0};  // mu^n times the accumulated modulation phases
  for (int n = 0; n <= order; ++n) {
    const double tn = t - n * geometry.tau;
    if (tn < -slack) break;
    sum += weight * drive.amplitude(std::max(tn, 0.0));
    weight *= mu * std::polar(1.0, -two_k * (traj2(tn) - traj1(tn)));
  }
  return c1.t * sum;
}

double neumann_residual_bound(double mu_abs, int order) {
  if (!(mu_abs < 1.0)) throw DivergenceError("round-trip factor |mu| >= 1: cavity sum diverges");
  return std::pow(mu_abs, order + 1) / (1.0 - mu_abs);
}

const std::vector<cplx>& channel_samples(const FieldRecord& record, FieldChannel channel) {
  switch (channel) {
    case FieldChannel::cavity:
      return record.cavity;
    case FieldChannel::transmitted:
      return record.transmitted;
    case FieldChannel::reflected:
      break;
  }
  return record.reflected;
}

SidebandSet extract_sidebands(const FieldRecord& record, FieldChannel channel, double freq_hz, int orders,
                              Window window) {
  return extract_sidebands(record, channel, freq_hz, orders, record.steady_start, window);
}

SidebandSet extract_sidebands(const FieldRecord& record, FieldChannel channel, double freq_hz, int orders,
                              std::size_t start, Window window) {
  if (!(freq_hz > 0.0)) throw DomainError("sideband frequency must be positive");
  if (orders < 0) throw DomainError("sideband order count must be non-negative");
  const auto& x = channel_samples(record, channel);
  if (start >= x.size()) throw DomainError("record too short: no samples after the ring-up");

  const double period_samples = 1.0 / (freq_hz * record.dt);
  const double available = static_cast<double>(x.size() - start);
  const double periods = std::floor(available / period_samples);
  if (periods < 20.0) throw DomainError("record too short: fewer than 20 periods after the ring-up");
  const auto count = std::min(x.size() - start, static_cast<std::size_t>(std::llround(periods * period_samples)));

  std::vector<double> w(count, 1.0);
  if (window == Window::hann) {
    for (std::size_t i = 0; i < count; ++i) w[i] = 0.5 * (1.0 - std::cos(kTwoPi * i / count));
  }
  double wsum = 0.0;
  for (double v : w) wsum += v;

  auto project = [&](int harmonic) {
    cplx acc{};
    for (std::size_t i = 0; i < count; ++i) {
      const double cycles = harmonic * freq_hz * record.t[start + i];
      acc += w[i] * x[start + i] * std::polar(1.0, -kTwoPi * (cycles - std::floor(cycles)));
    }
    return acc / wsum;
  };

  SidebandSet out;
  out.freq_hz = freq_hz;
  out.dc = project(0);
  for (int k = 1; k <= orders; ++k) {
    out.upper.push_back(project(k));
    out.lower.push_back(project(-k));
  }
  return out;
}

}  // namespace mimcav
