#include "mimcav/homodyne.hpp"

#include <cmath>
#include <stdexcept>

#include "mimcav/errors.hpp"
#include "mimcav/parallel.hpp"

namespace mimcav {

HomodyneSample photocurrent(cplx reflected_field, const DetectionChain& chain, cplx envelope) {
  if (!(chain.input_power_w > 0.0)) throw DomainError("input power must be positive for homodyne readout");
  if (chain.lo_power_w < 0.0) throw DomainError("local-oscillator power must be non-negative");
  const double e = std::real(std::conj(envelope) * std::polar(1.0, -chain.lo_phase_rad) * reflected_field /
                             std::sqrt(chain.input_power_w));
  HomodyneSample out;
  out.current_a = 2.0 * std::sqrt(chain.lo_power_w * chain.input_power_w) * e;
  out.voltage_v = chain.gain_v_per_a * chain.responsivity_a_per_w * out.current_a;
  return out;
}

double quadrature_weight(cplx r1, double lo_phase_rad) { return std::real(r1 * std::polar(1.0, -lo_phase_rad)); }

SpectrumSeries voltage_noise_spectrum(const DetectionChain& chain, const BadCavityReflection& response,
                                      double wavelength_m, const MechMode& mode1, const MechMode& mode2,
                                      ForceCorrelation correlation, std::span<const double> freq_hz, double level) {
  if (freq_hz.empty()) throw DomainError("frequency grid is empty");
  if (!(wavelength_m > 0.0)) throw DomainError("wavelength must be positive");
  if (chain.input_power_w < 0.0 || chain.lo_power_w < 0.0 || chain.noise_floor_v2_per_hz < 0.0) {
    throw DomainError("powers and noise floor must be non-negative");
  }
  const double omega_l = kTwoPi * kSpeedOfLight / wavelength_m;
  const double gain = 4.0 * chain.gain_v_per_a * chain.responsivity_a_per_w * omega_l / kSpeedOfLight *
                      std::sqrt(2.0 * chain.lo_power_w * chain.input_power_w);
  const double prefactor = level * gain * gain;
  const double a1 = mode1.overlap * quadrature_weight(response.r1_1, chain.lo_phase_rad);
  const double a2 = mode2.overlap * quadrature_weight(response.r1_2, chain.lo_phase_rad);

  SpectrumSeries out{"freq_hz", "psd_v2_hz", {}, {}};
  out.x.assign(freq_hz.begin(), freq_hz.end());
  out.y.resize(freq_hz.size());
  for (std::size_t i = 0; i < freq_hz.size(); ++i) {
    const auto s = displacement_spectra(mode1, mode2, kTwoPi * freq_hz[i], correlation);
    const double t1 = a1 * a1 * s.s11;
    const double t2 = a2 * a2 * s.s22;
    const double t12 = a1 * a2 * std::real(s.s12);
    double bracket = t1 + t2 - t12;
    if (bracket < 0.0) {
      if (bracket < -1e-12 * (t1 + t2 + std::abs(t12))) {
        throw std::logic_error("negative PSD assembled from displacement spectra");
      }
      bracket = 0.0;
    }
    out.y[i] = prefactor * bracket + chain.noise_floor_v2_per_hz;
  }
  return out;
}

std::vector<double> sweep_row(const SweepSpec& spec, std::size_t row) {
  const double v = spec.dl_grid.at(row);
  ResponseParams p;
  p.c1 = spec.c1;
  p.c2 = spec.c2;
  p.wavelength_m = spec.wavelength_m;
  p.geometry = EtalonGeometry::make(spec.resonant_length_m, v * spec.wavelength_m / 2.0);

  MechMode m1 = spec.mode1;
  MechMode m2 = spec.mode2;
  if (spec.piezo_beta != 0.0) {
    MechMode& shifted = spec.piezo_membrane == 1 ? m1 : m2;
    shifted.omega = piezo_shifted_omega(shifted.omega, spec.piezo_beta, v);
  }
  if (spec.overlap_ratio > 0.0) m1.overlap = spec.overlap_ratio * m2.overlap;
  p.omega_m1 = m1.omega;
  p.omega_m2 = m2.omega;

  const auto response = bad_cavity_reflection(p);
  return voltage_noise_spectrum(spec.chain, response, spec.wavelength_m, m1, m2, spec.correlation, spec.freq_grid,
                                spec.level)
      .y;
}

namespace {

SweepMap empty_map(const SweepSpec& spec) {
  if (spec.dl_grid.empty() || spec.freq_grid.empty()) throw DomainError("sweep grids must be non-empty");
  if (spec.piezo_membrane != 1 && spec.piezo_membrane != 2) throw DomainError("piezo membrane must be 1 or 2");
  SweepMap map;
  map.dl_grid = spec.dl_grid;
  map.freq_grid = spec.freq_grid;
  map.psd.resize(spec.dl_grid.size() * spec.freq_grid.size());
  return map;
}

void store_row(SweepMap& map, std::size_t row, const std::vector<double>& values) {
  std::copy(values.begin(), values.end(), map.psd.begin() + static_cast<std::ptrdiff_t>(row * map.freq_grid.size()));
}

}  // namespace

SweepMap sweep_map(const SweepSpec& spec, int workers) {
  SweepMap map = empty_map(spec);
  parallel::for_each_index(spec.dl_grid.size(), workers,
                           [&](std::size_t row) { store_row(map, row, sweep_row(spec, row)); });
  return map;
}

SweepMap sweep_map_serial(const SweepSpec& spec) {
  SweepMap map = empty_map(spec);
  for (std::size_t row = 0; row < spec.dl_grid.size(); ++row) store_row(map, row, sweep_row(spec, row));
  return map;
}

}  // namespace mimcav
