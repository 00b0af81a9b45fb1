#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mimcav {

/// One-dimensional sampled curve. Column names carry the units
/// (e.g. "wavelength_nm", "transmission_norm", "freq_hz", "psd_v2_hz").
struct SpectrumSeries {
  std::string x_name;
  std::string y_name;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return x.size(); }
  bool operator==(const SpectrumSeries&) const = default;
};

/// PSD over (cavity-length offset x frequency). The length axis is the
/// offset in units of half a wavelength; psd is stored row-major with one
/// row per length offset.
struct SweepMap {
  std::vector<double> dl_grid;    // delta L / (lambda/2)
  std::vector<double> freq_grid;  // Hz
  std::vector<double> psd;        // V^2/Hz, dl_grid.size() x freq_grid.size()

  double at(std::size_t row, std::size_t col) const { return psd[row * freq_grid.size() + col]; }
  bool operator==(const SweepMap&) const = default;
};

}  // namespace mimcav
