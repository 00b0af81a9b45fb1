#include "mimcav/slab_optics.hpp"

#include <algorithm>
#include <cmath>

#include "mimcav/errors.hpp"

namespace mimcav {

SlabCoefficients SlabCoefficients::from_amplitudes(cplx r, cplx t) {
  const double sum = std::norm(r) + std::norm(t);
  if (std::abs(sum - 1.0) > 1e-12) {
    throw DomainError("slab coefficients are not lossless: |r|^2+|t|^2 = " + std::to_string(sum));
  }
  SlabCoefficients c;
  c.r = r;
  c.t = t;
  c.R = std::norm(r);
  c.phase = std::arg(r);
  return c;
}

SlabCoefficients SlabCoefficients::ideal(double reflectivity, double phase) {
  if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
    throw DomainError("reflectivity must lie in [0, 1]");
  }
  return from_amplitudes(std::polar(std::sqrt(reflectivity), phase), cplx{std::sqrt(1.0 - reflectivity), 0.0});
}

SlabCoefficients slab_coefficients(const SlabParams& slab, double wavelength_m) {
  if (!(wavelength_m > 0.0)) throw DomainError("wavelength must be positive");
  if (!(slab.thickness_m >= 0.0)) throw DomainError("slab thickness must be non-negative");
  if (!(slab.index >= 1.0)) throw DomainError("refractive index must be >= 1");

  const double n = slab.index;
  const double delta = kTwoPi / wavelength_m * n * slab.thickness_m;
  const double s = std::sin(delta);
  const double c = std::cos(delta);
  const cplx denom{(n * n + 1.0) * s, 2.0 * n * c};

  SlabCoefficients out;
  out.r = (n * n - 1.0) * s / denom;
  out.t = 2.0 * n / denom;
  out.R = std::norm(out.r);
  out.phase = std::arg(out.r);
  return out;
}

IndexModel IndexModel::constant(double n) {
  if (!(n >= 1.0)) throw DomainError("refractive index must be >= 1");
  IndexModel m;
  m.kind_ = Kind::constant;
  m.constant_ = n;
  m.name_ = "constant";
  return m;
}

IndexModel IndexModel::table(std::string name, std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw DomainError("index table is empty");
  std::sort(points.begin(), points.end());
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].first == points[i - 1].first) throw DomainError("index table has duplicate wavelengths");
  }
  IndexModel m;
  m.kind_ = Kind::table;
  m.name_ = std::move(name);
  m.points_ = std::move(points);
  return m;
}

IndexModel IndexModel::si3n4_sellmeier() {
  IndexModel m;
  m.kind_ = Kind::sellmeier;
  m.name_ = "si3n4-sellmeier";
  return m;
}

IndexModel IndexModel::si3n4_calibrated() {
  return table("si3n4-calibrated", {{532.0e-9, 2.0410}, {632.8e-9, 1.9963}, {980.0e-9, 1.9785}});
}

IndexModel IndexModel::by_name(std::string_view name, double constant_index) {
  if (name == "si3n4-calibrated") return si3n4_calibrated();
  if (name == "si3n4-sellmeier") return si3n4_sellmeier();
  if (name == "constant") return constant(constant_index);
  throw DomainError("unknown index model '" + std::string(name) + "'");
}

double IndexModel::operator()(double wavelength_m) const {
  switch (kind_) {
    case Kind::constant:
      return constant_;
    case Kind::sellmeier: {
      const double um = wavelength_m * 1e6;
      const double um2 = um * um;
      return std::sqrt(1.0 + 2.8939 * um2 / (um2 - 0.13967 * 0.13967));
    }
    case Kind::table: {
      if (wavelength_m <= points_.front().first) return points_.front().second;
      if (wavelength_m >= points_.back().first) return points_.back().second;
      auto hi = std::upper_bound(points_.begin(), points_.end(), wavelength_m,
                                 [](double w, const auto& p) { return w < p.first; });
      auto lo = hi - 1;
      const double f = (wavelength_m - lo->first) / (hi->first - lo->first);
      return lo->second + f * (hi->second - lo->second);
    }
  }
  return constant_;
}

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw DomainError("wavelength grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("wavelength grid must be strictly increasing");
  }
}

}  // namespace

SpectrumSeries reflectivity_curve(const SlabParams& slab, std::span<const double> wavelengths_m) {
  return reflectivity_curve(slab.thickness_m, IndexModel::constant(slab.index), wavelengths_m);
}

SpectrumSeries reflectivity_curve(double thickness_m, const IndexModel& model,
                                  std::span<const double> wavelengths_m) {
  check_grid(wavelengths_m);
  SpectrumSeries out{"wavelength_m", "reflectivity", {}, {}};
  out.x.assign(wavelengths_m.begin(), wavelengths_m.end());
  out.y.resize(wavelengths_m.size());
  for (std::size_t i = 0; i < wavelengths_m.size(); ++i) {
    const double lam = wavelengths_m[i];
    out.y[i] = slab_coefficients({model(lam), thickness_m}, lam).R;
  }
  return out;
}

}  // namespace mimcav
