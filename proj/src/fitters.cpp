#include "mimcav/fitters.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mimcav/errors.hpp"
#include "mimcav/etalon_steady.hpp"
#include "mimcav/least_squares.hpp"

namespace mimcav {

const FitParameter& FitResult::get(std::string_view name) const {
  for (const auto& p : parameters) {
    if (p.name == name) return p;
  }
  throw DomainError("fit result has no parameter '" + std::string(name) + "'");
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("x and y series differ in length");
  if (x.empty()) throw DomainError("series is empty");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DomainError("series contains non-finite values");
  }
}

double median_of(std::span<const double> y) {
  std::vector<double> v(y.begin(), y.end());
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double norm_of_cost(double cost) { return std::sqrt(std::max(cost, 0.0)); }

// ---- Airy vs wavelength ----

struct AiryWavelengthModel {
  std::vector<double> lambda;
  std::vector<SlabCoefficients> slab;

  AiryWavelengthModel(std::span<const double> wavelengths_m, double thickness_m, const IndexModel& index)
      : lambda(wavelengths_m.begin(), wavelengths_m.end()) {
    slab.reserve(lambda.size());
    for (double l : lambda) slab.push_back(slab_coefficients({index(l), thickness_m}, l));
  }

  double shape(std::size_t i, double length_m) const {
    const auto g = EtalonGeometry::make(length_m);
    return steady_transmission(slab[i], slab[i], g, lambda[i]);
  }
};

}  // namespace

std::vector<double> airy_wavelength_curve(std::span<const double> wavelengths_m, double length_m,
                                          double thickness_m, const IndexModel& index, double amplitude) {
  const AiryWavelengthModel model(wavelengths_m, thickness_m, index);
  std::vector<double> out(wavelengths_m.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = amplitude * model.shape(i, length_m);
  return out;
}

std::vector<std::size_t> find_fringe_peaks(std::span<const double> y) {
  if (y.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > 0.0) || (hi - lo) < 0.05 * hi) return {};
  const double upper = lo + 0.7 * (hi - lo);
  const double lower = lo + 0.3 * (hi - lo);

  std::vector<std::size_t> peaks;
  bool inside = false;
  bool armed = false;  // a dip below `lower` has been seen (or the trace started low)
  std::size_t best = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!inside && y[i] < lower) armed = true;
    if (!inside && y[i] > upper) {
      inside = true;
      best = i;
    }
    if (inside) {
      if (y[i] > y[best]) best = i;
      if (y[i] < lower) {
        if (armed) peaks.push_back(best);
        inside = false;
        armed = true;
      }
    }
  }
  // A final excursion counts only if it came back down; a maximum cut by the
  // record edge is not a resolved fringe.
  return peaks;
}

FitResult fit_airy_wavelength(std::span<const double> wavelengths_m, std::span<const double> transmission,
                              const AiryWavelengthOptions& options) {
  check_pair(wavelengths_m, transmission);
  const auto peaks = find_fringe_peaks(transmission);
  if (peaks.size() < 2) throw DomainError("white-light spectrum must span at least two fringe peaks");

  double seed = options.initial_length_m;
  if (!(seed > 0.0)) {
    const double k_first = 1.0 / wavelengths_m[peaks.front()];
    const double k_last = 1.0 / wavelengths_m[peaks.back()];
    const double spacing = std::abs(k_first - k_last) / static_cast<double>(peaks.size() - 1);
    seed = 1.0 / (2.0 * spacing);
  }

  const AiryWavelengthModel model(wavelengths_m, options.thickness_m, options.index);
  const std::size_t n = wavelengths_m.size();
  std::vector<double> shape(n);

  auto profile = [&](double length) {
    double sym = 0.0;
    double smm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      shape[i] = model.shape(i, length);
      sym += transmission[i] * shape[i];
      smm += shape[i] * shape[i];
    }
    const double amp = sym / smm;
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = transmission[i] - amp * shape[i];
      cost += r * r;
    }
    return std::pair{cost, amp};
  };

  const double lambda_min = *std::min_element(wavelengths_m.begin(), wavelengths_m.end());
  const double step = 0.2 * lambda_min / (4.0 * kPi);
  const double lo = seed * (1.0 - options.search_fraction);
  const double hi = seed * (1.0 + options.search_fraction);
  double best_len = seed;
  auto [best_cost, best_amp] = profile(seed);
  for (double len = lo; len <= hi; len += step) {
    const auto [c, a] = profile(len);
    if (c < best_cost) {
      best_cost = c;
      best_amp = a;
      best_len = len;
    }
  }

  LeastSquaresProblem problem;
  problem.num_residuals = n;
  problem.residuals = [&](std::span<const double> x, std::span<double> out) {
    const double length = x[0] * 1e-6;
    for (std::size_t i = 0; i < n; ++i) out[i] = transmission[i] - x[1] * model.shape(i, length);
  };
  const auto lm = levenberg_marquardt(problem, {best_len * 1e6, best_amp});

  FitResult result;
  result.parameters = {{"length_m", "m", lm.params[0] * 1e-6, lm.sigma[0] * 1e-6},
                       {"amplitude", "", lm.params[1], lm.sigma[1]}};
  result.residual_norm = norm_of_cost(lm.cost);
  result.converged = lm.converged;
  result.iterations = lm.iterations;
  const double edge = std::abs(lm.params[0] * 1e-6 - seed) / seed;
  if (edge > 0.98 * options.search_fraction) result.warnings.push_back("length estimate at the edge of the search range");
  return result;
}

// ---- time scan ----

std::vector<double> airy_timescan_curve(std::span<const double> voltage, double rho, double phase0,
                                        double disp_per_volt, double disp_per_volt2, double wavelength_m,
                                        double amplitude) {
  std::vector<double> out(voltage.size());
  const double k2 = 4.0 * kPi / wavelength_m;
  for (std::size_t i = 0; i < voltage.size(); ++i) {
    const double v = voltage[i];
    const double theta = phase0 + k2 * (disp_per_volt * v + disp_per_volt2 * v * v);
    out[i] = amplitude * (1.0 - rho) * (1.0 - rho) / (1.0 + rho * rho - 2.0 * rho * std::cos(theta));
  }
  return out;
}

FitResult fit_airy_timescan(std::span<const double> voltage, std::span<const double> transmission,
                            const TimescanOptions& options) {
  check_pair(voltage, transmission);
  if (!(options.wavelength_m > 0.0)) throw DomainError("wavelength must be positive");
  const auto peaks = find_fringe_peaks(transmission);
  if (peaks.size() < 2) throw DomainError("time scan must contain at least two transmission peaks");

  const double lambda = options.wavelength_m;
  const double k2 = 4.0 * kPi / lambda;
  const auto [lo_it, hi_it] = std::minmax_element(transmission.begin(), transmission.end());
  const double contrast = std::max(*lo_it, 0.0) / *hi_it;
  const double rho_seed = std::clamp((1.0 - std::sqrt(contrast)) / (1.0 + std::sqrt(contrast)), 0.05, 0.95);
  const double amp_seed = *hi_it;
  const std::size_t n = voltage.size();

  // Parameters: rho, amplitude, phase0, a [nm/V], b [nm/V^2].
  LeastSquaresProblem problem;
  problem.num_residuals = n;
  problem.residuals = [&](std::span<const double> x, std::span<double> out) {
    const double rho = x[0];
    if (!(rho > 0.0 && rho < 1.0)) {
      for (auto& r : out) r = 10.0 * amp_seed;
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double v = voltage[i];
      const double theta = x[2] + k2 * 1e-9 * (x[3] * v + x[4] * v * v);
      const double model = x[1] * (1.0 - rho) * (1.0 - rho) / (1.0 + rho * rho - 2.0 * rho * std::cos(theta));
      out[i] = transmission[i] - model;
    }
  };
  LmOptions lm_options;
  lm_options.scale = {1.0, 1.0, 1.0, 1.0, 1.0};

  std::vector<std::vector<double>> seeds;

  // Seed from the unique peak voltages: theta(V_p) = 2 pi p.
  std::vector<double> vp;
  for (auto i : peaks) vp.push_back(voltage[i]);
  std::sort(vp.begin(), vp.end());
  double max_gap = 0.0;
  for (std::size_t i = 1; i < vp.size(); ++i) max_gap = std::max(max_gap, vp[i] - vp[i - 1]);
  std::vector<double> unique{vp.front()};
  for (std::size_t i = 1; i < vp.size(); ++i) {
    if (vp[i] - unique.back() > 0.25 * max_gap) unique.push_back(vp[i]);
  }
  if (unique.size() >= 2) {
    const int cols = unique.size() >= 3 ? 3 : 2;
    Eigen::MatrixXd a(unique.size(), cols);
    Eigen::VectorXd b(unique.size());
    for (std::size_t i = 0; i < unique.size(); ++i) {
      a(i, 0) = 1.0;
      a(i, 1) = unique[i];
      if (cols == 3) a(i, 2) = unique[i] * unique[i];
      b(i) = kTwoPi * static_cast<double>(i);
    }
    Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    double sign = options.displacement_per_volt_guess < 0.0 ? -1.0 : 1.0;
    const double quad = cols == 3 ? c(2) : 0.0;
    seeds.push_back({rho_seed, amp_seed, sign * c(0), sign * c(1) / k2 * 1e9, sign * quad / k2 * 1e9});
  }
  if (options.displacement_per_volt_guess != 0.0) {
    const double a_nm = options.displacement_per_volt_guess * 1e9;
    std::vector<double> r(n);
    double best_phase = 0.0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 32; ++i) {
      const double ph = kTwoPi * i / 32.0;
      problem.residuals(std::vector<double>{rho_seed, amp_seed, ph, a_nm, 0.0}, r);
      const double c = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
      if (c < best_cost) {
        best_cost = c;
        best_phase = ph;
      }
    }
    seeds.push_back({rho_seed, amp_seed, best_phase, a_nm, 0.0});
  }

  LmSummary best;
  best.cost = std::numeric_limits<double>::infinity();
  for (const auto& s : seeds) {
    auto lm = levenberg_marquardt(problem, s, lm_options);
    if (lm.cost < best.cost) best = std::move(lm);
  }

  FitResult result;
  const double rho = best.params[0];
  const double rho_sigma = best.sigma[0];
  double finesse = std::numeric_limits<double>::quiet_NaN();
  double finesse_sigma = 0.0;
  try {
    finesse = finesse_from_round_trip(rho);
    const double h = std::max(1e-6, rho_sigma);
    const double up = finesse_from_round_trip(std::min(rho + h, 1.0 - 1e-12));
    const double dn = finesse_from_round_trip(std::max(rho - h, 0.1716));
    finesse_sigma = std::abs(up - dn) / (2.0 * h) * rho_sigma;
  } catch (const DomainError&) {
    result.warnings.push_back("fitted reflectivity too low for a FWHM finesse");
  }
  double phase0 = std::fmod(best.params[2], kTwoPi);
  if (phase0 < 0.0) phase0 += kTwoPi;
  result.parameters = {{"finesse", "", finesse, finesse_sigma},
                       {"reflectivity", "", rho, rho_sigma},
                       {"amplitude", "", best.params[1], best.sigma[1]},
                       {"phase0_rad", "rad", phase0, best.sigma[2]},
                       {"disp_per_volt_m", "m/V", best.params[3] * 1e-9, best.sigma[3] * 1e-9},
                       {"disp_per_volt2_m", "m/V^2", best.params[4] * 1e-9, best.sigma[4] * 1e-9}};
  result.residual_norm = norm_of_cost(best.cost);
  result.converged = best.converged;
  result.iterations = best.iterations;
  return result;
}

// ---- thickness ----

ThicknessFit fit_thickness(std::span<const ReflectivityPoint> points, const IndexModel& index,
                           double initial_guess_m) {
  if (points.empty()) throw DomainError("no reflectivity points");
  double upper = 0.0;
  for (const auto& p : points) {
    if (!(p.wavelength_m > 0.0) || !(p.sigma > 0.0) || !(p.reflectivity >= 0.0 && p.reflectivity <= 1.0)) {
      throw DomainError("invalid reflectivity point");
    }
    upper = std::max(upper, p.wavelength_m / (2.0 * index(p.wavelength_m)));
  }

  auto residual = [&](double thickness, std::size_t i) {
    const auto& p = points[i];
    return (slab_coefficients({index(p.wavelength_m), thickness}, p.wavelength_m).R - p.reflectivity) / p.sigma;
  };
  auto objective = [&](double thickness) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double r = residual(thickness, i);
      s += r * r;
    }
    return s;
  };

  LeastSquaresProblem problem;
  problem.num_residuals = points.size();
  problem.residuals = [&](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = residual(x[0] * 1e-9, i);
  };

  constexpr int kGrid = 4000;
  std::vector<double> grid(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) grid[i] = objective(upper * i / kGrid);

  ThicknessFit out;
  std::vector<LmSummary> fits;
  for (int i = 1; i < kGrid; ++i) {
    if (grid[i] <= grid[i - 1] && grid[i] < grid[i + 1]) {
      auto lm = levenberg_marquardt(problem, {upper * i / kGrid * 1e9});
      const double t = lm.params[0] * 1e-9;
      const bool duplicate = std::any_of(out.local_minima_m.begin(), out.local_minima_m.end(),
                                         [&](double m) { return std::abs(m - t) < 1e-11; });
      if (!duplicate && t >= 0.0 && t <= upper) {
        out.local_minima_m.push_back(t);
        fits.push_back(std::move(lm));
      }
    }
  }
  if (fits.empty()) throw DomainError("reflectivity objective has no interior minimum");

  std::size_t pick = 0;
  for (std::size_t i = 1; i < fits.size(); ++i) {
    if (initial_guess_m > 0.0) {
      if (std::abs(out.local_minima_m[i] - initial_guess_m) < std::abs(out.local_minima_m[pick] - initial_guess_m)) {
        pick = i;
      }
    } else if (fits[i].cost < fits[pick].cost) {
      pick = i;
    }
  }

  // Keep minima ascending together with their fits.
  std::vector<std::size_t> order(fits.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return out.local_minima_m[a] < out.local_minima_m[b]; });
  std::vector<double> sorted;
  for (auto i : order) sorted.push_back(out.local_minima_m[i]);
  out.local_minima_m = std::move(sorted);

  const auto& lm = fits[pick];
  out.fit.parameters = {{"thickness_m", "m", lm.params[0] * 1e-9, lm.sigma[0] * 1e-9}};
  out.fit.residual_norm = norm_of_cost(lm.cost);
  out.fit.converged = lm.converged;
  out.fit.iterations = lm.iterations;
  if (points.size() < 2) out.fit.warnings.push_back("single wavelength: thickness is not unique");
  if (out.local_minima_m.size() > 1) out.fit.warnings.push_back("objective has multiple local minima");
  return out;
}

// ---- Lorentzian ----

std::vector<double> lorentzian_curve(std::span<const double> freq_hz, std::span<const LorentzPeak> peaks,
                                     double floor) {
  std::vector<double> out(freq_hz.size(), floor);
  for (std::size_t i = 0; i < freq_hz.size(); ++i) {
    for (const auto& p : peaks) {
      const double hw = 0.5 * p.fwhm_hz;
      const double d = freq_hz[i] - p.center_hz;
      out[i] += p.height * hw * hw / (d * d + hw * hw);
    }
  }
  return out;
}

std::vector<std::size_t> find_peaks_above_median(std::span<const double> y, double factor) {
  if (y.size() < 3) return {};
  const double threshold = factor * median_of(y);
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] > threshold && y[i] >= y[i - 1] && y[i] > y[i + 1]) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return y[a] > y[b]; });
  return idx;
}

FitResult fit_lorentzian(std::span<const double> freq_hz, std::span<const double> psd, int peak_count) {
  check_pair(freq_hz, psd);
  if (peak_count < 1) throw DomainError("peak count must be >= 1");
  const double floor_seed = median_of(psd);
  const double df = std::abs(freq_hz.back() - freq_hz.front()) / std::max<std::size_t>(freq_hz.size() - 1, 1);

  struct Seed {
    double center, width, height;
  };
  // Seeds: tallest maxima above 3x median; a candidate inside the half-max
  // region (widened by its own width) of an earlier pick is the same peak.
  std::vector<Seed> seeds;
  std::vector<std::pair<std::size_t, std::size_t>> taken;
  for (auto c : find_peaks_above_median(psd, 3.0)) {
    if (static_cast<int>(seeds.size()) == peak_count) break;
    const bool inside = std::any_of(taken.begin(), taken.end(), [&](const auto& span) {
      const std::size_t w = span.second - span.first;
      return c + w >= span.first && c <= span.second + w;
    });
    if (inside) continue;
    const double half = floor_seed + 0.5 * (psd[c] - floor_seed);
    std::size_t l = c;
    std::size_t r = c;
    while (l > 0 && psd[l] > half) --l;
    while (r + 1 < psd.size() && psd[r] > half) ++r;
    taken.emplace_back(l, r);
    const double width = std::max(std::abs(freq_hz[r] - freq_hz[l]), 2.0 * df);
    seeds.push_back({freq_hz[c], width, psd[c] - floor_seed});
  }

  FitResult result;
  if (static_cast<int>(seeds.size()) < peak_count) {
    result.parameters = {{"floor", "", floor_seed, 0.0}};
    result.converged = false;
    result.warnings.push_back("requested peaks not found above 3x the median floor");
    return result;
  }
  std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.center < b.center; });

  // Scaled parameters per peak: center offset / width_seed, width / width_seed,
  // height / height_seed; then floor / scale.
  const double yscale = *std::max_element(psd.begin(), psd.end());
  const std::size_t np = seeds.size();
  const std::size_t n = freq_hz.size();
  LeastSquaresProblem problem;
  problem.num_residuals = n;
  problem.residuals = [&](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) {
      double model = x[3 * np] * yscale;
      for (std::size_t k = 0; k < np; ++k) {
        const double center = seeds[k].center + x[3 * k] * seeds[k].width;
        const double hw = 0.5 * std::abs(x[3 * k + 1]) * seeds[k].width;
        const double d = freq_hz[i] - center;
        model += x[3 * k + 2] * seeds[k].height * hw * hw / (d * d + hw * hw);
      }
      out[i] = (psd[i] - model) / yscale;
    }
  };
  std::vector<double> x0;
  LmOptions options;
  for (std::size_t k = 0; k < np; ++k) {
    x0.insert(x0.end(), {0.0, 1.0, 1.0});
    options.scale.insert(options.scale.end(), {1.0, 1.0, 1.0});
  }
  x0.push_back(floor_seed / yscale);
  options.scale.push_back(1.0);
  const auto lm = levenberg_marquardt(problem, x0, options);

  std::vector<std::size_t> order(np);
  std::iota(order.begin(), order.end(), 0);
  auto center_of = [&](std::size_t k) { return seeds[k].center + lm.params[3 * k] * seeds[k].width; };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return center_of(a) < center_of(b); });
  for (std::size_t rank = 0; rank < np; ++rank) {
    const std::size_t k = order[rank];
    const auto tag = std::to_string(rank + 1);
    const double w = seeds[k].width;
    const double center = center_of(k);
    const double fwhm = std::abs(lm.params[3 * k + 1]) * w;
    const double fwhm_sigma = lm.sigma[3 * k + 1] * w;
    const double q = center / fwhm;
    const double q_sigma = q * std::hypot(fwhm_sigma / fwhm, lm.sigma[3 * k] * w / center);
    result.parameters.push_back({"center_hz_" + tag, "Hz", center, lm.sigma[3 * k] * w});
    result.parameters.push_back({"fwhm_hz_" + tag, "Hz", fwhm, fwhm_sigma});
    result.parameters.push_back({"height_" + tag, "", lm.params[3 * k + 2] * seeds[k].height,
                                 lm.sigma[3 * k + 2] * seeds[k].height});
    result.parameters.push_back({"q_" + tag, "", q, q_sigma});
    result.parameters.push_back({"gamma_rad_s_" + tag, "rad/s", kTwoPi * fwhm, kTwoPi * fwhm_sigma});
    if (lm.params[3 * k + 2] * seeds[k].height < 3.0 * lm.params[3 * np] * yscale) {
      result.warnings.push_back("peak " + tag + " below 3x the fitted floor");
    }
  }
  result.parameters.push_back({"floor", "", lm.params[3 * np] * yscale, lm.sigma[3 * np] * yscale});
  result.residual_norm = norm_of_cost(lm.cost) * yscale;
  result.converged = lm.converged;
  result.iterations = lm.iterations;
  return result;
}

}  // namespace mimcav
