#include "mimcav/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "mimcav/config.hpp"
#include "mimcav/errors.hpp"
#include "mimcav/etalon_steady.hpp"
#include "mimcav/field_dynamics.hpp"
#include "mimcav/fitters.hpp"
#include "mimcav/homodyne.hpp"
#include "mimcav/io.hpp"
#include "mimcav/mechanics.hpp"
#include "mimcav/random.hpp"
#include "mimcav/selftest.hpp"
#include "mimcav/spectral_response.hpp"

namespace mimcav {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Invocation {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> convention;
};

// Everything derived from the config that several commands share.
struct Setup {
  RunConfig cfg;
  IndexModel index;
  SlabCoefficients c1;
  SlabCoefficients c2;
  double lambda = 0.0;
  EtalonGeometry geometry;
  MechMode mode1;
  MechMode mode2;
  fs::path out;
  ordered_json derived;
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

ordered_json complex_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

SlabCoefficients make_slab(const std::optional<double>& reflectivity, double thickness, const IndexModel& index,
                           double lambda) {
  if (reflectivity) return SlabCoefficients::ideal(*reflectivity, kPi / 2.0);
  return slab_coefficients({index(lambda), thickness}, lambda);
}

MechMode make_mode(const RunConfig& cfg, int membrane) {
  const auto& m = cfg.mechanics;
  const MembranePlate plate{membrane == 1 ? m.membrane1_side_x_m : m.membrane2_side_x_m,
                            membrane == 1 ? m.membrane1_side_y_m : m.membrane2_side_y_m, m.stress_pa,
                            m.density_kg_m3};
  const double thickness = membrane == 1 ? cfg.optics.membrane1_thickness_m : cfg.optics.membrane2_thickness_m;
  const double mass = m.effective_mass_kg ? *m.effective_mass_kg : default_effective_mass(plate, thickness);
  const double f = mode_frequency(plate, m.mode_n, m.mode_m, cfg.convention);
  return MechMode::from_frequency(f, membrane == 1 ? m.quality1 : m.quality2, mass,
                                  membrane == 1 ? m.overlap1 : m.overlap2, m.force_n);
}

Setup make_setup(const Invocation& inv) {
  Setup s;
  s.cfg = inv.config_path.empty() ? RunConfig{} : load_config(inv.config_path);
  if (inv.seed) s.cfg.seed = *inv.seed;
  if (inv.convention) s.cfg.convention = parse_convention(*inv.convention);
  const auto& o = s.cfg.optics;
  s.index = IndexModel::by_name(o.index_model, o.index_constant);
  s.lambda = o.wavelength_m;
  s.c1 = make_slab(o.membrane1_reflectivity, o.membrane1_thickness_m, s.index, s.lambda);
  s.c2 = make_slab(o.membrane2_reflectivity, o.membrane2_thickness_m, s.index, s.lambda);
  s.geometry = EtalonGeometry::make(resonant_length(s.c1, s.c2, s.lambda, o.cavity_length_m), o.delta_length_m);
  s.mode1 = make_mode(s.cfg, 1);
  s.mode2 = make_mode(s.cfg, 2);
  s.out = inv.out_dir;
  fs::create_directories(s.out);

  s.derived["resonant_length_m"] = s.geometry.L0;
  s.derived["fsr_hz"] = s.geometry.fsr;
  s.derived["r1"] = complex_json(s.c1.r);
  s.derived["r2"] = complex_json(s.c2.r);
  s.derived["mode1_freq_hz"] = s.mode1.omega / kTwoPi;
  s.derived["mode2_freq_hz"] = s.mode2.omega / kTwoPi;
  s.derived["mode1_mass_kg"] = s.mode1.mass;
  s.derived["mode2_mass_kg"] = s.mode2.mass;
  return s;
}

void write_provenance(const Setup& s, const std::string& command) {
  ordered_json j;
  j["command"] = command;
  j["rng_algorithm"] = NoiseSource::kAlgorithm;
  j["config"] = config_to_json(s.cfg);
  j["derived"] = s.derived;
  io::write_json(s.out / "provenance.json", j);
}

double grid_min(const GridConfig& g, double fallback) { return g.min ? *g.min : fallback; }
double grid_max(const GridConfig& g, double fallback) { return g.max ? *g.max : fallback; }

ResponseParams response_params(const Setup& s) {
  ResponseParams p;
  p.c1 = s.c1;
  p.c2 = s.c2;
  p.geometry = s.geometry;
  p.wavelength_m = s.lambda;
  p.omega_m1 = s.mode1.omega;
  p.omega_m2 = s.mode2.omega;
  return p;
}

std::vector<double> spectrum_grid(const Setup& s) {
  const double lo_f = std::min(s.mode1.omega, s.mode2.omega) / kTwoPi;
  const double hi_f = std::max(s.mode1.omega, s.mode2.omega) / kTwoPi;
  return linspace(grid_min(s.cfg.spectrum, lo_f * (1.0 - 2e-3)), grid_max(s.cfg.spectrum, hi_f * (1.0 + 2e-3)),
                  s.cfg.spectrum.points);
}

ForceCorrelation correlation_of(const Setup& s) {
  return s.cfg.mechanics.correlation == "uncorrelated" ? ForceCorrelation::uncorrelated
                                                       : ForceCorrelation::common_drive;
}

DetectionChain chain_of(const Setup& s) {
  const auto& d = s.cfg.detection;
  DetectionChain c;
  c.input_power_w = s.cfg.optics.input_power_w;
  c.lo_power_w = d.lo_power_w;
  c.lo_phase_rad = d.lo_phase_rad;
  c.gain_v_per_a = d.gain_v_per_a;
  c.responsivity_a_per_w = d.responsivity_a_per_w;
  c.bandwidth_rad_s = d.bandwidth_rad_s;
  c.noise_floor_v2_per_hz = d.noise_floor_v2_per_hz;
  return c;
}

int finish_fit(Setup& s, const std::string& command, const FitResult& fit, ordered_json extra, std::ostream& out) {
  auto j = io::fit_to_json(fit);
  for (auto& [k, v] : extra.items()) j[k] = v;
  io::write_json(s.out / "fit.json", j);
  write_provenance(s, command);
  for (const auto& p : fit.parameters) out << p.name << " = " << io::format_double(p.value) << " +- "
                                           << io::format_double(p.sigma) << (p.unit.empty() ? "" : " ") << p.unit
                                           << '\n';
  for (const auto& w : fit.warnings) out << "warning: " << w << '\n';
  return fit.converged ? kExitOk : kExitNoConvergence;
}

// Picks the first present column among the candidates and applies its scale.
std::vector<double> pick_column(const io::CsvTable& t, std::initializer_list<std::pair<const char*, double>> options) {
  for (const auto& [name, scale] : options) {
    if (t.has(name)) {
      auto v = t.column(name);
      for (auto& x : v) x *= scale;
      return v;
    }
  }
  std::string names;
  for (const auto& [name, scale] : options) names += (names.empty() ? "'" : " or '") + std::string(name) + "'";
  throw ParseError(t.source + ": missing column " + names);
}

void reject_unknown_columns(const io::CsvTable& t, std::initializer_list<const char*> allowed) {
  for (const auto& h : t.header) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return h == a; }) == allowed.end()) {
      throw ParseError(t.source + ": unknown column '" + h + "'");
    }
  }
}

// ---- commands ----

int cmd_slab(Setup& s, std::ostream& out) {
  const auto grid = linspace(grid_min(s.cfg.slab, 400e-9), grid_max(s.cfg.slab, 1100e-9), s.cfg.slab.points);
  const auto curve = reflectivity_curve(s.cfg.optics.membrane1_thickness_m, s.index, grid);
  io::write_series(s.out / "slab.csv", curve);
  ordered_json j;
  j["index_model"] = s.index.name();
  j["index"] = s.index(s.lambda);
  j["r"] = complex_json(s.c1.r);
  j["t"] = complex_json(s.c1.t);
  j["reflectivity"] = s.c1.R;
  io::write_json(s.out / "slab.json", j);
  write_provenance(s, "slab");
  out << "R(" << io::format_double(s.lambda) << " m) = " << io::format_double(s.c1.R) << '\n';
  return kExitOk;
}

int cmd_fringe(Setup& s, std::ostream& out) {
  const auto grid = linspace(grid_min(s.cfg.fringe, -0.5e-6), grid_max(s.cfg.fringe, 0.5e-6), s.cfg.fringe.points);
  const auto scan = fringe_scan(s.c1, s.c2, EtalonGeometry::make(s.geometry.L0), s.lambda, grid);
  io::write_series(s.out / "fringe.csv", scan);
  const double mu = std::abs(s.c1.r) * std::abs(s.c2.r);
  ordered_json j;
  j["round_trip_magnitude"] = mu;
  try {
    j["finesse"] = finesse_from_round_trip(mu);
  } catch (const DomainError&) {
    j["finesse"] = nullptr;
  }
  j["fsr_hz"] = s.geometry.fsr;
  io::write_json(s.out / "fringe.json", j);
  write_provenance(s, "fringe");
  out << "finesse = " << j["finesse"].dump() << '\n';
  return kExitOk;
}

int cmd_simulate(Setup& s, std::ostream& out) {
  const auto& sim = s.cfg.simulate;
  const double fsr = s.geometry.fsr;
  const double f1 = sim.frequency1_hz ? *sim.frequency1_hz : fsr / 16.0;
  const double f2 = sim.frequency2_hz ? *sim.frequency2_hz : fsr / 10.0;
  const auto t1 = MembraneTrajectory::sinusoid(sim.amplitude1_m, kTwoPi * f1);
  const auto t2 = MembraneTrajectory::sinusoid(sim.amplitude2_m, kTwoPi * f2);
  DriveField drive;
  drive.power_w = s.cfg.optics.input_power_w;
  drive.wavelength_m = s.lambda;
  const double mu = std::abs(round_trip_factor(s.c1, s.c2, s.geometry, s.lambda));
  const double ring = static_cast<double>(ring_up_round_trips(mu)) * s.geometry.tau;
  const double duration = sim.duration_s ? *sim.duration_s : ring + 40.0 / std::min(f1, f2);
  const auto rec = simulate(s.c1, s.c2, s.geometry, drive, t1, t2, duration, sim.subdivisions);
  io::write_field_record(s.out / "field.csv", rec);

  ResponseParams p = response_params(s);
  p.omega_m1 = kTwoPi * f1;
  p.omega_m2 = kTwoPi * f2;
  p.xi1 = modulation_index(sim.amplitude1_m, s.lambda);
  p.xi2 = modulation_index(sim.amplitude2_m, s.lambda);

  ordered_json j;
  j["samples"] = rec.size();
  j["steady_start"] = rec.steady_start;
  j["ring_up_incomplete"] = rec.ring_up_incomplete;
  j["retardation_flag"] = rec.retardation_flag;
  j["displacement_flag"] = rec.displacement_flag;
  j["perturbative_warning"] = p.perturbative_warning();
  auto sidebands = ordered_json::array();
  const double scale = std::sqrt(drive.power_w);
  for (int m = 1; m <= 2; ++m) {
    if (p.xi(m) == 0.0) continue;
    const double f = m == 1 ? f1 : f2;
    for (auto [channel, name] : {std::pair{ResponseChannel::cavity, "cavity"},
                                 std::pair{ResponseChannel::reflected, "reflected"}}) {
      ordered_json e;
      e["membrane"] = m;
      e["channel"] = name;
      e["freq_hz"] = f;
      const auto pred = predict_first_order_sidebands(p, m, channel);
      e["predicted_upper"] = complex_json(pred.upper * scale);
      e["predicted_lower"] = complex_json(pred.lower * scale);
      if (!rec.ring_up_incomplete) {
        const auto meas = extract_sidebands(
            rec, channel == ResponseChannel::cavity ? FieldChannel::cavity : FieldChannel::reflected, f, 1);
        e["measured_upper"] = complex_json(meas.upper[0]);
        e["measured_lower"] = complex_json(meas.lower[0]);
      }
      sidebands.push_back(std::move(e));
    }
  }
  j["first_order_sidebands"] = std::move(sidebands);
  io::write_json(s.out / "simulate.json", j);
  s.derived["simulate_frequency1_hz"] = f1;
  s.derived["simulate_frequency2_hz"] = f2;
  s.derived["simulate_duration_s"] = duration;
  write_provenance(s, "simulate");
  out << "samples = " << rec.size() << (rec.ring_up_incomplete ? " (ring-up incomplete)" : "") << '\n';
  return kExitOk;
}

int cmd_response(Setup& s, std::ostream& out) {
  const auto grid = linspace(grid_min(s.cfg.response, 0.0), grid_max(s.cfg.response, 2.0 * s.geometry.fsr),
                             s.cfg.response.points);
  const auto p = response_params(s);
  std::vector<std::vector<double>> cols(8, std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cplx sv{0.0, kTwoPi * grid[i]};
    const cplx values[4] = {d_of_s(p, sv), cavity_response_c0(p, sv), reflection_response_r0(p, sv),
                            transmission_response_t0(p, sv)};
    for (int k = 0; k < 4; ++k) {
      cols[2 * k][i] = values[k].real();
      cols[2 * k + 1][i] = values[k].imag();
    }
  }
  io::write_csv(s.out / "response.csv", {"freq_hz", "reD", "imD", "reC0", "imC0", "reR0", "imR0", "reT0", "imT0"},
                {&grid, &cols[0], &cols[1], &cols[2], &cols[3], &cols[4], &cols[5], &cols[6], &cols[7]});
  const auto bc = bad_cavity_reflection(p);
  ordered_json j;
  j["r0"] = complex_json(bc.r0);
  j["r1_1"] = complex_json(bc.r1_1);
  j["r1_2"] = complex_json(bc.r1_2);
  j["regime_warning"] = bc.regime_warning;
  io::write_json(s.out / "response.json", j);
  write_provenance(s, "response");
  out << "R1_1 = " << j["r1_1"].dump() << ", R1_2 = " << j["r1_2"].dump() << '\n';
  return kExitOk;
}

int cmd_spectrum(Setup& s, std::ostream& out) {
  const auto grid = spectrum_grid(s);
  const auto bc = bad_cavity_reflection(response_params(s));
  const auto spec = voltage_noise_spectrum(chain_of(s), bc, s.lambda, s.mode1, s.mode2, correlation_of(s), grid,
                                           s.cfg.detection.level);
  io::write_series(s.out / "spectrum.csv", spec);
  write_provenance(s, "spectrum");
  out << "points = " << spec.size() << '\n';
  return kExitOk;
}

SweepSpec sweep_spec(const Setup& s) {
  SweepSpec spec;
  spec.c1 = s.c1;
  spec.c2 = s.c2;
  spec.resonant_length_m = s.geometry.L0;
  spec.wavelength_m = s.lambda;
  spec.chain = chain_of(s);
  spec.mode1 = s.mode1;
  spec.mode2 = s.mode2;
  spec.correlation = correlation_of(s);
  spec.dl_grid = linspace(grid_min(s.cfg.sweep, 0.0), grid_max(s.cfg.sweep, 2.0), s.cfg.sweep.points);
  spec.freq_grid = spectrum_grid(s);
  spec.overlap_ratio = s.cfg.sweep_overlap_ratio.value_or(0.0);
  spec.piezo_beta = s.cfg.mechanics.piezo_beta;
  spec.piezo_membrane = s.cfg.mechanics.piezo_membrane;
  spec.level = s.cfg.detection.level;
  return spec;
}

int cmd_sweep(Setup& s, int workers, std::ostream& out) {
  const auto spec = sweep_spec(s);
  const auto map = sweep_map(spec, workers);
  io::write_map_csv(s.out / "sweep_map.csv", map);
  io::write_json(s.out / "sweep_map.json", io::map_to_json(map));

  std::vector<double> transmission(spec.dl_grid.size());
  const double peak = std::norm(s.c1.t * s.c2.t) / std::pow(1.0 - std::abs(s.c1.r) * std::abs(s.c2.r), 2);
  for (std::size_t i = 0; i < spec.dl_grid.size(); ++i) {
    const auto g = EtalonGeometry::make(spec.resonant_length_m, spec.dl_grid[i] * s.lambda / 2.0);
    transmission[i] = steady_transmission(s.c1, s.c2, g, s.lambda) / peak;
  }
  io::write_csv(s.out / "sweep_transmission.csv", {"dL_over_halflambda", "transmission_norm"},
                {&spec.dl_grid, &transmission});
  write_provenance(s, "sweep-map");
  out << "map " << map.dl_grid.size() << " x " << map.freq_grid.size() << '\n';
  return kExitOk;
}

int cmd_fit_airy_lambda(Setup& s, std::ostream& out) {
  const auto& f = s.cfg.fit;
  std::vector<double> lambda, y;
  if (!f.data_csv.empty()) {
    const auto t = io::read_csv(f.data_csv);
    reject_unknown_columns(t, {"wavelength_m", "wavelength_nm", "transmission_norm", "transmission"});
    lambda = pick_column(t, {{"wavelength_m", 1.0}, {"wavelength_nm", 1e-9}});
    y = pick_column(t, {{"transmission_norm", 1.0}, {"transmission", 1.0}});
  } else {
    lambda = linspace(f.wavelength_min_m, f.wavelength_max_m, f.points);
    y = airy_wavelength_curve(lambda, s.cfg.optics.cavity_length_m, s.cfg.optics.membrane1_thickness_m, s.index);
    NoiseSource rng(s.cfg.seed, 0);
    for (auto& v : y) v *= 1.0 + rng.normal(f.noise_fraction);
    io::write_csv(s.out / "fit_input.csv", {"wavelength_m", "transmission_norm"}, {&lambda, &y});
  }
  AiryWavelengthOptions opt;
  opt.initial_length_m = f.initial_length_m;
  opt.search_fraction = f.search_fraction;
  opt.thickness_m = s.cfg.optics.membrane1_thickness_m;
  opt.index = s.index;
  const auto fit = fit_airy_wavelength(lambda, y, opt);
  return finish_fit(s, "fit-airy-lambda", fit, ordered_json::object(), out);
}

int cmd_fit_airy_scan(Setup& s, std::ostream& out) {
  const auto& f = s.cfg.fit;
  std::vector<double> v, y;
  if (!f.data_csv.empty()) {
    const auto t = io::read_csv(f.data_csv);
    reject_unknown_columns(t, {"voltage_v", "transmission_norm", "transmission"});
    v = t.column("voltage_v");
    y = pick_column(t, {{"transmission_norm", 1.0}, {"transmission", 1.0}});
  } else {
    v = linspace(f.scan_voltage_min_v, f.scan_voltage_max_v, f.points);
    const double rho = std::abs(s.c1.r) * std::abs(s.c2.r);
    y = airy_timescan_curve(v, rho, 0.0, f.scan_disp_per_volt_m, f.scan_disp_per_volt2_m, s.lambda);
    NoiseSource rng(s.cfg.seed, 0);
    for (auto& x : y) x += rng.normal(f.noise_fraction);
    io::write_csv(s.out / "fit_input.csv", {"voltage_v", "transmission_norm"}, {&v, &y});
  }
  const auto fit = fit_airy_timescan(v, y, {s.lambda, f.disp_per_volt_guess_m});
  return finish_fit(s, "fit-airy-scan", fit, ordered_json::object(), out);
}

int cmd_fit_thickness(Setup& s, std::ostream& out) {
  const auto& f = s.cfg.fit;
  std::vector<ReflectivityPoint> points = f.reflectivity_points;
  if (!f.data_csv.empty()) {
    const auto t = io::read_csv(f.data_csv);
    reject_unknown_columns(t, {"wavelength_m", "wavelength_nm", "reflectivity", "reflectivity_sigma"});
    const auto lambda = pick_column(t, {{"wavelength_m", 1.0}, {"wavelength_nm", 1e-9}});
    const auto& r = t.column("reflectivity");
    points.clear();
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      points.push_back({lambda[i], r[i], t.has("reflectivity_sigma") ? t.column("reflectivity_sigma")[i] : 1.0});
    }
  }
  const auto result = fit_thickness(points, s.index, f.thickness_guess_m);
  ordered_json extra;
  extra["local_minima_m"] = result.local_minima_m;
  extra["index_model"] = s.index.name();
  return finish_fit(s, "fit-thickness", result.fit, extra, out);
}

int cmd_fit_lorentzian(Setup& s, std::ostream& out) {
  const auto& f = s.cfg.fit;
  std::vector<double> freq, psd;
  if (!f.data_csv.empty()) {
    const auto series = io::read_series(f.data_csv, "freq_hz", "psd_v2_hz");
    freq = series.x;
    psd = series.y;
  } else {
    freq = spectrum_grid(s);
    const auto bc = bad_cavity_reflection(response_params(s));
    // Independent forces: the peaks are plain resonances without interference.
    psd = voltage_noise_spectrum(chain_of(s), bc, s.lambda, s.mode1, s.mode2, ForceCorrelation::uncorrelated, freq,
                                 s.cfg.detection.level)
              .y;
    const double floor = 1e-3 * *std::max_element(psd.begin(), psd.end());
    NoiseSource rng(s.cfg.seed, 0);
    for (auto& x : psd) x = (x + floor) * (1.0 + rng.normal(f.noise_fraction));
    io::write_csv(s.out / "fit_input.csv", {"freq_hz", "psd_v2_hz"}, {&freq, &psd});
  }
  const auto fit = fit_lorentzian(freq, psd, f.peak_count);
  return finish_fit(s, "fit-lorentzian", fit, ordered_json::object(), out);
}

int cmd_selftest(Setup& s, std::ostream& out) {
  const auto checks = run_selftest();
  bool ok = true;
  auto arr = ordered_json::array();
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    ok = ok && c.passed;
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  io::write_json(s.out / "selftest.json", arr);
  write_provenance(s, "selftest");
  return ok ? kExitOk : kExitDomain;
}

int dispatch(const Invocation& inv, std::ostream& out) {
  Setup s = make_setup(inv);
  const auto& c = inv.command;
  if (c == "slab") return cmd_slab(s, out);
  if (c == "fringe") return cmd_fringe(s, out);
  if (c == "simulate") return cmd_simulate(s, out);
  if (c == "response") return cmd_response(s, out);
  if (c == "spectrum") return cmd_spectrum(s, out);
  if (c == "sweep-map") return cmd_sweep(s, inv.workers, out);
  if (c == "fit-airy-lambda") return cmd_fit_airy_lambda(s, out);
  if (c == "fit-airy-scan") return cmd_fit_airy_scan(s, out);
  if (c == "fit-thickness") return cmd_fit_thickness(s, out);
  if (c == "fit-lorentzian") return cmd_fit_lorentzian(s, out);
  if (c == "selftest") return cmd_selftest(s, out);
  throw ParseError("unknown subcommand '" + c + "'");
}

const std::vector<std::pair<std::string, std::string>> kCommands = {
    {"slab", "slab reflectivity versus wavelength"},
    {"fringe", "steady transmission versus membrane displacement"},
    {"simulate", "time-domain fields with vibrating membranes"},
    {"response", "frequency-domain transfer functions"},
    {"spectrum", "homodyne voltage noise spectrum"},
    {"sweep-map", "spectrum versus cavity length offset"},
    {"fit-airy-lambda", "cavity length from a white-light spectrum"},
    {"fit-airy-scan", "finesse from a piezo length scan"},
    {"fit-thickness", "slab thickness from reflectivities"},
    {"fit-lorentzian", "mechanical peaks from a spectrum"},
    {"selftest", "run the invariant checks"},
};

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-membrane etalon toolkit", "mimcav"};
  app.require_subcommand(1);
  Invocation inv;
  std::string convention;
  std::uint64_t seed = 0;
  for (const auto& [name, help] : kCommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", inv.out_dir, "output directory");
    sub->add_option("--workers", inv.workers, "worker threads (0: all)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--convention", convention, "mode frequency convention")
        ->check(CLI::IsMember({"as-written", "half-factor"}));
    sub->callback([&inv, name = name] { inv.command = name; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed")) inv.seed = seed;
    if (sub->count("--convention")) inv.convention = convention;
  }

  try {
    return dispatch(inv, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << '\n';
  } catch (const SingularityError& e) {
    err << "singularity: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitDomain;
}

}  // namespace mimcav
