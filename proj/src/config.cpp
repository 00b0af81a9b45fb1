#include "mimcav/config.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include "mimcav/errors.hpp"

namespace mimcav {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view convention_name(FrequencyConvention c) {
  return c == FrequencyConvention::as_written ? "as-written" : "half-factor";
}

FrequencyConvention parse_convention(std::string_view name) {
  if (name == "as-written") return FrequencyConvention::as_written;
  if (name == "half-factor") return FrequencyConvention::half_factor;
  throw ParseError("unknown convention '" + std::string(name) + "' (expected as-written or half-factor)");
}

namespace {

// Failure tied to a key; the loader maps it back to a line of the text.
struct KeyError {
  std::string path;
  std::string key;
  std::string message;
};

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw KeyError{path_, path_, "expected an object"};
  }

  void get(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) return;
      if (!v->is_number()) fail(key, "expected a number or null");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      out = v->get<int>();
    }
  }
  void get(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
        fail(key, "expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw KeyError{child_path(key), key, message};
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail(k, "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Fn>
void with_section(Section& parent, const std::string& key, Fn&& fn) {
  if (const json* v = parent.find(key)) {
    Section s(*v, parent.child_path(key));
    fn(s);
    s.finish();
  }
}

struct GridKeys {
  const char* section;
  const char* stem;
  const char* points;
};
constexpr GridKeys kSlabKeys{"slab", "wavelength", "points"};
constexpr GridKeys kFringeKeys{"fringe", "displacement", "points"};
constexpr GridKeys kResponseKeys{"response", "frequency", "points"};
constexpr GridKeys kSpectrumKeys{"spectrum", "frequency", "points"};

std::string unit_for(std::string_view stem) {
  if (stem == "wavelength" || stem == "displacement") return "_m";
  if (stem == "frequency") return "_hz";
  return "";
}

void read_unit_grid(Section& root, const GridKeys& keys, GridConfig& grid) {
  with_section(root, keys.section, [&](Section& s) {
    const std::string u = unit_for(keys.stem);
    s.get(std::string(keys.stem) + "_min" + u, grid.min);
    s.get(std::string(keys.stem) + "_max" + u, grid.max);
    s.get(keys.points, grid.points);
  });
}

void check(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw KeyError{path, path.substr(path.rfind('.') + 1), message};
}

void validate(const RunConfig& c) {
  check(c.optics.wavelength_m > 0.0, "optics.wavelength_m", "must be positive");
  check(c.optics.input_power_w > 0.0, "optics.input_power_w", "must be positive");
  check(c.optics.cavity_length_m > 0.0, "optics.cavity_length_m", "must be positive");
  check(c.optics.membrane1_thickness_m >= 0.0, "optics.membrane1_thickness_m", "must be non-negative");
  check(c.optics.membrane2_thickness_m >= 0.0, "optics.membrane2_thickness_m", "must be non-negative");
  for (const auto* r : {&c.optics.membrane1_reflectivity, &c.optics.membrane2_reflectivity}) {
    check(!r->has_value() || (**r >= 0.0 && **r < 1.0), "optics.membrane_reflectivity", "must lie in [0, 1)");
  }
  check(c.mechanics.mode_n >= 1 && c.mechanics.mode_m >= 1, "mechanics.mode_n", "mode indices start at 1");
  check(c.mechanics.quality1 > 0.0 && c.mechanics.quality2 > 0.0, "mechanics.quality1", "must be positive");
  check(c.mechanics.piezo_membrane == 1 || c.mechanics.piezo_membrane == 2, "mechanics.piezo_membrane",
        "must be 1 or 2");
  check(c.mechanics.correlation == "common-drive" || c.mechanics.correlation == "uncorrelated",
        "mechanics.correlation", "must be common-drive or uncorrelated");
  for (const auto* g : {&c.slab, &c.fringe, &c.response, &c.spectrum, &c.sweep}) {
    check(g->points >= 1, "points", "grids need at least one point");
  }
  check(c.simulate.subdivisions >= 2, "simulate.subdivisions", "must be >= 2");
  check(c.fit.points >= 2, "fit.points", "must be >= 2");
  check(c.fit.noise_fraction >= 0.0, "fit.noise_fraction", "must be non-negative");
  check(c.fit.peak_count >= 1, "fit.peak_count", "must be >= 1");
}

std::size_t line_of(std::string_view text, std::size_t offset) {
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + std::min(offset, text.size()), '\n'));
}

// Line of the first occurrence of "key" after its parent keys, or 0.
std::size_t locate_key(std::string_view text, const std::string& path) {
  std::size_t pos = 0;
  std::size_t start = 0;
  bool found = false;
  while (start <= path.size()) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    const auto hit = text.find("\"" + part + "\"", pos);
    if (hit == std::string_view::npos) break;
    pos = hit;
    found = true;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return found ? line_of(text, pos) : 1;
}

}  // namespace

RunConfig parse_config(std::string_view text, std::string_view source) {
  const std::string src(source);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(src + ": line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) +
                     ": malformed JSON (" + e.what() + ")");
  }

  RunConfig c;
  try {
    Section s(root, "");
    if (!root.contains("schema_version")) throw KeyError{"schema_version", "schema_version", "required key missing"};
    s.get("schema_version", c.schema_version);
    if (c.schema_version != kSchemaVersion) s.fail("schema_version", "unsupported schema version");
    s.get("seed", c.seed);
    std::string convention(convention_name(c.convention));
    s.get("convention", convention);
    try {
      c.convention = parse_convention(convention);
    } catch (const ParseError& e) {
      s.fail("convention", e.what());
    }

    with_section(s, "optics", [&](Section& o) {
      auto& p = c.optics;
      o.get("wavelength_m", p.wavelength_m);
      o.get("input_power_w", p.input_power_w);
      o.get("index_model", p.index_model);
      o.get("index_constant", p.index_constant);
      o.get("membrane1_thickness_m", p.membrane1_thickness_m);
      o.get("membrane2_thickness_m", p.membrane2_thickness_m);
      o.get("membrane1_reflectivity", p.membrane1_reflectivity);
      o.get("membrane2_reflectivity", p.membrane2_reflectivity);
      o.get("cavity_length_m", p.cavity_length_m);
      o.get("delta_length_m", p.delta_length_m);
      if (p.index_model != "si3n4-calibrated" && p.index_model != "si3n4-sellmeier" && p.index_model != "constant") {
        o.fail("index_model", "expected si3n4-calibrated, si3n4-sellmeier or constant");
      }
    });
    with_section(s, "mechanics", [&](Section& m) {
      auto& p = c.mechanics;
      m.get("stress_pa", p.stress_pa);
      m.get("density_kg_m3", p.density_kg_m3);
      m.get("membrane1_side_x_m", p.membrane1_side_x_m);
      m.get("membrane1_side_y_m", p.membrane1_side_y_m);
      m.get("membrane2_side_x_m", p.membrane2_side_x_m);
      m.get("membrane2_side_y_m", p.membrane2_side_y_m);
      m.get("mode_n", p.mode_n);
      m.get("mode_m", p.mode_m);
      m.get("quality1", p.quality1);
      m.get("quality2", p.quality2);
      m.get("overlap1", p.overlap1);
      m.get("overlap2", p.overlap2);
      m.get("force_n", p.force_n);
      m.get("effective_mass_kg", p.effective_mass_kg);
      m.get("correlation", p.correlation);
      m.get("piezo_beta", p.piezo_beta);
      m.get("piezo_membrane", p.piezo_membrane);
    });
    with_section(s, "detection", [&](Section& d) {
      auto& p = c.detection;
      d.get("lo_power_w", p.lo_power_w);
      d.get("lo_phase_rad", p.lo_phase_rad);
      d.get("gain_v_per_a", p.gain_v_per_a);
      d.get("responsivity_a_per_w", p.responsivity_a_per_w);
      d.get("bandwidth_rad_s", p.bandwidth_rad_s);
      d.get("noise_floor_v2_per_hz", p.noise_floor_v2_per_hz);
      d.get("level", p.level);
    });
    read_unit_grid(s, kSlabKeys, c.slab);
    read_unit_grid(s, kFringeKeys, c.fringe);
    read_unit_grid(s, kResponseKeys, c.response);
    read_unit_grid(s, kSpectrumKeys, c.spectrum);
    with_section(s, "sweep", [&](Section& w) {
      w.get("dl_min_halflambda", c.sweep.min);
      w.get("dl_max_halflambda", c.sweep.max);
      w.get("dl_points", c.sweep.points);
      w.get("overlap_ratio", c.sweep_overlap_ratio);
    });
    with_section(s, "simulate", [&](Section& m) {
      auto& p = c.simulate;
      m.get("duration_s", p.duration_s);
      m.get("subdivisions", p.subdivisions);
      m.get("amplitude1_m", p.amplitude1_m);
      m.get("amplitude2_m", p.amplitude2_m);
      m.get("frequency1_hz", p.frequency1_hz);
      m.get("frequency2_hz", p.frequency2_hz);
    });
    with_section(s, "fit", [&](Section& f) {
      auto& p = c.fit;
      f.get("data_csv", p.data_csv);
      f.get("noise_fraction", p.noise_fraction);
      f.get("wavelength_min_m", p.wavelength_min_m);
      f.get("wavelength_max_m", p.wavelength_max_m);
      f.get("points", p.points);
      f.get("initial_length_m", p.initial_length_m);
      f.get("search_fraction", p.search_fraction);
      f.get("scan_voltage_min_v", p.scan_voltage_min_v);
      f.get("scan_voltage_max_v", p.scan_voltage_max_v);
      f.get("scan_disp_per_volt_m", p.scan_disp_per_volt_m);
      f.get("scan_disp_per_volt2_m", p.scan_disp_per_volt2_m);
      f.get("disp_per_volt_guess_m", p.disp_per_volt_guess_m);
      f.get("peak_count", p.peak_count);
      f.get("thickness_guess_m", p.thickness_guess_m);
      if (const json* pts = f.find("reflectivity_points")) {
        if (!pts->is_array()) f.fail("reflectivity_points", "expected an array");
        p.reflectivity_points.clear();
        for (std::size_t i = 0; i < pts->size(); ++i) {
          Section e((*pts)[i], f.child_path("reflectivity_points"));
          ReflectivityPoint rp;
          e.get("wavelength_m", rp.wavelength_m);
          e.get("reflectivity", rp.reflectivity);
          e.get("sigma", rp.sigma);
          e.finish();
          p.reflectivity_points.push_back(rp);
        }
      }
    });
    s.finish();
    validate(c);
  } catch (const KeyError& e) {
    const auto line = locate_key(text, e.path);
    throw ParseError(src + ": line " + std::to_string(line) + ": '" + e.path + "': " + e.message);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.string());
}

namespace {

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json grid_json(const GridKeys& keys, const GridConfig& g) {
  const std::string u = unit_for(keys.stem);
  ordered_json j;
  j[std::string(keys.stem) + "_min" + u] = opt(g.min);
  j[std::string(keys.stem) + "_max" + u] = opt(g.max);
  j[keys.points] = g.points;
  return j;
}

}  // namespace

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["schema_version"] = c.schema_version;
  j["seed"] = c.seed;
  j["convention"] = convention_name(c.convention);
  const auto& o = c.optics;
  j["optics"] = {{"wavelength_m", o.wavelength_m},
                 {"input_power_w", o.input_power_w},
                 {"index_model", o.index_model},
                 {"index_constant", o.index_constant},
                 {"membrane1_thickness_m", o.membrane1_thickness_m},
                 {"membrane2_thickness_m", o.membrane2_thickness_m},
                 {"membrane1_reflectivity", opt(o.membrane1_reflectivity)},
                 {"membrane2_reflectivity", opt(o.membrane2_reflectivity)},
                 {"cavity_length_m", o.cavity_length_m},
                 {"delta_length_m", o.delta_length_m}};
  const auto& m = c.mechanics;
  j["mechanics"] = {{"stress_pa", m.stress_pa},
                    {"density_kg_m3", m.density_kg_m3},
                    {"membrane1_side_x_m", m.membrane1_side_x_m},
                    {"membrane1_side_y_m", m.membrane1_side_y_m},
                    {"membrane2_side_x_m", m.membrane2_side_x_m},
                    {"membrane2_side_y_m", m.membrane2_side_y_m},
                    {"mode_n", m.mode_n},
                    {"mode_m", m.mode_m},
                    {"quality1", m.quality1},
                    {"quality2", m.quality2},
                    {"overlap1", m.overlap1},
                    {"overlap2", m.overlap2},
                    {"force_n", m.force_n},
                    {"effective_mass_kg", opt(m.effective_mass_kg)},
                    {"correlation", m.correlation},
                    {"piezo_beta", m.piezo_beta},
                    {"piezo_membrane", m.piezo_membrane}};
  const auto& d = c.detection;
  j["detection"] = {{"lo_power_w", d.lo_power_w},
                    {"lo_phase_rad", d.lo_phase_rad},
                    {"gain_v_per_a", d.gain_v_per_a},
                    {"responsivity_a_per_w", d.responsivity_a_per_w},
                    {"bandwidth_rad_s", d.bandwidth_rad_s},
                    {"noise_floor_v2_per_hz", d.noise_floor_v2_per_hz},
                    {"level", d.level}};
  j["slab"] = grid_json(kSlabKeys, c.slab);
  j["fringe"] = grid_json(kFringeKeys, c.fringe);
  j["response"] = grid_json(kResponseKeys, c.response);
  j["spectrum"] = grid_json(kSpectrumKeys, c.spectrum);
  j["sweep"] = {{"dl_min_halflambda", opt(c.sweep.min)},
                {"dl_max_halflambda", opt(c.sweep.max)},
                {"dl_points", c.sweep.points},
                {"overlap_ratio", opt(c.sweep_overlap_ratio)}};
  const auto& s = c.simulate;
  j["simulate"] = {{"duration_s", opt(s.duration_s)},
                   {"subdivisions", s.subdivisions},
                   {"amplitude1_m", s.amplitude1_m},
                   {"amplitude2_m", s.amplitude2_m},
                   {"frequency1_hz", opt(s.frequency1_hz)},
                   {"frequency2_hz", opt(s.frequency2_hz)}};
  const auto& f = c.fit;
  auto points = ordered_json::array();
  for (const auto& p : f.reflectivity_points) {
    points.push_back({{"wavelength_m", p.wavelength_m}, {"reflectivity", p.reflectivity}, {"sigma", p.sigma}});
  }
  j["fit"] = {{"data_csv", f.data_csv},
              {"noise_fraction", f.noise_fraction},
              {"wavelength_min_m", f.wavelength_min_m},
              {"wavelength_max_m", f.wavelength_max_m},
              {"points", f.points},
              {"initial_length_m", f.initial_length_m},
              {"search_fraction", f.search_fraction},
              {"scan_voltage_min_v", f.scan_voltage_min_v},
              {"scan_voltage_max_v", f.scan_voltage_max_v},
              {"scan_disp_per_volt_m", f.scan_disp_per_volt_m},
              {"scan_disp_per_volt2_m", f.scan_disp_per_volt2_m},
              {"disp_per_volt_guess_m", f.disp_per_volt_guess_m},
              {"peak_count", f.peak_count},
              {"reflectivity_points", std::move(points)},
              {"thickness_guess_m", f.thickness_guess_m}};
  return j;
}

}  // namespace mimcav
