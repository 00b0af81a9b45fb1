#pragma once

// Run configuration: JSON, versioned, SI units in every field name.
// Unknown keys are rejected; absent keys take the defaults below, and the
// resolved form is what gets written next to the outputs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mimcav/fitters.hpp"
#include "mimcav/mechanics.hpp"

namespace mimcav {

inline constexpr int kSchemaVersion = 1;

struct OpticsConfig {
  double wavelength_m = 532e-9;
  double input_power_w = 1e-3;
  std::string index_model = "si3n4-calibrated";
  double index_constant = 2.046;
  double membrane1_thickness_m = 75.2e-9;
  double membrane2_thickness_m = 75.2e-9;
  std::optional<double> membrane1_reflectivity;  // ideal slab override
  std::optional<double> membrane2_reflectivity;
  double cavity_length_m = 5.707e-6;  // snapped to the nearest resonance
  double delta_length_m = 0.0;
};

struct MechanicsConfig {
  double stress_pa = 1e9;
  double density_kg_m3 = 3100.0;
  double membrane1_side_x_m = 0.9774e-3;
  double membrane1_side_y_m = 0.9759e-3;
  double membrane2_side_x_m = 0.9756e-3;
  double membrane2_side_y_m = 0.9773e-3;
  int mode_n = 1;
  int mode_m = 1;
  double quality1 = 1e4;
  double quality2 = 1e4;
  double overlap1 = 0.1;
  double overlap2 = 1.0;
  double force_n = 1e-12;
  std::optional<double> effective_mass_kg;
  std::string correlation = "common-drive";
  double piezo_beta = 0.0;
  int piezo_membrane = 2;
};

struct DetectionConfig {
  double lo_power_w = 1e-3;
  double lo_phase_rad = 1.5707963267948966;
  double gain_v_per_a = 1e5;
  double responsivity_a_per_w = 0.3;
  double bandwidth_rad_s = 0.0;
  double noise_floor_v2_per_hz = 0.0;
  double level = 1.0;
};

struct GridConfig {
  std::optional<double> min;
  std::optional<double> max;
  int points = 0;
};

struct SimulateConfig {
  std::optional<double> duration_s;
  int subdivisions = 64;
  double amplitude1_m = 1e-13;
  double amplitude2_m = 0.0;
  std::optional<double> frequency1_hz;  // default FSR/16
  std::optional<double> frequency2_hz;  // default FSR/10
};

struct FitConfig {
  std::string data_csv;
  double noise_fraction = 0.01;
  double wavelength_min_m = 500e-9;
  double wavelength_max_m = 900e-9;
  int points = 801;
  double initial_length_m = 0.0;
  double search_fraction = 0.1;
  double scan_voltage_min_v = 0.0;
  double scan_voltage_max_v = 100.0;
  double scan_disp_per_volt_m = 12e-9;
  double scan_disp_per_volt2_m = 2e-11;
  double disp_per_volt_guess_m = 0.0;
  int peak_count = 2;
  std::vector<ReflectivityPoint> reflectivity_points{
      {532e-9, 0.3618, 0.0003}, {632.8e-9, 0.3571, 0.0003}, {980e-9, 0.2652, 0.0001}};
  double thickness_guess_m = 0.0;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  FrequencyConvention convention = FrequencyConvention::half_factor;
  OpticsConfig optics;
  MechanicsConfig mechanics;
  DetectionConfig detection;
  GridConfig slab{400e-9, 1100e-9, 701};        // wavelength_m
  GridConfig fringe{-0.5e-6, 0.5e-6, 1001};     // displacement_m
  GridConfig response{0.0, std::nullopt, 801};  // frequency_hz, default max 2 FSR
  GridConfig spectrum{std::nullopt, std::nullopt, 801};
  GridConfig sweep{0.0, 2.0, 81};  // dl_halflambda
  std::optional<double> sweep_overlap_ratio;
  SimulateConfig simulate;
  FitConfig fit;
};

std::string_view convention_name(FrequencyConvention c);
FrequencyConvention parse_convention(std::string_view name);

/// Throws ParseError; messages carry "line N" for the offending text.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Fully expanded, defaults included.
nlohmann::ordered_json config_to_json(const RunConfig& config);

}  // namespace mimcav
