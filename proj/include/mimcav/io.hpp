#pragma once

// CSV and JSON formats. Numbers are written with 17 significant digits so
// read(write(x)) reproduces every double exactly.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "mimcav/field_dynamics.hpp"
#include "mimcav/fitters.hpp"
#include "mimcav/series.hpp"

namespace mimcav::io {

std::string format_double(double v);

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  bool has(std::string_view name) const;
  const std::vector<double>& column(std::string_view name) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Header row required; every cell must parse as a finite number.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text, std::string source = "<memory>");

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns);

/// The file must hold exactly the two named columns.
SpectrumSeries read_series(const std::filesystem::path& path, std::string_view x_name, std::string_view y_name);
void write_series(const std::filesystem::path& path, const SpectrumSeries& series);

/// Columns t_s, reE, imE, reEt, imEt, reEr, imEr.
void write_field_record(const std::filesystem::path& path, const FieldRecord& record);

/// Long form: dL_over_halflambda, freq_hz, psd_v2_hz (row-major order).
void write_map_csv(const std::filesystem::path& path, const SweepMap& map);
SweepMap read_map_csv(const std::filesystem::path& path);
nlohmann::ordered_json map_to_json(const SweepMap& map);
SweepMap map_from_json(const nlohmann::json& j);

nlohmann::ordered_json fit_to_json(const FitResult& fit);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
std::string read_text(const std::filesystem::path& path);

}  // namespace mimcav::io
