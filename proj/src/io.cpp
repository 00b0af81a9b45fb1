#include "mimcav/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mimcav/errors.hpp"

namespace mimcav::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool CsvTable::has(std::string_view name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

const std::vector<double>& CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError(source + ": missing column '" + std::string(name) + "'");
  return columns[static_cast<std::size_t>(it - header.begin())];
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

CsvTable parse_csv(std::string_view text, std::string source) {
  CsvTable table;
  table.source = std::move(source);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto cells = split(t);
    if (!have_header) {
      for (const auto& c : cells) {
        if (c.empty()) throw ParseError(table.source + ": empty column name in header");
        if (std::count(cells.begin(), cells.end(), c) > 1) {
          throw ParseError(table.source + ": duplicate column '" + c + "'");
        }
      }
      table.header = std::move(cells);
      table.columns.resize(table.header.size());
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ParseError(table.source + ":" + std::to_string(line_no) + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, header has " + std::to_string(table.header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const char* begin = cells[c].c_str();
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      if (cells[c].empty() || end != begin + cells[c].size() || !std::isfinite(v)) {
        throw ParseError(table.source + ":" + std::to_string(line_no) + ": row " + std::to_string(row) +
                         ", column '" + table.header[c] + "': '" + cells[c] + "' is not a finite number");
      }
      table.columns[c].push_back(v);
    }
    ++row;
  }
  if (!have_header) throw ParseError(table.source + ": missing header row");
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path), path.string()); }

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns) {
  if (header.size() != columns.size()) throw DomainError("header and column count differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
  for (const auto* c : columns) {
    if (c->size() != rows) throw DomainError("columns differ in length");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << format_double((*columns[i])[r]);
    out << '\n';
  }
}

SpectrumSeries read_series(const std::filesystem::path& path, std::string_view x_name, std::string_view y_name) {
  const auto table = read_csv(path);
  for (const auto& h : table.header) {
    if (h != x_name && h != y_name) throw ParseError(table.source + ": unknown column '" + h + "'");
  }
  SpectrumSeries s;
  s.x_name = x_name;
  s.y_name = y_name;
  s.x = table.column(x_name);
  s.y = table.column(y_name);
  return s;
}

void write_series(const std::filesystem::path& path, const SpectrumSeries& series) {
  write_csv(path, {series.x_name, series.y_name}, {&series.x, &series.y});
}

void write_field_record(const std::filesystem::path& path, const FieldRecord& record) {
  const std::size_t n = record.size();
  std::vector<std::vector<double>> cols(6, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cols[0][i] = record.cavity[i].real();
    cols[1][i] = record.cavity[i].imag();
    cols[2][i] = record.transmitted[i].real();
    cols[3][i] = record.transmitted[i].imag();
    cols[4][i] = record.reflected[i].real();
    cols[5][i] = record.reflected[i].imag();
  }
  write_csv(path, {"t_s", "reE", "imE", "reEt", "imEt", "reEr", "imEr"},
            {&record.t, &cols[0], &cols[1], &cols[2], &cols[3], &cols[4], &cols[5]});
}

void write_map_csv(const std::filesystem::path& path, const SweepMap& map) {
  std::vector<double> dl, f;
  dl.reserve(map.psd.size());
  f.reserve(map.psd.size());
  for (double d : map.dl_grid) {
    for (double x : map.freq_grid) {
      dl.push_back(d);
      f.push_back(x);
    }
  }
  write_csv(path, {"dL_over_halflambda", "freq_hz", "psd_v2_hz"}, {&dl, &f, &map.psd});
}

SweepMap read_map_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto& dl = table.column("dL_over_halflambda");
  const auto& f = table.column("freq_hz");
  SweepMap map;
  map.psd = table.column("psd_v2_hz");
  for (std::size_t i = 0; i < dl.size(); ++i) {
    if (map.dl_grid.empty() || map.dl_grid.back() != dl[i]) map.dl_grid.push_back(dl[i]);
    if (map.dl_grid.size() == 1) map.freq_grid.push_back(f[i]);
  }
  if (map.dl_grid.size() * map.freq_grid.size() != map.psd.size()) {
    throw ParseError(table.source + ": map is not a full rectangular grid");
  }
  return map;
}

nlohmann::ordered_json map_to_json(const SweepMap& map) {
  nlohmann::ordered_json j;
  j["dl_grid"] = map.dl_grid;
  j["freq_grid"] = map.freq_grid;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < map.dl_grid.size(); ++r) {
    const auto begin = map.psd.begin() + static_cast<std::ptrdiff_t>(r * map.freq_grid.size());
    rows.push_back(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(map.freq_grid.size())));
  }
  j["psd_rows"] = std::move(rows);
  return j;
}

SweepMap map_from_json(const nlohmann::json& j) {
  SweepMap map;
  try {
    map.dl_grid = j.at("dl_grid").get<std::vector<double>>();
    map.freq_grid = j.at("freq_grid").get<std::vector<double>>();
    for (const auto& row : j.at("psd_rows")) {
      const auto values = row.get<std::vector<double>>();
      if (values.size() != map.freq_grid.size()) throw ParseError("psd row length differs from freq_grid");
      map.psd.insert(map.psd.end(), values.begin(), values.end());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sweep map json: ") + e.what());
  }
  if (map.psd.size() != map.dl_grid.size() * map.freq_grid.size()) throw ParseError("psd_rows count differs from dl_grid");
  return map;
}

nlohmann::ordered_json fit_to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  auto params = nlohmann::ordered_json::array();
  for (const auto& p : fit.parameters) {
    nlohmann::ordered_json e;
    e["name"] = p.name;
    e["unit"] = p.unit;
    e["value"] = p.value;
    e["sigma"] = p.sigma;
    params.push_back(std::move(e));
  }
  j["parameters"] = std::move(params);
  j["residual_norm"] = fit.residual_norm;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["warnings"] = fit.warnings;
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace mimcav::io
