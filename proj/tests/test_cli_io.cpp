#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "mimcav/cli.hpp"
#include "mimcav/config.hpp"
#include "mimcav/errors.hpp"
#include "mimcav/fitters.hpp"
#include "mimcav/io.hpp"
#include "property.hpp"

using namespace mimcav;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::current_path() / "cli_io_scratch" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("series round trip is exact") {
  const auto dir = scratch("series");
  SUBCASE("minimal two-point series") {
    const SpectrumSeries s{"wavelength_nm", "transmission_norm", {500.0, 501.5}, {0.25, 1.0 / 3.0}};
    io::write_series(dir / "s.csv", s);
    CHECK(io::read_series(dir / "s.csv", "wavelength_nm", "transmission_norm") == s);
  }
  SUBCASE("arbitrary doubles") {
    prop::for_all(20, 801, [&](prop::Gen& g, int) -> std::string {
      SpectrumSeries s{"freq_hz", "psd_v2_hz", {}, {}};
      for (int i = 0; i < 50; ++i) {
        s.x.push_back(g.log_real(1e-300, 1e300) * (g.integer(0, 1) ? 1 : -1));
        s.y.push_back(g.real(-1.0, 1.0) * std::pow(10.0, g.integer(-30, 30)));
      }
      s.y.push_back(std::numeric_limits<double>::denorm_min());
      s.x.push_back(std::numeric_limits<double>::max());
      io::write_series(dir / "p.csv", s);
      if (!(io::read_series(dir / "p.csv", "freq_hz", "psd_v2_hz") == s)) return "round trip differs";
      return {};
    });
  }
}

TEST_CASE("csv parse errors name the problem") {
  const auto dir = scratch("errors");
  write_file(dir / "nan.csv", "freq_hz,psd_v2_hz\n1,2\n3,nan\n");
  const auto nan_msg = message_of([&] { io::read_series(dir / "nan.csv", "freq_hz", "psd_v2_hz"); });
  CHECK(nan_msg.find("row 1") != std::string::npos);
  CHECK(nan_msg.find("psd_v2_hz") != std::string::npos);

  write_file(dir / "missing.csv", "freq_hz\n1\n");
  CHECK(message_of([&] { io::read_series(dir / "missing.csv", "freq_hz", "psd_v2_hz"); }).find("'psd_v2_hz'") !=
        std::string::npos);
  write_file(dir / "extra.csv", "freq_hz,psd_v2_hz,comment\n1,2,3\n");
  CHECK(message_of([&] { io::read_series(dir / "extra.csv", "freq_hz", "psd_v2_hz"); }).find("'comment'") !=
        std::string::npos);
  write_file(dir / "ragged.csv", "a,b\n1,2\n3\n");
  CHECK_THROWS_AS(io::read_csv(dir / "ragged.csv"), ParseError);
  CHECK_THROWS_AS(io::read_csv(dir / "absent.csv"), ParseError);
}

TEST_CASE("sweep map formats") {
  const auto dir = scratch("map");
  SweepMap map{{0.0, 0.5, 1.0}, {10.0, 20.0}, {1e-20, 2e-20, 3.5e-19, 4e-18, 0.1, 1.0 / 7.0}};
  io::write_map_csv(dir / "m.csv", map);
  CHECK(io::read_map_csv(dir / "m.csv") == map);
  const auto j = io::map_to_json(map);
  CHECK(j["psd_rows"].size() == 3);
  CHECK(io::map_from_json(nlohmann::json::parse(j.dump())) == map);
  const auto header = io::read_text(dir / "m.csv").substr(0, 34);
  CHECK(header == "dL_over_halflambda,freq_hz,psd_v2_");
}

TEST_CASE("field record and fit result formats") {
  const auto dir = scratch("field");
  FieldRecord rec;
  rec.t = {0.0, 1e-15};
  rec.cavity = {{1, 2}, {3, 4}};
  rec.transmitted = {{5, 6}, {7, 8}};
  rec.reflected = {{9, 10}, {11, 12}};
  io::write_field_record(dir / "f.csv", rec);
  const auto t = io::read_csv(dir / "f.csv");
  CHECK(t.header == std::vector<std::string>{"t_s", "reE", "imE", "reEt", "imEt", "reEr", "imEr"});
  CHECK(t.column("imEr")[1] == 12.0);

  FitResult fit;
  fit.parameters = {{"length_m", "m", 5.707e-6, 2e-9}};
  fit.converged = true;
  const auto j = io::fit_to_json(fit);
  CHECK(j["parameters"][0]["name"] == "length_m");
  CHECK(j["converged"] == true);
}

TEST_CASE("configuration schema") {
  SUBCASE("defaults and resolved form round trip") {
    const auto c = parse_config(R"({"schema_version": 1})");
    CHECK(c.optics.wavelength_m == 532e-9);
    const auto resolved = config_to_json(c).dump();
    CHECK(config_to_json(parse_config(resolved)).dump() == resolved);
  }
  SUBCASE("unknown keys are rejected with a line number") {
    const auto msg = message_of([] { parse_config("{\n  \"schema_version\": 1,\n  \"optics\": {\n    \"wavelenght_m\": 5e-7\n  }\n}"); });
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("optics.wavelenght_m") != std::string::npos);
  }
  SUBCASE("malformed JSON reports its line") {
    const auto msg = message_of([] { parse_config("{\n \"schema_version\": 1,\n \"seed\": ,\n}"); });
    CHECK(msg.find("line 3") != std::string::npos);
  }
  SUBCASE("schema version is required and checked") {
    CHECK_THROWS_AS(parse_config(R"({"seed": 1})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 2})"), ParseError);
  }
  SUBCASE("types and ranges are checked") {
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "seed": "x"})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "optics": {"wavelength_m": -1}})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "mechanics": {"mode_n": 1.5}})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "convention": "other"})"), ParseError);
  }
}

TEST_CASE("command exit codes") {
  const auto dir = scratch("commands");
  std::string err;
  for (const char* cmd : {"slab", "fringe", "response", "spectrum", "fit-thickness", "selftest"}) {
    CAPTURE(cmd);
    CHECK(run({cmd, "--out", (dir / cmd).string()}) == kExitOk);
    CHECK(fs::exists(dir / cmd / "provenance.json"));
  }
  CHECK(run({"nonsense"}) == kExitDomain);
  CHECK(run({}) == kExitDomain);

  write_file(dir / "bad.json", "{\n \"schema_version\": 1,\n \"optics\": {\"colour\": 1}\n}\n");
  CHECK(run({"slab", "--config", (dir / "bad.json").string(), "--out", (dir / "x").string()}, &err) == kExitDomain);
  CHECK(err.find("line 3") != std::string::npos);

  // A segment without peaks cannot converge.
  std::string flat = "freq_hz,psd_v2_hz\n";
  for (int i = 0; i < 200; ++i) flat += std::to_string(400000 + i) + "," + (i % 2 ? "1.0" : "1.1") + "\n";
  write_file(dir / "flat.csv", flat);
  write_file(dir / "flat.json", R"({"schema_version": 1, "fit": {"data_csv": ")" + (dir / "flat.csv").string() + "\"}}");
  CHECK(run({"fit-lorentzian", "--config", (dir / "flat.json").string(), "--out", (dir / "flat").string()}) ==
        kExitNoConvergence);
}

TEST_CASE("spectrometer files in nanometres are accepted") {
  const auto dir = scratch("ingest");
  std::vector<double> lambda_m, lambda_nm;
  for (int i = 0; i < 601; ++i) {
    lambda_nm.push_back(550.0 + 0.5 * i);
    lambda_m.push_back(lambda_nm.back() * 1e-9);
  }
  const auto y = airy_wavelength_curve(lambda_m, 5.707e-6, 75.2e-9, IndexModel::si3n4_calibrated(), 1.0);
  io::write_csv(dir / "spectrum.csv", {"wavelength_nm", "transmission_norm"}, {&lambda_nm, &y});
  write_file(dir / "cfg.json", R"({"schema_version": 1, "fit": {"data_csv": ")" + (dir / "spectrum.csv").string() + "\"}}");
  REQUIRE(run({"fit-airy-lambda", "--config", (dir / "cfg.json").string(), "--out", (dir / "out").string()}) ==
          kExitOk);
  const auto fit = nlohmann::json::parse(io::read_text(dir / "out" / "fit.json"));
  CHECK(fit["parameters"][0]["value"].get<double>() == doctest::Approx(5.707e-6).epsilon(1e-9));
}

TEST_CASE("overrides land in the provenance record") {
  const auto dir = scratch("override");
  REQUIRE(run({"slab", "--out", dir.string(), "--seed", "99", "--convention", "as-written"}) == kExitOk);
  const auto prov = nlohmann::json::parse(io::read_text(dir / "provenance.json"));
  CHECK(prov["config"]["seed"] == 99);
  CHECK(prov["config"]["convention"] == "as-written");
  CHECK(prov["derived"]["mode1_freq_hz"].get<double>() > 800e3);
  CHECK(prov["rng_algorithm"].get<std::string>().find("mt19937_64") != std::string::npos);
}
