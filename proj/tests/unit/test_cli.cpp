#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "critkerr/cli.hpp"
#include "critkerr/error.hpp"

namespace fs = std::filesystem;
using namespace critkerr;
using namespace critkerr::cli;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = main_entry(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("critkerr-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<fs::path> files(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> v;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ext) v.push_back(e.path());
  std::sort(v.begin(), v.end());
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidParameter;
}

}  // namespace

TEST_CASE("frequency parsing") {
  const double ref = 1e7;
  CHECK(parse_frequency("0.5", ref) == 0.5);
  CHECK(parse_frequency("0.5wb", ref) == 0.5);
  CHECK(parse_frequency("500kHz", ref) == doctest::Approx(0.05));
  CHECK(parse_frequency("1kHz", ref) == doctest::Approx(1e-4));
  CHECK(parse_frequency("10MHz", ref) == doctest::Approx(1.0));
  CHECK(parse_frequency("2.5e3 Hz", ref) == doctest::Approx(2.5e-4));
  CHECK(kind_of([&] { parse_frequency("5 GHz", ref); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { parse_frequency("5 khz", ref); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { parse_frequency("fast", ref); }) == ErrorKind::ConfigError);
  CHECK(parse_reference("10MHz") == doctest::Approx(1e7));
  CHECK(kind_of([&] { parse_reference("1.0"); }) == ErrorKind::ConfigError);
}

TEST_CASE("phase parsing") {
  CHECK(parse_phase("pi/2") == doctest::Approx(std::numbers::pi / 2));
  CHECK(parse_phase("2pi/3") == doctest::Approx(2 * std::numbers::pi / 3));
  CHECK(parse_phase("-pi") == doctest::Approx(-std::numbers::pi));
  CHECK(parse_phase("0.25") == 0.25);
  CHECK(kind_of([&] { parse_phase("pi/0"); }) == ErrorKind::ConfigError);
}

TEST_CASE("sweep axes end exactly on the stop value") {
  const SweepAxis lin{"G", 0.0, 0.559, 50, false};
  const auto v = lin.values();
  CHECK(v.size() == 50);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 0.559);
  const SweepAxis lg{"dG", 1e-7, 1e-3, 5, true};
  const auto w = lg.values();
  CHECK(w[1] == doctest::Approx(1e-6));
  CHECK(w.back() == 1e-3);
}

TEST_CASE("critical command prints the critical coupling") {
  const Result r = invoke({"critical", "--no-write"});
  CHECK(r.code == 0);
  CHECK(r.out.find("G_cp = 0.5592406") != std::string::npos);
}

TEST_CASE("unknown options and config keys are reported together") {
  const fs::path dir = fresh_dir("unknown");
  const fs::path cfg = dir / "bad.toml";
  std::ofstream(cfg) << "G = 0.4\nbogus = 1\nalso_bogus = 2\n";
  const Result r = invoke({"kerr", "--config", cfg.string(), "--no-write", "--whatever", "3"});
  CHECK(r.code == kConfigError);
  CHECK(r.err.find("bogus") != std::string::npos);
  CHECK(r.err.find("also_bogus") != std::string::npos);
  CHECK(r.err.find("--whatever") != std::string::npos);
}

TEST_CASE("config errors exit with code 1") {
  CHECK(invoke({"kerr", "--G", "0.4", "--delta-c", "-1", "--no-write"}).code == kConfigError);
  CHECK(invoke({"kerr", "--kappa-a", "7 furlongs", "--no-write"}).code == kConfigError);
  CHECK(invoke({"sweep", "--from", "1", "--to", "0", "--no-write"}).code == kConfigError);
  CHECK(invoke({}).code == kConfigError);
}

TEST_CASE("beyond the critical point is a numerical error") {
  CHECK(invoke({"kerr", "--G", "0.6", "--no-write"}).code == kNumericalFailure);
}

TEST_CASE("sweep output is worker independent and replayable") {
  const fs::path a = fresh_dir("w1"), b = fresh_dir("w4"), c = fresh_dir("replay");
  const std::vector<std::string> base = {"sweep", "--mode", "kerr", "--from", "0", "--to", "0.559", "--steps", "40"};
  auto with = [&](const fs::path& dir, const std::string& workers) {
    auto v = base;
    v.insert(v.end(), {"--out", dir.string(), "--workers", workers});
    return v;
  };
  REQUIRE(invoke(with(a, "1")).code == kSuccess);
  REQUIRE(invoke(with(b, "4")).code == kSuccess);
  const auto fa = files(a, ".csv"), fb = files(b, ".csv");
  REQUIRE(fa.size() == 1);
  REQUIRE(fb.size() == 1);
  const std::string body = strip_timestamp(slurp(fa[0]));
  CHECK(body == strip_timestamp(slurp(fb[0])));

  REQUIRE(invoke({"replay", fa[0].string(), "--out", c.string(), "--workers", "2"}).code == kSuccess);
  const auto fc = files(c, ".csv");
  REQUIRE(fc.size() == 1);
  CHECK(body == strip_timestamp(slurp(fc[0])));

  std::istringstream in(body);
  std::string line, header;
  std::vector<double> eta;
  std::size_t col = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (header.empty()) {
      header = line;
      col = static_cast<std::size_t>(std::find(cells.begin(), cells.end(), "eta") - cells.begin());
      REQUIRE(col < cells.size());
      continue;
    }
    eta.push_back(std::stod(cells[col]));
  }
  REQUIRE(eta.size() == 40);
  for (std::size_t i = 1; i < eta.size(); ++i) CHECK(eta[i] > eta[i - 1]);
}

TEST_CASE("config files set options and are recorded as provenance") {
  const fs::path dir = fresh_dir("config");
  std::ofstream(dir / "p.toml") << "G = \"0.3\"\nkappa-minus = \"50kHz\"\n";
  const Result r = invoke({"kerr", "--config", (dir / "p.toml").string(), "--out", dir.string()});
  REQUIRE(r.code == kSuccess);
  const auto out = files(dir, ".json");
  REQUIRE(out.size() == 1);
  const auto doc = nlohmann::json::parse(slurp(out[0]));
  CHECK(doc["provenance"]["command"] == "kerr");
  const std::string config = doc["provenance"]["config"];
  CHECK(config.find("\nG=0.3\n") != std::string::npos);
  CHECK(config.find("kappa-minus=\"50kHz\"") != std::string::npos);
}
