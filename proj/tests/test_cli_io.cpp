#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ceik/io.hpp"

using namespace ceik;
using io::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ceik_test_cli_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

json hyperbola_config() {
  return json::parse(R"({"f": {"type": "laurent", "terms": [[0, -1], [2, -1]]},
                         "n": {"type": "constant"}})");
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string s; std::getline(in, s);) out.push_back(s);
  return out;
}

}  // namespace

TEST_CASE("analytic function specs") {
  const AnalyticFunction f = io::parse_f(json::parse(R"({"type":"laurent","terms":[[0,-1],[2,-1,0.5]]})"));
  CHECK(f.coefficient(2) == cplx{-1.0, 0.5});
  CHECK(io::parse_f(json::parse(R"({"type":"poisson","tau":1.0})")).kind() ==
        AnalyticFunction::Kind::poisson);
  const AnalyticFunction e = io::parse_f(json::parse(R"({"type":"exponential","coeff":[2,0],"rate":[0,1]})"));
  CHECK(std::abs(e(0.5) - 2.0 * std::exp(cplx{0.0, 0.5})) < 1e-15);
  for (const char* bad : {R"({"type":"laurent","terms":[]})", R"({"type":"laurent","terms":[[1]]})",
                          R"({"type":"laurent","terms":[[1,2]],"extra":1})", R"({"type":"bessel"})",
                          R"({"type":"poisson"})", R"({"type":"poisson","tau":1,"profile":"ramp"})",
                          R"({"type":"laurent","terms":[[1,1],[1,2]]})", R"([1,2])"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(io::parse_f(json::parse(bad)), ConfigError);
  }
}

TEST_CASE("refraction index specs") {
  CHECK(io::parse_n(json::parse(R"({"type":"constant","n0":2})")).kind() ==
        RefractionField::Kind::constant);
  CHECK(io::parse_n(json::parse(R"({"type":"mod-analytic","w":{"type":"laurent","terms":[[1,1]]}})"))
            .kind() == RefractionField::Kind::mod_analytic);
  CHECK(io::parse_n(json::parse(
                        R"({"type":"parametric-ell","ell":{"profile":"gaussian","amplitude":0.1}})"))
            .kind() == RefractionField::Kind::parametric_ell);
  for (const char* bad : {R"({"type":"constant","n0":-1})", R"({"type":"mod-analytic"})",
                          R"({"type":"parametric-ell","ell":{"profile":"ramp"}})",
                          R"({"type":"parametric-ell","ell":{"width":0}})", R"({"type":"glass"})"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(io::parse_n(json::parse(bad)), ConfigError);
  }
}

TEST_CASE("config defaults and validation") {
  const io::RunConfig c = io::parse_config(hyperbola_config());
  CHECK(c.grid.resolution == 21);
  CHECK(c.tol == 1e-8);
  CHECK(c.caustic_samples == 4096);
  CHECK(c.outputs == std::set<std::string>{"csv", "json"});

  json j = hyperbola_config();
  j["grid"]["resolution"] = 15;
  CHECK_THROWS_AS(io::parse_config(j), ConfigError);
  j = hyperbola_config();
  j["grid"]["zeta_min"] = {1, 1};
  j["grid"]["zeta_max"] = {0, 2};
  CHECK_THROWS_AS(io::parse_config(j), ConfigError);
  j = hyperbola_config();
  j["outputs"] = {"csv", "png"};
  CHECK_THROWS_AS(io::parse_config(j), ConfigError);
  j = hyperbola_config();
  j["tolerances"]["loop"] = 0.0;
  CHECK_THROWS_AS(io::parse_config(j), ConfigError);
  j = hyperbola_config();
  j.erase("n");
  CHECK_THROWS_AS(io::parse_config(j), ConfigError);
  j = hyperbola_config();
  j["colour"] = "red";
  CHECK_THROWS_AS(io::parse_config(j), ConfigError);
}

TEST_CASE("number formatting reads back exactly") {
  for (const double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 1e-12}) {
    CHECK(std::stod(io::fmt_num(x)) == x);
  }
  CHECK(io::fmt_num(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(io::fmt_num(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("residual from parametric derivatives") {
  // z = zeta, phi = zeta conj(zeta): 4 phi_z phi_zbar = 4 |z|^2.
  const cplx zeta{0.3, 0.4};
  CHECK(io::residual_from_derivatives(std::conj(zeta), zeta, 1.0, 0.0, 1.0) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(io::residual_from_derivatives(std::conj(zeta), zeta, 1.0, 0.0, 2.0) ==
        doctest::Approx(3.0));
  CHECK(std::isnan(io::residual_from_derivatives(1.0, 1.0, 1.0, 1.0, 1.0)));
}

TEST_CASE("constant run, verify and tamper detection") {
  const fs::path dir = scratch("constant");
  const fs::path cfg = write_config(dir, hyperbola_config());
  std::ostringstream log;
  io::Invocation inv{"constant", cfg, dir / "out", 24, std::nullopt, std::nullopt};
  REQUIRE(io::run(inv, log) == io::kExitOk);
  CHECK(fs::exists(dir / "out" / "constant.csv"));
  const json m = json::parse(std::ifstream(dir / "out" / "manifest.json"));
  CHECK(m.at("subcommand") == "constant");
  CHECK(m.at("config").at("grid").at("resolution") == 24);

  io::Invocation ver{"verify", {}, dir / "out", std::nullopt, std::nullopt, std::nullopt};
  std::ostringstream vlog;
  CHECK(io::run(ver, vlog) == io::kExitOk);

  // Shift one recorded z value in the last digit it prints.
  const fs::path csv = dir / "out" / "constant.csv";
  std::vector<std::string> lines = read_lines(csv);
  REQUIRE(lines.size() > 2);
  std::vector<std::string> head;
  {
    std::stringstream ss(lines[0]);
    for (std::string s; std::getline(ss, s, ',');) head.push_back(s);
  }
  const auto col = std::find(head.begin(), head.end(), "z_re") - head.begin();
  std::vector<std::string> cells;
  {
    std::stringstream ss(lines[1]);
    for (std::string s; std::getline(ss, s, ',');) cells.push_back(s);
  }
  cells[col] = io::fmt_num(std::stod(cells[col]) + 1e-6);
  std::string row;
  for (std::size_t k = 0; k < cells.size(); ++k) row += (k ? "," : "") + cells[k];
  lines[1] = row;
  {
    std::ofstream out(csv);
    for (const auto& s : lines) out << s << "\n";
  }
  std::ostringstream tlog;
  CHECK(io::run(ver, tlog) == io::kExitGates);
  CHECK(tlog.str().find("FAIL") != std::string::npos);
}

TEST_CASE("gate failure and input errors map to exit codes") {
  const fs::path dir = scratch("gates");
  const fs::path cfg = write_config(dir, hyperbola_config());
  std::ostringstream log;
  io::Invocation tight{"constant", cfg, dir / "out", 16, 1e-20, std::string("csv,json")};
  CHECK(io::run(tight, log) == io::kExitGates);

  io::Invocation missing{"constant", dir / "nope.json", dir / "out2", {}, {}, {}};
  CHECK(io::run(missing, log) == io::kExitError);

  json j = hyperbola_config();
  j["n"] = json::parse(R"({"type":"parametric-ell","ell":{"profile":"gaussian"}})");
  io::Invocation cls{"classify", write_config(dir, j), dir / "out3", {}, {}, {}};
  CHECK(io::run(cls, log) == io::kExitError);

  io::Invocation unknown{"draw", cfg, dir / "out4", {}, {}, {}};
  CHECK(io::run(unknown, log) == io::kExitError);
}
