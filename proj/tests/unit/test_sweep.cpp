// Copyright 2026 The thzsource Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <string>

#include <doctest.h>

#include "thz/error.hpp"
#include "thz/sweep.hpp"

using namespace thz;

namespace {

const char* kSmall = R"({
  "name": "small",
  "axes": [
    {"name": "log10_kappa_over_gamma", "range": {"start": 1.0, "stop": 3.0, "num": 3}},
    {"name": "omega_rabi", "values": [20.0, 26.0]}
  ],
  "fixed": {"omega": 10.0},
  "observables": ["flux", "g2_zero", "flux_analytic"],
  "n_max": 3
})";

}  // namespace

TEST_CASE("config errors carry pointer and line") {
  const std::string text = "{\n  \"axes\": [\n    {\"name\": \"omega\",\n     \"values\": [1, \"x\"]}\n  ]\n}\n";
  try {
    parse_sweep_spec(text);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.pointer() == "/axes/0/values/1");
    CHECK(e.line() == 4);
  }
  try {
    parse_sweep_spec("{\n \"fixed\": {\"chi\": 0.05},\n \"bogus\": 1\n}");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.pointer() == "/bogus");
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_sweep_spec("{\"observables\": [\"nope\"]}"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_spec("{\"fixed\": {\"nope\": 1}}"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_spec("{\"variant\": {\"dissipator\": \"other\"}}"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_spec("{\"n_max\": 0}"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_spec("{ not json"), ConfigError);
  CHECK(json_line_of(kSmall, "/fixed/omega") == 7);
}

TEST_CASE("grids") {
  const auto lin = linspace(0.0, 1.0, 5);
  REQUIRE(lin.size() == 5);
  CHECK(lin.front() == 0.0);
  CHECK(lin.back() == 1.0);
  CHECK(lin[2] == doctest::Approx(0.5));
  const auto lg = logspace(1e-3, 1e3, 7);
  REQUIRE(lg.size() == 7);
  CHECK(lg.front() == doctest::Approx(1e-3));
  CHECK(lg.back() == doctest::Approx(1e3));
  CHECK(lg[3] == doctest::Approx(1.0));
}

TEST_CASE("sweep output round trips and is worker independent") {
  SweepSpec spec = parse_sweep_spec(kSmall);
  CHECK(spec.cell_count() == 6);
  spec.workers = 1;
  const std::string serial = to_csv(run_sweep(spec));
  spec.workers = 3;
  const ResultGrid par = run_sweep(spec);
  CHECK(to_csv(par) == serial);
  REQUIRE(par.rows() == 6);
  for (std::size_t r = 0; r < par.rows(); ++r) {
    REQUIRE(par.value(r, "flux").has_value());
    CHECK(*par.value(r, "flux") > 0.0);
    CHECK(par.missing_reason[r].empty());
  }

  SweepSpec expected = spec;
  expected.workers = 1;
  CHECK(spec_from_csv(serial) == expected);
  CHECK(parse_sweep_spec(spec_to_json(expected)) == expected);
  CHECK(to_json(par).find("\"wall_seconds\"") != std::string::npos);
}

TEST_CASE("undefined observables become missing values") {
  SweepSpec spec = parse_sweep_spec(R"({"axes": [{"name": "chi", "values": [0.0, 0.05]}],
                                         "observables": ["flux", "g2_zero"], "n_max": 3})");
  const ResultGrid g = run_sweep(spec);
  REQUIRE(g.rows() == 2);
  CHECK(g.value(0, "flux").has_value());
  CHECK_FALSE(g.value(0, "g2_zero").has_value());
  CHECK_FALSE(g.missing_reason[0].empty());
  CHECK(g.value(1, "g2_zero").has_value());
  CHECK(g.missing_reason[1].empty());
  const std::string csv = to_csv(g);
  CHECK(csv.find(",,") != std::string::npos);
}

TEST_CASE("number formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, 4.3921e-4, -2.5e-300, 1e22}) {
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("resolve point") {
  SweepSpec spec = parse_sweep_spec(R"({"fixed": {"omega_rabi": 40.0, "omega": 10.0}})");
  const CellPoint cp = resolve_point(spec, {});
  CHECK(cp.params.omega_rabi() == doctest::Approx(2.0 * 3.141592653589793 * 40.0).epsilon(1e-12));
  CHECK(cp.linewidth == doctest::Approx(cp.params.kappa));
  CHECK_THROWS_AS(resolve_point(parse_sweep_spec(R"({"fixed": {"kappa": 0.1, "log10_kappa_over_gamma": 2}})"), {}),
                  DomainError);
}

TEST_CASE("presets") {
  const auto& names = preset_names();
  CHECK(names.size() >= 10);
  CHECK_THROWS_AS(run_preset("fig99"), UnknownPreset);
}
