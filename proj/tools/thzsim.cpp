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

// thzsim: command-line front end for steady states, sweeps, spectra,
// correlation maps, feasibility tables and predefined grids.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "thz/error.hpp"
#include "thz/sweep.hpp"

namespace {

enum Exit : int { kOk = 0, kConfig = 2, kPreset = 3, kNumerical = 4, kUsage = 64, kInternal = 70 };

struct Options {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::string method;
  std::size_t workers = 0;
  int nmax = 0;
  bool strict = false;
  std::string preset;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw thz::ConfigError("", 0, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

thz::SweepSpec load_spec(const Options& o) {
  thz::SweepSpec spec = o.config.empty() ? thz::SweepSpec{} : thz::parse_sweep_spec(read_file(o.config));
  if (o.workers > 0) spec.workers = o.workers;
  if (o.nmax > 0) spec.n_max = o.nmax;
  if (o.strict) spec.sensor.strict = true;
  if (!o.method.empty()) spec.spectrum_method = o.method;
  spec.validate();
  return spec;
}

std::string render(const thz::ResultGrid& g, const std::string& format) {
  return format == "json" ? thz::to_json(g) : thz::to_csv(g);
}

void emit(const thz::ResultGrid& g, const Options& o) {
  const std::string text = render(g, o.format);
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw thz::Error("cannot write '" + o.out + "'");
  f << text;
}

// Single-point commands fail when any requested value could not be produced.
int emit_point(const thz::ResultGrid& g, const Options& o) {
  emit(g, o);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    if (!g.missing_reason[r].empty()) {
      std::cerr << "thzsim: " << g.missing_reason[r] << "\n";
      return kNumerical;
    }
  }
  return kOk;
}

thz::SweepSpec as_point(thz::SweepSpec spec, std::vector<std::string> default_observables) {
  if (!spec.axes.empty()) throw thz::DomainError("this command evaluates a single point; remove 'axes'");
  if (spec.observables.empty()) spec.observables = std::move(default_observables);
  return spec;
}

int run_command(const std::string& cmd, const Options& o) {
  if (cmd == "preset") {
    thz::PresetOptions po;
    if (o.workers > 0) po.workers = o.workers;
    if (o.nmax > 0) po.n_max = o.nmax;
    po.strict = o.strict;
    const auto grids = thz::run_preset(o.preset, po);
    const std::string ext = o.format == "json" ? ".json" : ".csv";
    if (o.out.empty() || o.out == "-") {
      for (const auto& g : grids) std::cout << render(g, o.format);
      return kOk;
    }
    std::filesystem::create_directories(o.out);
    for (const auto& g : grids) {
      const auto path = std::filesystem::path(o.out) / (g.name + ext);
      std::ofstream f(path, std::ios::binary);
      if (!f) throw thz::Error("cannot write '" + path.string() + "'");
      f << render(g, o.format);
      std::cerr << "wrote " << path.string() << " (" << g.rows() << " rows, " << g.wall_seconds << " s)\n";
    }
    return kOk;
  }
  if (cmd == "feasibility") {
    const thz::FeasibilitySpec spec =
        o.config.empty() ? thz::FeasibilitySpec{} : thz::parse_feasibility_spec(read_file(o.config));
    emit(thz::run_feasibility(spec), o);
    return kOk;
  }
  const thz::SweepSpec spec = load_spec(o);
  if (cmd == "steady") {
    return emit_point(thz::run_sweep(as_point(spec, {"flux", "population", "g2_zero", "flux_analytic", "g2_analytic"})), o);
  }
  if (cmd == "filtered-g2") {
    return emit_point(thz::run_sweep(as_point(spec, {"filtered_g2", "csi"})), o);
  }
  if (cmd == "sweep") {
    emit(thz::run_sweep(spec), o);
    return kOk;
  }
  if (cmd == "spectrum") return emit_point(thz::run_spectrum(spec), o);
  if (cmd == "csi") {
    emit(thz::run_csi(spec), o);
    return kOk;
  }
  if (cmd == "g2tau") return emit_point(thz::run_g2tau(spec), o);
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thzsim: dressed-emitter THz cavity simulations"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output path ('-' for stdout)");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", o.workers, "parallel workers")->check(CLI::PositiveNumber);
    sub->add_option("--nmax", o.nmax, "cavity Fock truncation")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", o.strict, "re-run sensor results at half coupling and require agreement");
  };

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"steady", "steady-state flux, population and g2(0) at one point"},
      {"sweep", "evaluate observables over a parameter grid"},
      {"spectrum", "emission spectrum, direct and sensor methods"},
      {"filtered-g2", "frequency-filtered g2 and Cauchy-Schwarz ratio at one point"},
      {"csi", "Cauchy-Schwarz ratio map over two sensor frequencies"},
      {"g2tau", "delayed g2 for cavity and emitter with exponential fits"},
      {"feasibility", "minimum dipole versus detector NEP"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub, true);
    if (name == "sweep" || name == "spectrum" || name == "steady") {
      sub->add_option("--method", o.method, "spectrum method")->check(CLI::IsMember({"sensor", "direct"}));
    }
  }
  CLI::App* preset = app.add_subcommand("preset", "run a predefined grid; --out names a directory");
  preset->add_option("name", o.preset, "preset name")->required();
  common(preset, false);
  preset->footer([] {
    std::string s = "Presets:";
    for (const auto& n : thz::preset_names()) s += " " + n;
    return s;
  }());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return run_command(cmd, o);
  } catch (const thz::ConfigError& e) {
    std::cerr << "thzsim: " << e.what() << "\n";
    return kConfig;
  } catch (const thz::UnknownPreset& e) {
    std::cerr << "thzsim: " << e.what() << "\n";
    return kPreset;
  } catch (const thz::NumericalError& e) {
    std::cerr << "thzsim: numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const thz::DomainError& e) {
    std::cerr << "thzsim: invalid configuration: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "thzsim: " << e.what() << "\n";
    return kInternal;
  }
}
