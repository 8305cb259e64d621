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

#include <functional>
#include <map>

#include "thz/sweep.hpp"

namespace thz {

namespace {

SweepSpec base(const std::string& name, std::vector<std::string> observables) {
  SweepSpec s;
  s.name = name;
  s.observables = std::move(observables);
  return s;
}

Axis axis(const std::string& name, double start, double stop, int num) { return {name, linspace(start, stop, num)}; }

const Axis& rabi_axis() {
  static const Axis a = axis("omega_rabi", 10.0, 85.0, 60);
  return a;
}

const Axis& ratio_axis() {
  static const Axis a = axis("log10_kappa_over_gamma", 0.5, 4.0, 40);
  return a;
}

ResultGrid sweep(SweepSpec s) { return run_sweep(s); }

using Builder = std::function<std::vector<ResultGrid>(const PresetOptions&)>;

void apply(SweepSpec& s, const PresetOptions& o) {
  s.workers = o.workers;
  if (o.n_max) s.n_max = *o.n_max;
  s.sensor.strict = o.strict;
}

std::vector<ResultGrid> fig1c(const PresetOptions& o) {
  SweepSpec drive = base("fig1c_fixed_omega", {"flux", "population", "flux_analytic"});
  drive.axes = {axis("omega_rabi", 14.0, 38.0, 121)};
  drive.set_fixed("omega", 10.0);
  apply(drive, o);
  SweepSpec detuning = drive;
  detuning.name = "fig1c_fixed_delta";
  detuning.fixed.clear();
  detuning.set_fixed("delta", 10.0);
  detuning.hold = "delta";
  return {sweep(drive), sweep(detuning)};
}

std::vector<ResultGrid> fig2(const PresetOptions& o) {
  SweepSpec s = base("fig2", {"flux", "g2_zero", "flux_analytic", "g2_analytic"});
  s.axes = {rabi_axis(), ratio_axis()};
  s.set_fixed("omega", 10.0);
  apply(s, o);
  return {sweep(s)};
}

std::vector<ResultGrid> fig2e(const PresetOptions& o) {
  SweepSpec s = base("fig2e", {"flux", "g2_zero"});
  s.axes = {axis("omega_rabi", 10.0, 85.0, 301)};
  s.set_fixed("omega", 10.0);
  s.set_fixed("log10_kappa_over_gamma", 2.5);
  apply(s, o);
  return {sweep(s)};
}

std::vector<ResultGrid> fig3(const PresetOptions& o) {
  SweepSpec spec = base("fig3_spectrum", {});
  spec.axes = {axis("omega1", 0.0, 80.0, 161)};
  spec.set_fixed("omega", 10.0);
  spec.set_fixed("omega_rabi", 40.0);
  apply(spec, o);
  SweepSpec g2 = spec;
  g2.name = "fig3_filtered_g2_diagonal";
  g2.axes = {axis("omega1", 2.0, 80.0, 79)};
  g2.observables = {"filtered_g2"};
  return {run_spectrum(spec), run_sweep(g2)};
}

std::vector<ResultGrid> fig4(const PresetOptions& o) {
  SweepSpec s = base("fig4", {});
  s.axes = {axis("omega1", 0.0, 70.0, 61), axis("omega2", 0.0, 70.0, 61)};
  s.set_fixed("omega", 10.0);
  s.set_fixed("omega_rabi", 70.0);
  apply(s, o);
  return {run_csi(s)};
}

std::vector<ResultGrid> figS1(const PresetOptions& o) {
  SweepSpec s = base("figS1", {"flux", "g2_zero"});
  s.axes = {rabi_axis(), ratio_axis()};
  s.set_fixed("delta", 10.0);
  s.hold = "delta";
  apply(s, o);
  return {sweep(s)};
}

std::vector<ResultGrid> figS2(const PresetOptions& o) {
  SweepSpec two = base("figS2_n2", {"glauber2", "lambda2_sq"});
  two.axes = {axis("omega", 0.5, 52.0, 104)};
  two.set_fixed("omega_rabi", 52.0);
  apply(two, o);
  SweepSpec three = base("figS2_n3", {"glauber3", "lambda3_sq"});
  three.axes = {axis("omega", 0.5, 78.0, 156)};
  three.set_fixed("omega_rabi", 78.0);
  apply(three, o);
  if (!o.n_max) three.n_max = 5;
  return {sweep(two), sweep(three)};
}

std::vector<ResultGrid> figS3S4(const PresetOptions& o) {
  SweepSpec s = base("figS3S4_reference", {"flux", "population", "g2_zero"});
  s.axes = {axis("omega_rabi", 10.0, 85.0, 31), axis("log10_kappa_over_gamma", 0.5, 4.0, 15)};
  s.set_fixed("omega", 10.0);
  apply(s, o);
  SweepSpec std_a = s;
  std_a.name = "figS3_standard_a";
  std_a.variant.dissipator = CavityDissipator::StandardA;
  SweepSpec out_a = s;
  out_a.name = "figS4_output_a";
  out_a.variant.output = OutputOperator::A;
  return {sweep(s), sweep(std_a), sweep(out_a)};
}

std::vector<ResultGrid> figS7(const PresetOptions& o) {
  std::vector<ResultGrid> grids;
  for (const auto& [name, omega] : {std::pair<const char*, double>{"figS7_omega1", 1.0}, {"figS7_omega0.1", 0.1}}) {
    SweepSpec s = base(name, {"flux", "g2_zero"});
    s.axes = {rabi_axis(), ratio_axis()};
    s.set_fixed("omega", omega);
    s.set_fixed("temperature", 70.0);
    s.variant.thermal = true;
    apply(s, o);
    grids.push_back(sweep(s));
  }
  return grids;
}

std::vector<ResultGrid> figS8(const PresetOptions& o) {
  SweepSpec warm = base("figS8_T70K", {"flux", "g2_zero"});
  warm.axes = {rabi_axis(), ratio_axis()};
  warm.set_fixed("delta", 10.0);
  warm.hold = "delta";
  warm.set_fixed("temperature", 70.0);
  warm.variant.thermal = true;
  apply(warm, o);
  SweepSpec cold = warm;
  cold.name = "figS8_T0K";
  cold.set_fixed("temperature", 0.0);
  cold.variant.thermal = false;
  return {sweep(warm), sweep(cold)};
}

std::vector<ResultGrid> figS10(const PresetOptions& o) {
  SweepSpec s = base("figS10", {});
  s.set_fixed("omega", 10.0);
  s.set_fixed("omega_rabi", 26.0);
  apply(s, o);
  return {run_g2tau(s)};
}

const std::map<std::string, Builder>& registry() {
  static const std::map<std::string, Builder> r = {
      {"fig1c", fig1c}, {"fig2", fig2},   {"fig2e", fig2e},     {"fig3", fig3},   {"fig4", fig4},    {"figS1", figS1},
      {"figS2", figS2}, {"figS3S4", figS3S4}, {"figS7", figS7}, {"figS8", figS8}, {"figS10", figS10}};
  return r;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : registry()) n.push_back(k);
    return n;
  }();
  return names;
}

std::vector<ResultGrid> run_preset(const std::string& name, const PresetOptions& opts) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw UnknownPreset("unknown preset '" + name + "'");
  std::vector<ResultGrid> grids = it->second(opts);
  for (auto& g : grids) g.add_metadata("preset", name);
  return grids;
}

}  // namespace thz
