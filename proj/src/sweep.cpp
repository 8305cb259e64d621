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

#include "thz/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thz/analytic.hpp"
#include "thz/correlations.hpp"
#include "thz/feasibility.hpp"
#include "thz/parallel.hpp"
#include "thz/units.hpp"

#ifndef THZSOURCE_VERSION
#define THZSOURCE_VERSION "0.0.0"
#endif

namespace thz {

using json = nlohmann::json;

namespace {

const std::set<std::string> kFrequencyParameters = {"chi",   "kappa",      "gamma",  "omega_c",
                                                    "omega", "delta",      "omega_rabi", "omega1",
                                                    "omega2", "linewidth"};

}  // namespace

const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names = {
      "chi",         "kappa",  "gamma",  "omega_c",   "omega",
      "delta",       "omega_rabi", "temperature", "log10_kappa_over_gamma", "kappa_rad_fraction",
      "n_max",       "omega1", "omega2", "linewidth"};
  return names;
}

const std::vector<std::string>& observable_names() {
  static const std::vector<std::string> names = {
      "flux",        "population", "g2_zero",       "glauber2",      "glauber3",
      "spectrum",    "filtered_g2", "csi",          "g2_tau",        "g2_tau_emitter",
      "lambda2_sq",  "lambda3_sq", "flux_analytic", "g2_analytic",   "tau_c_analytic"};
  return names;
}

// ---------------------------------------------------------------------------
// SweepSpec

std::size_t SweepSpec::cell_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

std::optional<double> SweepSpec::fixed_value(const std::string& key) const {
  for (const auto& [k, v] : fixed) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void SweepSpec::set_fixed(const std::string& key, double value) {
  for (auto& [k, v] : fixed) {
    if (k == key) {
      v = value;
      return;
    }
  }
  fixed.emplace_back(key, value);
}

void SweepSpec::validate() const {
  const auto& params = parameter_names();
  const auto& obs = observable_names();
  if (axes.size() > 2) throw DomainError("at most two axes are supported");
  std::set<std::string> seen;
  for (const auto& a : axes) {
    if (std::find(params.begin(), params.end(), a.name) == params.end()) {
      throw DomainError("unknown axis parameter '" + a.name + "'");
    }
    if (!seen.insert(a.name).second) throw DomainError("duplicate axis '" + a.name + "'");
    if (a.values.empty()) throw DomainError("axis '" + a.name + "' has no values");
    for (double v : a.values) {
      if (!std::isfinite(v)) throw DomainError("axis '" + a.name + "' has a non-finite value");
    }
  }
  for (const auto& [k, v] : fixed) {
    if (std::find(params.begin(), params.end(), k) == params.end()) {
      throw DomainError("unknown fixed parameter '" + k + "'");
    }
    if (!std::isfinite(v)) throw DomainError("fixed parameter '" + k + "' is not finite");
  }
  for (const auto& o : observables) {
    if (std::find(obs.begin(), obs.end(), o) == obs.end()) throw DomainError("unknown observable '" + o + "'");
  }
  if (hold != "omega" && hold != "delta") throw DomainError("hold must be 'omega' or 'delta'");
  if (n_max < 1) throw DomainError("n_max must be at least 1");
  if (workers < 1) throw DomainError("workers must be positive");
  if (spectrum_method != "sensor" && spectrum_method != "direct") {
    throw DomainError("spectrum_method must be 'sensor' or 'direct'");
  }
  if (tau.points < 3) throw DomainError("g2_tau needs at least 3 points");
}

std::vector<double> linspace(double start, double stop, int num) {
  if (num < 1) throw DomainError("range needs num >= 1");
  if (num == 1) return {start};
  std::vector<double> v(static_cast<std::size_t>(num));
  for (int i = 0; i < num; ++i) {
    v[static_cast<std::size_t>(i)] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(num - 1);
  }
  v.back() = stop;
  return v;
}

std::vector<double> logspace(double start, double stop, int num) {
  if (!(start > 0.0 && stop > 0.0)) throw DomainError("log range needs positive bounds");
  std::vector<double> v = linspace(std::log10(start), std::log10(stop), num);
  for (auto& x : v) x = std::pow(10.0, x);
  v.front() = start;
  if (num > 1) v.back() = stop;
  return v;
}

// ---------------------------------------------------------------------------
// JSON source locations

namespace {

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char ch : key) {
    if (ch == '~') {
      out += "~0";
    } else if (ch == '/') {
      out += "~1";
    } else {
      out += ch;
    }
  }
  return out;
}

class LineIndexer {
 public:
  explicit LineIndexer(const std::string& text) : s_(text) {}

  std::map<std::string, int> run() {
    value("");
    return std::move(lines_);
  }

 private:
  void ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  bool value(const std::string& ptr) {
    ws();
    if (i_ >= s_.size()) return false;
    lines_.emplace(ptr, line_);
    const char ch = s_[i_];
    if (ch == '{') return object(ptr);
    if (ch == '[') return array(ptr);
    if (ch == '"') return string(nullptr);
    while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '}' && s_[i_] != ']' &&
           !std::isspace(static_cast<unsigned char>(s_[i_]))) {
      ++i_;
    }
    return true;
  }

  bool string(std::string* out) {
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
        if (out != nullptr) out->push_back(s_[i_ + 1]);
        i_ += 2;
        continue;
      }
      if (s_[i_] == '\n') ++line_;
      if (out != nullptr) out->push_back(s_[i_]);
      ++i_;
    }
    if (i_ >= s_.size()) return false;
    ++i_;
    return true;
  }

  bool object(const std::string& ptr) {
    ++i_;
    for (;;) {
      ws();
      if (i_ >= s_.size()) return false;
      if (s_[i_] == '}') {
        ++i_;
        return true;
      }
      if (s_[i_] != '"') return false;
      std::string key;
      if (!string(&key)) return false;
      ws();
      if (i_ >= s_.size() || s_[i_] != ':') return false;
      ++i_;
      if (!value(ptr + "/" + escape_pointer_token(key))) return false;
      ws();
      if (i_ < s_.size() && s_[i_] == ',') ++i_;
    }
  }

  bool array(const std::string& ptr) {
    ++i_;
    for (std::size_t k = 0;; ++k) {
      ws();
      if (i_ >= s_.size()) return false;
      if (s_[i_] == ']') {
        ++i_;
        return true;
      }
      if (!value(ptr + "/" + std::to_string(k))) return false;
      ws();
      if (i_ < s_.size() && s_[i_] == ',') ++i_;
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

int line_of_offset(const std::string& text, std::size_t offset) {
  const std::size_t end = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
}

}  // namespace

int json_line_of(const std::string& text, const std::string& pointer) {
  const auto lines = LineIndexer(text).run();
  const auto it = lines.find(pointer);
  return it == lines.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

class ConfigReader {
 public:
  explicit ConfigReader(const std::string& text) : text_(text), lines_(LineIndexer(text).run()) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    const auto it = lines_.find(ptr);
    throw ConfigError(ptr, it == lines_.end() ? 0 : it->second, msg);
  }

  json parse() const {
    try {
      return json::parse(text_);
    } catch (const json::parse_error& e) {
      throw ConfigError("", line_of_offset(text_, e.byte > 0 ? e.byte - 1 : 0), "invalid JSON");
    }
  }

  void only_keys(const json& obj, const std::string& ptr, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      if (allowed.count(k) == 0) fail(ptr + "/" + escape_pointer_token(k), "unknown key '" + k + "'");
    }
  }

  double number(const json& v, const std::string& ptr) const {
    if (!v.is_number()) fail(ptr, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ptr, "expected a finite number");
    return d;
  }

  int integer(const json& v, const std::string& ptr) const {
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    return v.get<int>();
  }

  bool boolean(const json& v, const std::string& ptr) const {
    if (!v.is_boolean()) fail(ptr, "expected true or false");
    return v.get<bool>();
  }

  std::string str(const json& v, const std::string& ptr) const {
    if (!v.is_string()) fail(ptr, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> range(const json& v, const std::string& ptr) const {
    if (v.is_array()) {
      std::vector<double> out;
      for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], ptr + "/" + std::to_string(i)));
      if (out.empty()) fail(ptr, "value list is empty");
      return out;
    }
    only_keys(v, ptr, {"start", "stop", "num", "spacing"});
    for (const char* k : {"start", "stop", "num"}) {
      if (!v.contains(k)) fail(ptr, std::string("range needs '") + k + "'");
    }
    const double start = number(v["start"], ptr + "/start");
    const double stop = number(v["stop"], ptr + "/stop");
    const int num = integer(v["num"], ptr + "/num");
    if (num < 1) fail(ptr + "/num", "num must be positive");
    const std::string spacing = v.contains("spacing") ? str(v["spacing"], ptr + "/spacing") : "linear";
    if (spacing == "linear") return linspace(start, stop, num);
    if (spacing == "log") {
      if (!(start > 0.0 && stop > 0.0)) fail(ptr, "log spacing needs positive bounds");
      return logspace(start, stop, num);
    }
    fail(ptr + "/spacing", "spacing must be 'linear' or 'log'");
  }

 private:
  const std::string& text_;
  std::map<std::string, int> lines_;
};

template <typename E>
E parse_enum(const ConfigReader& r, const json& v, const std::string& ptr,
             const std::vector<std::pair<std::string, E>>& table) {
  const std::string s = r.str(v, ptr);
  for (const auto& [name, e] : table) {
    if (name == s) return e;
  }
  std::string options;
  for (const auto& [name, e] : table) options += (options.empty() ? "" : ", ") + name;
  r.fail(ptr, "expected one of " + options);
}

const std::vector<std::pair<std::string, CavityDissipator>> kDissipators = {
    {"standard_a", CavityDissipator::StandardA}, {"dressed_X", CavityDissipator::DressedX}};
const std::vector<std::pair<std::string, OutputOperator>> kOutputs = {
    {"a", OutputOperator::A}, {"X_plus", OutputOperator::XPlus}};
const std::vector<std::pair<std::string, HamiltonianForm>> kHamiltonians = {
    {"full_eq1", HamiltonianForm::FullDressed}, {"jaynes_cummings", HamiltonianForm::JaynesCummings}};
const std::vector<std::pair<std::string, EmitterDissipator>> kEmitters = {
    {"sigma_minus", EmitterDissipator::SigmaMinus}, {"dressed_rates", EmitterDissipator::DressedRates}};

template <typename E>
std::string enum_name(E e, const std::vector<std::pair<std::string, E>>& table) {
  for (const auto& [name, v] : table) {
    if (v == e) return name;
  }
  return "?";
}

bool known(const std::vector<std::string>& names, const std::string& s) {
  return std::find(names.begin(), names.end(), s) != names.end();
}

}  // namespace

SweepSpec parse_sweep_spec(const std::string& text) {
  const ConfigReader r(text);
  const json doc = r.parse();
  r.only_keys(doc, "", {"name", "axes", "fixed", "hold", "observables", "variant", "n_max", "workers", "seed",
                        "sensor", "g2_tau", "spectrum_method"});
  SweepSpec spec;
  if (doc.contains("name")) spec.name = r.str(doc["name"], "/name");
  if (doc.contains("axes")) {
    const json& axes = doc["axes"];
    if (!axes.is_array()) r.fail("/axes", "expected an array");
    if (axes.size() > 2) r.fail("/axes", "at most two axes are supported");
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const std::string ptr = "/axes/" + std::to_string(i);
      const json& a = axes[i];
      r.only_keys(a, ptr, {"name", "values", "range"});
      if (!a.contains("name")) r.fail(ptr, "axis needs a name");
      Axis axis;
      axis.name = r.str(a["name"], ptr + "/name");
      if (!known(parameter_names(), axis.name)) r.fail(ptr + "/name", "unknown parameter '" + axis.name + "'");
      for (const auto& other : spec.axes) {
        if (other.name == axis.name) r.fail(ptr + "/name", "duplicate axis '" + axis.name + "'");
      }
      if (a.contains("values") == a.contains("range")) r.fail(ptr, "axis needs exactly one of 'values' or 'range'");
      axis.values = a.contains("values") ? r.range(a["values"], ptr + "/values") : r.range(a["range"], ptr + "/range");
      spec.axes.push_back(std::move(axis));
    }
  }
  if (doc.contains("fixed")) {
    const json& f = doc["fixed"];
    if (!f.is_object()) r.fail("/fixed", "expected an object");
    for (const auto& [k, v] : f.items()) {
      const std::string ptr = "/fixed/" + escape_pointer_token(k);
      if (!known(parameter_names(), k)) r.fail(ptr, "unknown parameter '" + k + "'");
      spec.set_fixed(k, r.number(v, ptr));
    }
  }
  if (doc.contains("hold")) {
    spec.hold = r.str(doc["hold"], "/hold");
    if (spec.hold != "omega" && spec.hold != "delta") r.fail("/hold", "hold must be 'omega' or 'delta'");
  }
  if (doc.contains("observables")) {
    const json& o = doc["observables"];
    if (!o.is_array()) r.fail("/observables", "expected an array");
    for (std::size_t i = 0; i < o.size(); ++i) {
      const std::string ptr = "/observables/" + std::to_string(i);
      const std::string name = r.str(o[i], ptr);
      if (!known(observable_names(), name)) r.fail(ptr, "unknown observable '" + name + "'");
      spec.observables.push_back(name);
    }
  }
  if (doc.contains("variant")) {
    const json& v = doc["variant"];
    r.only_keys(v, "/variant", {"dissipator", "output_operator", "hamiltonian", "emitter", "thermal"});
    if (v.contains("dissipator")) spec.variant.dissipator = parse_enum(r, v["dissipator"], "/variant/dissipator", kDissipators);
    if (v.contains("output_operator")) spec.variant.output = parse_enum(r, v["output_operator"], "/variant/output_operator", kOutputs);
    if (v.contains("hamiltonian")) spec.variant.hamiltonian = parse_enum(r, v["hamiltonian"], "/variant/hamiltonian", kHamiltonians);
    if (v.contains("emitter")) spec.variant.emitter = parse_enum(r, v["emitter"], "/variant/emitter", kEmitters);
    if (v.contains("thermal")) spec.variant.thermal = r.boolean(v["thermal"], "/variant/thermal");
  }
  if (doc.contains("n_max")) {
    spec.n_max = r.integer(doc["n_max"], "/n_max");
    if (spec.n_max < 1) r.fail("/n_max", "n_max must be at least 1");
  }
  if (doc.contains("workers")) {
    const int w = r.integer(doc["workers"], "/workers");
    if (w < 1) r.fail("/workers", "workers must be positive");
    spec.workers = static_cast<std::size_t>(w);
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) r.fail("/seed", "expected an integer");
    spec.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("sensor")) {
    const json& s = doc["sensor"];
    r.only_keys(s, "/sensor", {"linewidth", "coupling", "strict"});
    if (s.contains("linewidth")) spec.sensor.linewidth = r.number(s["linewidth"], "/sensor/linewidth");
    if (s.contains("coupling")) spec.sensor.coupling = r.number(s["coupling"], "/sensor/coupling");
    if (s.contains("strict")) spec.sensor.strict = r.boolean(s["strict"], "/sensor/strict");
    if (spec.sensor.linewidth < 0.0) r.fail("/sensor/linewidth", "linewidth must be non-negative");
    if (spec.sensor.coupling < 0.0) r.fail("/sensor/coupling", "coupling must be non-negative");
  }
  if (doc.contains("g2_tau")) {
    const json& t = doc["g2_tau"];
    r.only_keys(t, "/g2_tau", {"tau_max", "points"});
    if (t.contains("tau_max")) spec.tau.tau_max = r.number(t["tau_max"], "/g2_tau/tau_max");
    if (t.contains("points")) spec.tau.points = r.integer(t["points"], "/g2_tau/points");
    if (spec.tau.points < 3) r.fail("/g2_tau/points", "points must be at least 3");
    if (spec.tau.tau_max < 0.0) r.fail("/g2_tau/tau_max", "tau_max must be non-negative");
  }
  if (doc.contains("spectrum_method")) {
    spec.spectrum_method = r.str(doc["spectrum_method"], "/spectrum_method");
    if (spec.spectrum_method != "sensor" && spec.spectrum_method != "direct") {
      r.fail("/spectrum_method", "expected 'sensor' or 'direct'");
    }
  }
  return spec;
}

std::string spec_to_json(const SweepSpec& spec) {
  json doc = json::object();
  doc["name"] = spec.name;
  json axes = json::array();
  for (const auto& a : spec.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
  doc["axes"] = axes;
  json fixed = json::object();
  for (const auto& [k, v] : spec.fixed) fixed[k] = v;
  doc["fixed"] = fixed;
  doc["hold"] = spec.hold;
  doc["observables"] = spec.observables;
  doc["variant"] = {{"dissipator", enum_name(spec.variant.dissipator, kDissipators)},
                    {"output_operator", enum_name(spec.variant.output, kOutputs)},
                    {"hamiltonian", enum_name(spec.variant.hamiltonian, kHamiltonians)},
                    {"emitter", enum_name(spec.variant.emitter, kEmitters)},
                    {"thermal", spec.variant.thermal}};
  doc["n_max"] = spec.n_max;
  doc["seed"] = spec.seed;
  doc["sensor"] = {{"linewidth", spec.sensor.linewidth}, {"coupling", spec.sensor.coupling}, {"strict", spec.sensor.strict}};
  doc["g2_tau"] = {{"tau_max", spec.tau.tau_max}, {"points", spec.tau.points}};
  doc["spectrum_method"] = spec.spectrum_method;
  return doc.dump();
}

// ---------------------------------------------------------------------------
// output

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::size_t ResultGrid::column(const std::string& value_name) const {
  const auto it = std::find(value_names.begin(), value_names.end(), value_name);
  if (it == value_names.end()) throw DomainError("grid has no column '" + value_name + "'");
  return static_cast<std::size_t>(it - value_names.begin());
}

std::optional<double> ResultGrid::value(std::size_t row, const std::string& value_name) const {
  return values.at(row).at(column(value_name));
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

std::string to_csv(const ResultGrid& grid) {
  std::ostringstream out;
  out << "# thzsource " << THZSOURCE_VERSION << "\n";
  out << "# grid: " << one_line(grid.name) << "\n";
  for (const auto& [k, v] : grid.metadata) out << "# " << one_line(k) << ": " << one_line(v) << "\n";
  if (grid.spec) out << "# spec: " << spec_to_json(*grid.spec) << "\n";
  bool first = true;
  for (const auto& a : grid.axis_names) {
    out << (first ? "" : ",") << a;
    first = false;
  }
  for (const auto& v : grid.value_names) {
    out << (first ? "" : ",") << v;
    first = false;
  }
  out << (first ? "" : ",") << "missing_reason\n";
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    first = true;
    for (double a : grid.axis_values[r]) {
      out << (first ? "" : ",") << format_number(a);
      first = false;
    }
    for (const auto& v : grid.values[r]) {
      out << (first ? "" : ",");
      if (v) out << format_number(*v);
      first = false;
    }
    out << (first ? "" : ",") << csv_field(grid.missing_reason[r]) << "\n";
  }
  return out.str();
}

std::string to_json(const ResultGrid& grid) {
  json doc = json::object();
  json meta = json::object();
  meta["generator"] = std::string("thzsource ") + THZSOURCE_VERSION;
  meta["grid"] = grid.name;
  for (const auto& [k, v] : grid.metadata) meta[k] = v;
  meta["wall_seconds"] = grid.wall_seconds;
  doc["metadata"] = meta;
  if (grid.spec) doc["spec"] = json::parse(spec_to_json(*grid.spec));
  json columns = json::array();
  for (const auto& a : grid.axis_names) columns.push_back(a);
  for (const auto& v : grid.value_names) columns.push_back(v);
  columns.push_back("missing_reason");
  doc["columns"] = columns;
  json records = json::array();
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    json rec = json::object();
    for (std::size_t a = 0; a < grid.axis_names.size(); ++a) rec[grid.axis_names[a]] = grid.axis_values[r][a];
    for (std::size_t v = 0; v < grid.value_names.size(); ++v) {
      const auto& x = grid.values[r][v];
      rec[grid.value_names[v]] = (x && std::isfinite(*x)) ? json(*x) : json(nullptr);
    }
    rec["missing_reason"] = grid.missing_reason[r];
    records.push_back(rec);
  }
  doc["records"] = records;
  return doc.dump(1) + "\n";
}

SweepSpec spec_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  const std::string tag = "# spec: ";
  while (std::getline(in, line)) {
    if (line.rfind(tag, 0) == 0) return parse_sweep_spec(line.substr(tag.size()));
    if (line.empty() || line[0] != '#') break;
  }
  throw DomainError("CSV has no '# spec:' metadata line");
}

// ---------------------------------------------------------------------------
// cell evaluation

CellPoint resolve_point(const SweepSpec& spec, const std::vector<double>& axis_point) {
  if (axis_point.size() != spec.axes.size()) throw DomainError("axis point does not match the axes");
  std::map<std::string, double> v;
  for (const auto& [k, x] : spec.fixed) v[k] = x;
  for (std::size_t i = 0; i < spec.axes.size(); ++i) v[spec.axes[i].name] = axis_point[i];
  auto take = [&](const char* key, double fallback) {
    const auto it = v.find(key);
    return it == v.end() ? fallback : it->second;
  };
  auto freq = [&](const char* key) -> std::optional<double> {
    const auto it = v.find(key);
    if (it == v.end()) return std::nullopt;
    return units::from_thz(it->second);
  };

  const double n_max_value = take("n_max", spec.n_max);
  if (n_max_value != std::floor(n_max_value) || n_max_value < 1) throw DomainError("n_max must be a positive integer");
  CellPoint cp;
  SystemParams& p = cp.params;
  p.chi = units::from_thz(take("chi", 0.05));
  p.kappa = units::from_thz(take("kappa", 0.158));
  p.gamma = units::from_thz(take("gamma", 0.0005));
  p.omega_c = units::from_thz(take("omega_c", 26.0));
  p.omega_drive = units::from_thz(take("omega", 10.0));
  p.temperature = take("temperature", 0.0);
  p.kappa_rad_fraction = take("kappa_rad_fraction", 1.0);
  p.n_max = static_cast<int>(n_max_value);
  if (v.count("log10_kappa_over_gamma") != 0) {
    if (v.count("kappa") != 0) throw DomainError("kappa and log10_kappa_over_gamma are mutually exclusive");
    p.kappa = p.gamma * std::pow(10.0, v["log10_kappa_over_gamma"]);
  }
  const auto delta = freq("delta");
  const auto rabi = freq("omega_rabi");
  if (delta) p.delta = *delta;
  if (rabi || !delta) {
    const double target = rabi ? *rabi : p.omega_c;
    if (spec.hold == "omega") {
      if (delta && v.count("omega") != 0 && rabi) {
        throw DomainError("omega, delta and omega_rabi cannot all be set");
      }
      p = delta && !rabi ? p : p.with_rabi_fixed_drive(target);
    } else {
      if (!delta) throw DomainError("hold 'delta' needs a delta value");
      p = p.with_rabi_fixed_detuning(target);
    }
  }
  p.validate();
  cp.omega1 = freq("omega1");
  cp.omega2 = freq("omega2");
  if (!cp.omega2) cp.omega2 = cp.omega1;
  cp.linewidth = freq("linewidth").value_or(spec.sensor.linewidth > 0.0 ? units::from_thz(spec.sensor.linewidth) : p.kappa);
  cp.coupling = spec.sensor.coupling > 0.0 ? units::from_thz(spec.sensor.coupling) : 0.0;
  return cp;
}

namespace {

std::vector<double> axis_point_of(const SweepSpec& spec, std::size_t cell) {
  std::vector<double> point(spec.axes.size());
  std::size_t rem = cell;
  for (std::size_t k = spec.axes.size(); k-- > 0;) {
    const std::size_t n = spec.axes[k].values.size();
    point[k] = spec.axes[k].values[rem % n];
    rem /= n;
  }
  return point;
}

double from_rate(double omega) { return units::to_thz(omega); }

struct CellOutput {
  std::vector<std::optional<double>> values;
  std::string reason;
};

SensorConfig sensor_config(const SweepSpec& spec, const CellPoint& cp) {
  SensorConfig cfg;
  cfg.linewidth = cp.linewidth;
  cfg.coupling = cp.coupling;
  cfg.strict = spec.sensor.strict;
  return cfg;
}

std::vector<double> tau_grid(const SweepSpec& spec, const SystemParams& p, const DressedFrame& f) {
  const double tau_max = spec.tau.tau_max > 0.0 ? spec.tau.tau_max : 20.0 * analytic::correlation_timescale(p, f);
  return linspace(0.0, tau_max, spec.tau.points);
}

CellOutput evaluate_cell(const SweepSpec& spec, std::size_t cell) {
  CellOutput out;
  out.values.assign(spec.observables.size(), std::nullopt);
  std::vector<std::string> reasons;
  CellPoint cp;
  DressedFrame f;
  try {
    cp = resolve_point(spec, axis_point_of(spec, cell));
    f = dress(cp.params);
  } catch (const Error& e) {
    out.reason = std::string("parameters: ") + e.what();
    return out;
  }
  const SystemParams& p = cp.params;

  std::optional<StatRecord> stats;
  std::string stats_error;
  bool stats_tried = false;
  const bool want_glauber3 =
      std::find(spec.observables.begin(), spec.observables.end(), "glauber3") != spec.observables.end();
  auto get_stats = [&]() -> const StatRecord& {
    if (!stats_tried) {
      stats_tried = true;
      try {
        if (want_glauber3 && p.n_max < 4) throw DomainError("glauber3 needs n_max >= 4");
        stats = flux_and_g2(p, f, spec.variant, want_glauber3 ? 3 : 2);
      } catch (const Error& e) {
        stats_error = e.what();
      }
    }
    if (!stats) throw NumericalError(stats_error);
    return *stats;
  };
  auto need = [](const std::optional<double>& w, const char* name) {
    if (!w) throw DomainError(std::string("needs a value for ") + name);
    return *w;
  };

  for (std::size_t k = 0; k < spec.observables.size(); ++k) {
    const std::string& obs = spec.observables[k];
    try {
      double value = 0.0;
      if (obs == "flux") {
        value = from_rate(get_stats().flux);
      } else if (obs == "population") {
        value = get_stats().population;
      } else if (obs == "g2_zero") {
        value = get_stats().g2_zero();
      } else if (obs == "glauber2") {
        value = get_stats().glauber.at(2);
      } else if (obs == "glauber3") {
        value = get_stats().glauber.at(3);
      } else if (obs == "spectrum") {
        const double w = need(cp.omega1, "omega1");
        if (spec.spectrum_method == "direct") {
          value = spectrum_direct(p, f, spec.variant, {w}, cp.linewidth).value.at(0);
        } else {
          value = spectrum_sensor(p, f, spec.variant, w, sensor_config(spec, cp));
        }
      } else if (obs == "filtered_g2") {
        value = filtered_g2(p, f, spec.variant, need(cp.omega1, "omega1"), need(cp.omega2, "omega2"),
                            sensor_config(spec, cp));
      } else if (obs == "csi") {
        value = csi_ratio(p, f, spec.variant, need(cp.omega1, "omega1"), need(cp.omega2, "omega2"),
                          sensor_config(spec, cp));
      } else if (obs == "g2_tau" || obs == "g2_tau_emitter") {
        const auto channel = obs == "g2_tau" ? CorrelatedChannel::Cavity : CorrelatedChannel::Emitter;
        value = 1.0 / g2_tau(p, f, spec.variant, tau_grid(spec, p, f), channel).fit.rate;
      } else if (obs == "lambda2_sq") {
        value = std::pow(from_rate(analytic::lambda_n(p, f, 2)), 2);
      } else if (obs == "lambda3_sq") {
        value = std::pow(from_rate(analytic::lambda_n(p, f, 3)), 2);
      } else if (obs == "flux_analytic") {
        value = from_rate(analytic::flux_lorentzian(p, f));
      } else if (obs == "g2_analytic") {
        value = analytic::g2_truncated(p, f);
      } else if (obs == "tau_c_analytic") {
        value = analytic::correlation_timescale(p, f);
      } else {
        throw DomainError("unknown observable");
      }
      if (!std::isfinite(value)) throw NumericalError("non-finite result");
      out.values[k] = value;
    } catch (const Error& e) {
      reasons.push_back(obs + ": " + e.what());
    } catch (const std::exception& e) {
      reasons.push_back(obs + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < reasons.size(); ++i) out.reason += (i ? "; " : "") + reasons[i];
  return out;
}

std::string variant_text(const ModelVariant& v) {
  return enum_name(v.hamiltonian, kHamiltonians) + "/" + enum_name(v.dissipator, kDissipators) + "/" +
         enum_name(v.output, kOutputs) + "/" + enum_name(v.emitter, kEmitters) + (v.thermal ? "/thermal" : "");
}

void common_metadata(ResultGrid& grid, const SweepSpec& spec) {
  grid.add_metadata("n_max", std::to_string(spec.n_max));
  grid.add_metadata("seed", std::to_string(spec.seed));
  grid.add_metadata("variant", variant_text(spec.variant.normalized()));
  grid.add_metadata("units", "frequencies and rates nu = omega/2pi in THz; times in ps");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ResultGrid run_sweep(const SweepSpec& spec) {
  spec.validate();
  if (spec.observables.empty()) throw DomainError("sweep needs at least one observable");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t cells = spec.cell_count();
  std::vector<CellOutput> outputs(cells);
  parallel_for(cells, spec.workers, [&](std::size_t c, std::size_t) { outputs[c] = evaluate_cell(spec, c); });

  ResultGrid grid;
  grid.name = spec.name;
  for (const auto& a : spec.axes) grid.axis_names.push_back(a.name);
  grid.value_names = spec.observables;
  grid.spec = spec;
  grid.spec->workers = 1;
  common_metadata(grid, spec);
  grid.add_metadata("hold", spec.hold);
  grid.add_metadata("cells", std::to_string(cells));
  for (std::size_t c = 0; c < cells; ++c) {
    grid.axis_values.push_back(axis_point_of(spec, c));
    grid.values.push_back(std::move(outputs[c].values));
    grid.missing_reason.push_back(std::move(outputs[c].reason));
  }
  grid.wall_seconds = seconds_since(t0);
  return grid;
}

namespace {

const Axis& require_axis(const SweepSpec& spec, const std::string& name) {
  for (const auto& a : spec.axes) {
    if (a.name == name) return a;
  }
  throw DomainError("this command needs an axis named '" + name + "'");
}

SweepSpec point_spec(const SweepSpec& spec) {
  SweepSpec s = spec;
  s.axes.clear();
  return s;
}

}  // namespace

ResultGrid run_spectrum(const SweepSpec& spec) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Axis& axis = require_axis(spec, "omega1");
  if (spec.axes.size() != 1) throw DomainError("spectrum takes exactly one axis, omega1");
  const CellPoint cp = resolve_point(point_spec(spec), {});
  const DressedFrame f = dress(cp.params);
  std::vector<double> omega;
  for (double nu : axis.values) omega.push_back(units::from_thz(nu));

  const Spectrum direct = spectrum_direct(cp.params, f, spec.variant, omega, cp.linewidth);

  std::vector<std::optional<double>> sensor(omega.size());
  std::vector<std::string> reason(omega.size());
  const std::size_t w = effective_workers(spec.workers, omega.size());
  std::vector<std::unique_ptr<SensorModel>> models(w);
  std::vector<std::unique_ptr<SensorModel>> halves(w);
  double coupling = 0.0;
  parallel_for(omega.size(), w, [&](std::size_t i, std::size_t worker) {
    try {
      if (!models[worker]) models[worker] = std::make_unique<SensorModel>(cp.params, f, spec.variant, 1, cp.linewidth, cp.coupling);
      const double x[1] = {omega[i]};
      const double value = models[worker]->solve(x).population[0];
      if (spec.sensor.strict) {
        if (!halves[worker]) {
          halves[worker] = std::make_unique<SensorModel>(cp.params, f, spec.variant, 1, cp.linewidth,
                                                         0.5 * models[worker]->coupling());
        }
        const double half = halves[worker]->solve(x).population[0];
        if (std::abs(half - value) > 1e-2 * std::max(std::abs(value), std::abs(half))) {
          throw NumericalError("sensor result changed by more than 1% under epsilon -> epsilon/2");
        }
      }
      sensor[i] = value;
    } catch (const Error& e) {
      reason[i] = std::string("sensor: ") + e.what();
    }
  });
  for (const auto& m : models) {
    if (m) coupling = m->coupling();
  }

  ResultGrid grid;
  grid.name = spec.name;
  grid.axis_names = {"omega1"};
  grid.value_names = {"S_direct", "S_direct_imag", "S_sensor", "sensor_population"};
  grid.spec = spec;
  grid.spec->workers = 1;
  common_metadata(grid, spec);
  double integral = 0.0;
  for (std::size_t i = 1; i < omega.size(); ++i) {
    integral += 0.5 * (direct.value[i] + direct.value[i - 1]) * (omega[i] - omega[i - 1]);
  }
  grid.add_metadata("omega_rabi", format_number(units::to_thz(f.omega_R)));
  grid.add_metadata("linewidth", format_number(units::to_thz(cp.linewidth)));
  grid.add_metadata("sensor_coupling", format_number(units::to_thz(coupling)));
  grid.add_metadata("population", format_number(direct.population));
  grid.add_metadata("spectrum_integral", format_number(integral));
  grid.add_metadata("tau_max_ps", format_number(direct.tau_max));
  grid.add_metadata("tau_step_ps", format_number(direct.tau_step));
  grid.add_metadata("S_units", "S_direct per rad/ps, integrates over omega to <X-X+>; S_sensor = Gamma/(2pi) <b+b>/eps^2");
  for (std::size_t i = 0; i < omega.size(); ++i) {
    grid.axis_values.push_back({axis.values[i]});
    std::optional<double> scaled;
    if (sensor[i]) scaled = *sensor[i] * cp.linewidth / units::kTwoPi;
    grid.values.push_back({direct.value[i], direct.imaginary[i], scaled, sensor[i]});
    grid.missing_reason.push_back(reason[i]);
  }
  grid.wall_seconds = seconds_since(t0);
  return grid;
}

ResultGrid run_csi(const SweepSpec& spec) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Axis& a1 = require_axis(spec, "omega1");
  const Axis& a2 = require_axis(spec, "omega2");
  if (spec.axes.front().name != "omega1") throw DomainError("csi axes must be ordered omega1, omega2");
  const CellPoint cp = resolve_point(point_spec(spec), {});
  const DressedFrame f = dress(cp.params);
  std::vector<double> w1, w2;
  for (double nu : a1.values) w1.push_back(units::from_thz(nu));
  for (double nu : a2.values) w2.push_back(units::from_thz(nu));
  SensorConfig cfg;
  cfg.linewidth = cp.linewidth;
  cfg.coupling = cp.coupling;
  cfg.strict = spec.sensor.strict;
  const CsiMap map = csi_map(cp.params, f, spec.variant, w1, w2, cfg, spec.workers);

  ResultGrid grid;
  grid.name = spec.name;
  grid.axis_names = {"omega1", "omega2"};
  grid.value_names = {"filtered_g2", "csi"};
  grid.spec = spec;
  grid.spec->workers = 1;
  common_metadata(grid, spec);
  grid.add_metadata("omega_rabi", format_number(units::to_thz(f.omega_R)));
  grid.add_metadata("linewidth", format_number(units::to_thz(cp.linewidth)));
  for (std::size_t i = 0; i < w1.size(); ++i) {
    for (std::size_t j = 0; j < w2.size(); ++j) {
      const std::size_t c = i * w2.size() + j;
      grid.axis_values.push_back({a1.values[i], a2.values[j]});
      grid.values.push_back({map.g2[c], map.ratio[c]});
      grid.missing_reason.push_back(map.missing_reason[c]);
    }
  }
  grid.wall_seconds = seconds_since(t0);
  return grid;
}

ResultGrid run_g2tau(const SweepSpec& spec) {
  spec.validate();
  if (!spec.axes.empty()) throw DomainError("g2tau takes no axes; set g2_tau.tau_max and g2_tau.points");
  const auto t0 = std::chrono::steady_clock::now();
  const CellPoint cp = resolve_point(spec, {});
  const DressedFrame f = dress(cp.params);
  const std::vector<double> taus = tau_grid(spec, cp.params, f);
  const G2Trace cav = g2_tau(cp.params, f, spec.variant, taus, CorrelatedChannel::Cavity);
  std::optional<G2Trace> emi;
  std::string emi_reason;
  try {
    emi = g2_tau(cp.params, f, spec.variant, taus, CorrelatedChannel::Emitter);
  } catch (const Error& e) {
    emi_reason = std::string("g2_emitter: ") + e.what();
  }

  ResultGrid grid;
  grid.name = spec.name;
  grid.axis_names = {"tau"};
  grid.value_names = {"g2_cavity", "g2_emitter", "fit_cavity", "fit_emitter"};
  grid.spec = spec;
  grid.spec->workers = 1;
  common_metadata(grid, spec);
  grid.add_metadata("tau_units", "ps");
  grid.add_metadata("predicted_rate_per_ps", format_number(cav.predicted_rate));
  grid.add_metadata("tau_c_analytic_ps", format_number(1.0 / cav.predicted_rate));
  grid.add_metadata("fit_cavity_rate_per_ps", format_number(cav.fit.rate));
  grid.add_metadata("fit_cavity_amplitude", format_number(cav.fit.amplitude));
  grid.add_metadata("fit_cavity_rms", format_number(cav.fit.rms));
  grid.add_metadata("fit_cavity_tau_c_ps", format_number(1.0 / cav.fit.rate));
  if (emi) {
    grid.add_metadata("fit_emitter_rate_per_ps", format_number(emi->fit.rate));
    grid.add_metadata("fit_emitter_amplitude", format_number(emi->fit.amplitude));
    grid.add_metadata("fit_emitter_tau_c_ps", format_number(1.0 / emi->fit.rate));
  }
  grid.add_metadata("fit_model", "1 - g2(tau) = amplitude exp(-rate tau)");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    grid.axis_values.push_back({taus[i]});
    std::optional<double> ge, fe;
    if (emi) {
      ge = emi->g2[i];
      fe = 1.0 - emi->fit.amplitude * std::exp(-emi->fit.rate * taus[i]);
    }
    grid.values.push_back({cav.g2[i], ge, 1.0 - cav.fit.amplitude * std::exp(-cav.fit.rate * taus[i]), fe});
    grid.missing_reason.push_back(emi_reason);
  }
  grid.wall_seconds = seconds_since(t0);
  return grid;
}

// ---------------------------------------------------------------------------
// feasibility

FeasibilitySpec parse_feasibility_spec(const std::string& text) {
  const ConfigReader r(text);
  const json doc = r.parse();
  r.only_keys(doc, "", {"gammas", "nep", "kappa", "omega_c", "h", "kappa_rad_fraction", "bandwidth_hz",
                        "debye_per_chi"});
  FeasibilitySpec spec;
  auto positive = [&](const char* key, double& dst) {
    if (!doc.contains(key)) return;
    const std::string ptr = std::string("/") + key;
    dst = r.number(doc[key], ptr);
    if (!(dst > 0.0)) r.fail(ptr, "must be positive");
  };
  if (doc.contains("gammas")) {
    spec.gammas_thz = r.range(doc["gammas"], "/gammas");
    for (std::size_t i = 0; i < spec.gammas_thz.size(); ++i) {
      if (!(spec.gammas_thz[i] > 0.0)) r.fail("/gammas/" + std::to_string(i), "must be positive");
    }
  }
  if (doc.contains("nep")) {
    spec.nep = r.range(doc["nep"], "/nep");
    for (std::size_t i = 0; i < spec.nep.size(); ++i) {
      if (!(spec.nep[i] > 0.0)) r.fail("/nep", "NEP values must be positive");
    }
  }
  positive("kappa", spec.kappa_thz);
  positive("omega_c", spec.omega_c_thz);
  positive("h", spec.h);
  positive("kappa_rad_fraction", spec.kappa_rad_fraction);
  positive("bandwidth_hz", spec.bandwidth_hz);
  positive("debye_per_chi", spec.debye_per_chi_thz);
  if (spec.kappa_rad_fraction > 1.0) r.fail("/kappa_rad_fraction", "must not exceed 1");
  return spec;
}

ResultGrid run_feasibility(const FeasibilitySpec& spec) {
  namespace fz = feasibility;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> neps = spec.nep.empty() ? logspace(1e-22, 1e-12, 41) : spec.nep;
  ResultGrid grid;
  grid.name = "feasibility";
  grid.axis_names = {"gamma", "nep"};
  grid.value_names = {"min_dipole_debye", "p_min_w", "plateau_w"};
  grid.add_metadata("units", "gamma nu in THz; NEP in W/sqrt(Hz); dipoles in Debye; powers in W");
  const fz::LorentzMedium sic = fz::LorentzMedium::silicon_carbide();
  grid.add_metadata("eps_sic_static", format_number(fz::permittivity(sic, 0.0).real()));
  grid.add_metadata("n_thermal_70K", format_number(fz::thermal_occupation(units::from_thz(spec.omega_c_thz), 70.0)));
  grid.add_metadata("n_thermal_200K", format_number(fz::thermal_occupation(units::from_thz(spec.omega_c_thz), 200.0)));
  const double flux_ref = units::from_thz(4e-4);
  const fz::PowerConventions pc = fz::power_from_flux(flux_ref, units::from_thz(spec.omega_c_thz), 0.5);
  grid.add_metadata("power_flux4e-4THz_rad50pct_si_w", format_number(pc.si));
  grid.add_metadata("power_flux4e-4THz_rad50pct_caption_units_w", format_number(pc.caption_units));
  grid.add_metadata("bandwidth_hz", format_number(spec.bandwidth_hz));
  grid.add_metadata("h", format_number(spec.h));

  fz::EmitterCavity e;
  e.kappa = units::from_thz(spec.kappa_thz);
  e.omega_c = units::from_thz(spec.omega_c_thz);
  e.h = spec.h;
  e.kappa_rad_fraction = spec.kappa_rad_fraction;
  e.chi_per_debye = units::from_thz(1.0 / spec.debye_per_chi_thz);
  for (double g : spec.gammas_thz) {
    e.gamma = units::from_thz(g);
    const double plateau = fz::plateau_power(e);
    for (double nep : neps) {
      const fz::DetectorSpec det{nep, spec.bandwidth_hz};
      grid.axis_values.push_back({g, nep});
      std::optional<double> dip;
      std::string reason;
      try {
        dip = fz::min_dipole(det, e);
      } catch (const Error& err) {
        reason = err.what();
      }
      grid.values.push_back({dip, fz::min_detectable_power(det), plateau});
      grid.missing_reason.push_back(reason);
    }
  }
  grid.wall_seconds = seconds_since(t0);
  return grid;
}

}  // namespace thz
