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

#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include "thz/analytic.hpp"
#include "thz/correlations.hpp"
#include "thz/feasibility.hpp"
#include "thz/model.hpp"
#include "thz/sweep.hpp"
#include "thz/units.hpp"

namespace py = pybind11;

namespace {

py::dict grid_dict(const thz::ResultGrid& g) {
  py::dict d;
  d["name"] = g.name;
  d["axis_names"] = g.axis_names;
  d["value_names"] = g.value_names;
  d["axis_values"] = g.axis_values;
  d["values"] = g.values;
  d["missing_reason"] = g.missing_reason;
  d["metadata"] = g.metadata;
  d["csv"] = thz::to_csv(g);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dressed-emitter THz cavity simulations";
  m.attr("__version__") = THZSOURCE_VERSION;

  py::register_exception<thz::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<thz::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<thz::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<thz::UndefinedObservable>(m, "UndefinedObservable", PyExc_ArithmeticError);

  m.def("from_thz", &thz::units::from_thz, "nu in THz to angular frequency in rad/ps");
  m.def("to_thz", &thz::units::to_thz, "angular frequency in rad/ps to nu in THz");

  py::class_<thz::SystemParams>(m, "SystemParams")
      .def(py::init<>())
      .def_static("from_thz", &thz::SystemParams::from_thz, py::arg("chi"), py::arg("kappa"), py::arg("gamma"),
                  py::arg("omega_c"), py::arg("omega_drive"), py::arg("delta"), py::arg("temperature") = 0.0,
                  py::arg("n_max") = 4)
      .def_readwrite("chi", &thz::SystemParams::chi)
      .def_readwrite("kappa", &thz::SystemParams::kappa)
      .def_readwrite("gamma", &thz::SystemParams::gamma)
      .def_readwrite("omega_c", &thz::SystemParams::omega_c)
      .def_readwrite("omega_drive", &thz::SystemParams::omega_drive)
      .def_readwrite("delta", &thz::SystemParams::delta)
      .def_readwrite("temperature", &thz::SystemParams::temperature)
      .def_readwrite("n_max", &thz::SystemParams::n_max)
      .def_readwrite("kappa_rad_fraction", &thz::SystemParams::kappa_rad_fraction)
      .def("validate", &thz::SystemParams::validate)
      .def("omega_rabi", &thz::SystemParams::omega_rabi)
      .def("with_rabi_fixed_drive", &thz::SystemParams::with_rabi_fixed_drive)
      .def("with_rabi_fixed_detuning", &thz::SystemParams::with_rabi_fixed_detuning);
  m.def("reference_params", &thz::reference_params);

  py::class_<thz::DressedFrame>(m, "DressedFrame")
      .def_readonly("omega_R", &thz::DressedFrame::omega_R)
      .def_readonly("h", &thz::DressedFrame::h)
      .def_readonly("gamma_plus", &thz::DressedFrame::gamma_plus)
      .def_readonly("gamma_minus", &thz::DressedFrame::gamma_minus)
      .def_readonly("gamma_z", &thz::DressedFrame::gamma_z);
  m.def("dress", py::overload_cast<const thz::SystemParams&>(&thz::dress));

  py::enum_<thz::CavityDissipator>(m, "CavityDissipator")
      .value("standard_a", thz::CavityDissipator::StandardA)
      .value("dressed_X", thz::CavityDissipator::DressedX);
  py::enum_<thz::OutputOperator>(m, "OutputOperator")
      .value("a", thz::OutputOperator::A)
      .value("X_plus", thz::OutputOperator::XPlus);
  py::enum_<thz::HamiltonianForm>(m, "HamiltonianForm")
      .value("full", thz::HamiltonianForm::FullDressed)
      .value("jaynes_cummings", thz::HamiltonianForm::JaynesCummings);
  py::enum_<thz::EmitterDissipator>(m, "EmitterDissipator")
      .value("sigma_minus", thz::EmitterDissipator::SigmaMinus)
      .value("dressed_rates", thz::EmitterDissipator::DressedRates);
  py::class_<thz::ModelVariant>(m, "ModelVariant")
      .def(py::init<>())
      .def_readwrite("dissipator", &thz::ModelVariant::dissipator)
      .def_readwrite("output", &thz::ModelVariant::output)
      .def_readwrite("hamiltonian", &thz::ModelVariant::hamiltonian)
      .def_readwrite("emitter", &thz::ModelVariant::emitter)
      .def_readwrite("thermal", &thz::ModelVariant::thermal);

  m.def(
      "flux_and_g2",
      [](const thz::SystemParams& p, const thz::ModelVariant& v) {
        const thz::StatRecord r = thz::flux_and_g2(p, thz::dress(p), v);
        py::dict d;
        d["flux"] = r.flux;
        d["population"] = r.population;
        d["g2"] = r.g2;
        d["condition"] = r.report.condition;
        d["residual"] = r.report.residual;
        return d;
      },
      py::arg("params"), py::arg("variant") = thz::ModelVariant{});

  m.def(
      "spectrum_direct",
      [](const thz::SystemParams& p, const std::vector<double>& omega, double linewidth, const thz::ModelVariant& v) {
        const thz::Spectrum s = thz::spectrum_direct(p, thz::dress(p), v, omega, linewidth);
        return py::make_tuple(s.value, s.population);
      },
      py::arg("params"), py::arg("omega"), py::arg("linewidth"), py::arg("variant") = thz::ModelVariant{});

  m.def(
      "filtered_g2",
      [](const thz::SystemParams& p, double w1, double w2, double linewidth, const thz::ModelVariant& v) {
        thz::SensorConfig cfg;
        cfg.linewidth = linewidth;
        return thz::filtered_g2(p, thz::dress(p), v, w1, w2, cfg);
      },
      py::arg("params"), py::arg("omega1"), py::arg("omega2"), py::arg("linewidth"),
      py::arg("variant") = thz::ModelVariant{});

  py::module_ an = m.def_submodule("analytic", "closed-form weak-coupling results");
  an.def("flux_lorentzian", [](const thz::SystemParams& p) { return thz::analytic::flux_lorentzian(p, thz::dress(p)); });
  an.def("flux_resonant", [](const thz::SystemParams& p) { return thz::analytic::flux_resonant(p, thz::dress(p)); });
  an.def("g2_truncated", [](const thz::SystemParams& p) { return thz::analytic::g2_truncated(p, thz::dress(p)); });
  an.def("correlation_timescale",
         [](const thz::SystemParams& p) { return thz::analytic::correlation_timescale(p, thz::dress(p)); });

  py::module_ fz = m.def_submodule("feasibility", "detector and material estimates");
  fz.def("min_detectable_power", [](double nep, double bandwidth_hz) {
    return thz::feasibility::min_detectable_power({nep, bandwidth_hz});
  });
  fz.def("sic_permittivity", [](double omega) {
    return thz::feasibility::permittivity(thz::feasibility::LorentzMedium::silicon_carbide(), omega);
  });
  fz.def("thermal_occupation", &thz::feasibility::thermal_occupation);

  m.def(
      "run_sweep",
      [](const std::string& config) {
        thz::ResultGrid grid;
        {
          py::gil_scoped_release release;
          grid = thz::run_sweep(thz::parse_sweep_spec(config));
        }
        return grid_dict(grid);
      },
      py::arg("config_json"));
  m.def("preset_names", &thz::preset_names);
  m.def(
      "run_preset",
      [](const std::string& name, std::size_t workers) {
        thz::PresetOptions o;
        o.workers = workers;
        std::vector<thz::ResultGrid> grids;
        {
          py::gil_scoped_release release;
          grids = thz::run_preset(name, o);
        }
        py::list out;
        for (const auto& g : grids) out.append(grid_dict(g));
        return out;
      },
      py::arg("name"), py::arg("workers") = 1);
}
