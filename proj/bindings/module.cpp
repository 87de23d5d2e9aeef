#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "kinex/counts.hpp"
#include "kinex/depairing.hpp"
#include "kinex/errors.hpp"
#include "kinex/io/config.hpp"
#include "kinex/io/touchstone.hpp"
#include "kinex/material.hpp"
#include "kinex/network.hpp"
#include "kinex/pipeline.hpp"
#include "kinex/resfit.hpp"

namespace py = pybind11;
using namespace kinex;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Kinetic-inductance nanowire resonator toolkit";

    auto base = py::register_exception<Error>(m, "KinexError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<FitError>(m, "FitError", base.ptr());
    py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
    py::register_exception<RangeError>(m, "RangeError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<LatchedStateError>(m, "LatchedStateError", base.ptr());

    py::class_<MaterialState>(m, "MaterialState")
        .def(py::init(&MaterialState::make), py::arg("t_c") = 10.0, py::arg("r_sheet") = 400.0,
             py::arg("thickness") = 10.0, py::arg("width") = 100.0, py::arg("gamma_ratio") = 0.0,
             py::arg("delta0") = py::none())
        .def_readwrite("t_c", &MaterialState::t_c)
        .def_readwrite("delta0", &MaterialState::delta0)
        .def_readwrite("gamma_ratio", &MaterialState::gamma_ratio)
        .def_readwrite("r_sheet", &MaterialState::r_sheet)
        .def_readwrite("thickness", &MaterialState::thickness)
        .def_readwrite("width", &MaterialState::width);

    py::class_<ComplexConductivity>(m, "ComplexConductivity")
        .def_readonly("sigma1_norm", &ComplexConductivity::sigma1_norm)
        .def_readonly("sigma2_norm", &ComplexConductivity::sigma2_norm)
        .def_readonly("omega", &ComplexConductivity::omega)
        .def_readonly("temperature", &ComplexConductivity::temperature);

    m.def("gap_at_temperature", &gap_at_temperature, py::arg("material"), py::arg("t"));
    m.def("dynes_dos", &dynes_dos, py::arg("e"), py::arg("delta"), py::arg("gamma"));
    m.def("mb_conductivity",
          [](const MaterialState& s, double omega, double t) { return mb_conductivity(s, omega, t); },
          py::arg("material"), py::arg("omega"), py::arg("t"));
    m.def("sheet_kinetic_inductance",
          py::overload_cast<const MaterialState&, double, double>(&sheet_kinetic_inductance),
          py::arg("material"), py::arg("omega"), py::arg("t"));

    py::enum_<DepairingKind>(m, "DepairingKind")
        .value("quadratic", DepairingKind::quadratic)
        .value("gl_parametric", DepairingKind::gl_parametric)
        .value("divergent", DepairingKind::divergent);

    py::class_<DepairingModel>(m, "DepairingModel")
        .def(py::init([](DepairingKind k, double c, double i0, double tc) { return DepairingModel{k, c, i0, tc}; }),
             py::arg("kind") = DepairingKind::gl_parametric, py::arg("c_coeff") = 0.3, py::arg("i_dep0") = 30.0,
             py::arg("t_c") = 10.0)
        .def_readwrite("kind", &DepairingModel::kind)
        .def_readwrite("c_coeff", &DepairingModel::c_coeff)
        .def_readwrite("i_dep0", &DepairingModel::i_dep0)
        .def_readwrite("t_c", &DepairingModel::t_c);

    m.def("lk_ratio", &lk_ratio, py::arg("model"), py::arg("i_norm"));
    m.def("small_signal_coefficient", &small_signal_coefficient, py::arg("model"));
    m.def("idep_at_temperature", &idep_at_temperature, py::arg("model"), py::arg("t"));
    m.def("c_from_gamma", [](double g) { return c_from_gamma(g); }, py::arg("gamma_ratio"));
    m.def("gamma_from_c", [](double c) { return gamma_from_c(c); }, py::arg("c"));

    py::class_<BiasPoint>(m, "BiasPoint")
        .def(py::init([](double i, double t, double b) { return BiasPoint{i, t, b}; }), py::arg("current") = 0.0,
             py::arg("temperature") = 0.0, py::arg("field") = 0.0)
        .def_readwrite("current", &BiasPoint::current)
        .def_readwrite("temperature", &BiasPoint::temperature)
        .def_readwrite("field", &BiasPoint::field);

    py::class_<SweepRecord>(m, "SweepRecord")
        .def(py::init<>())
        .def_readwrite("freqs", &SweepRecord::freqs)
        .def_readwrite("s21", &SweepRecord::s21)
        .def_readwrite("bias", &SweepRecord::bias);
    m.def("linear_grid", &linear_grid, py::arg("start"), py::arg("stop"), py::arg("points"));

    py::class_<Segment>(m, "Segment")
        .def(py::init<>())
        .def_readwrite("length", &Segment::length)
        .def_readwrite("material", &Segment::material)
        .def_readwrite("depairing", &Segment::depairing)
        .def_readwrite("l_geo", &Segment::l_geo)
        .def_readwrite("c_shunt", &Segment::c_shunt)
        .def_readwrite("label", &Segment::label);

    py::class_<DeviceModel>(m, "DeviceModel")
        .def(py::init<>())
        .def_readwrite("segments", &DeviceModel::segments)
        .def_readwrite("coupling_cap", &DeviceModel::coupling_cap)
        .def_readwrite("z_ref", &DeviceModel::z_ref)
        .def_readwrite("current_loss", &DeviceModel::current_loss)
        .def("depairing_current", &DeviceModel::depairing_current, py::arg("t"));
    m.def("default_device", &default_device);
    m.def("simulate_s21",
          [](const DeviceModel& d, const BiasPoint& b, const std::vector<double>& f) { return simulate_s21(d, b, f); },
          py::arg("device"), py::arg("bias"), py::arg("freqs_ghz"));

    py::class_<ResonanceFit>(m, "ResonanceFit")
        .def_readonly("f0", &ResonanceFit::f0)
        .def_readonly("q_total", &ResonanceFit::q_total)
        .def_readonly("amplitude", &ResonanceFit::amplitude)
        .def_readonly("rms_residual", &ResonanceFit::rms_residual)
        .def_property_readonly("method", [](const ResonanceFit& r) { return to_string(r.method); });
    m.def("fit_all", [](const SweepRecord& s, double p) { return fit_all(s, p); }, py::arg("sweep"),
          py::arg("min_prominence") = 0.05);

    py::class_<LkCurve>(m, "LkCurve")
        .def_readonly("points", &LkCurve::points)
        .def_readonly("f0_zero_bias", &LkCurve::f0_zero_bias)
        .def_readonly("extrapolated", &LkCurve::extrapolated);
    m.def("lk_curve_from_f0",
          [](const std::vector<std::pair<double, double>>& s) { return lk_curve_from_f0(s); },
          py::arg("f0_series"));

    py::class_<CurveFit>(m, "CurveFit")
        .def_readonly("c_coeff", &CurveFit::c_coeff)
        .def_readonly("i_dep", &CurveFit::i_dep)
        .def_readonly("rms", &CurveFit::rms)
        .def_readonly("warnings", &CurveFit::warnings);
    m.def("fit_depairing",
          [](const LkCurve& c, DepairingKind k, std::optional<double> ref) {
              DepairingFitOptions o;
              if (ref) o.idep_reference = IdepReference{*ref, 0.0};
              return fit_depairing(c, k, o);
          },
          py::arg("curve"), py::arg("kind") = DepairingKind::gl_parametric, py::arg("idep_reference") = py::none());

    py::class_<CountModel>(m, "CountModel")
        .def_readwrite("i_sw", &CountModel::i_sw)
        .def_readwrite("latch_current", &CountModel::latch_current);
    m.def("default_count_model", &default_count_model);
    m.def("dcr_rate", &dcr_rate, py::arg("model"), py::arg("i"), py::arg("t"));
    m.def("dcr_onset", &dcr_onset, py::arg("curve"), py::arg("threshold") = 1.0);
    m.def("dcr_curve", &dcr_curve, py::arg("model"), py::arg("currents"), py::arg("t"));

    m.def("read_touchstone", [](const std::string& p) { return io::read_touchstone(p); }, py::arg("path"));
    m.def("load_config_device", [](const std::string& p) { return io::load_config(p).device; }, py::arg("path"));

    m.def("run_cli",
          [](std::vector<std::string> args) {
              args.insert(args.begin(), "kinex");
              std::vector<const char*> argv;
              for (const auto& a : args) argv.push_back(a.c_str());
              std::ostringstream out, err;
              const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"), "Run the kinex command line in-process; returns (exit_code, stdout, stderr).");
}
