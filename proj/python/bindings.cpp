#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "talbotlau/classical.hpp"
#include "talbotlau/errors.hpp"
#include "talbotlau/fresnel_oracle.hpp"
#include "talbotlau/runner.hpp"
#include "talbotlau/scanlab.hpp"

namespace py = pybind11;
using namespace talbot;

namespace {

py::dict curve_dict(const VisibilityCurve& c) {
  std::vector<double> v, vis, flux;
  for (const auto& p : c.points) {
    v.push_back(p.v_center);
    vis.push_back(p.visibility);
    flux.push_back(p.flux);
  }
  py::dict d;
  d["v_center"] = v;
  d["visibility"] = vis;
  d["flux"] = flux;
  return d;
}

DistributionModel model_from(const std::string& kind, std::optional<double> fwhm) {
  DistributionModel m;
  if (kind == "delta")
    m.kind = DistributionKind::delta;
  else if (kind == "gaussian")
    m.kind = DistributionKind::gaussian;
  else if (kind == "effusive_weighted_gaussian")
    m.kind = DistributionKind::effusive_weighted_gaussian;
  else
    throw ConfigError("unknown distribution kind '" + kind + "'");
  m.fwhm_fraction = fwhm;
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Talbot-Lau matter-wave interferometer simulator";
  m.attr("__version__") = "0.1.0";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_RuntimeError);
  py::register_exception<EmptyBandError>(m, "EmptyBandError", PyExc_RuntimeError);
  py::register_exception<OracleFailure>(m, "OracleFailure", PyExc_RuntimeError);

  m.attr("PLANCK") = constants::planck;
  m.attr("AMU") = constants::amu;
  m.attr("EV_NM3") = units::eV_nm3;

  m.def("de_broglie_wavelength", &de_broglie_wavelength, py::arg("mass"), py::arg("v"));
  m.def("talbot_length", &talbot_length, py::arg("period"), py::arg("wavelength"));
  m.def("talbot_velocity", &talbot_velocity, py::arg("mass"), py::arg("period"), py::arg("distance"));
  m.def("c3_from_polarizability", &c3_from_polarizability, py::arg("alpha_A3"));

  py::class_<Species>(m, "Species")
      .def(py::init<>())
      .def_static("c70", &Species::c70)
      .def_readwrite("name", &Species::name)
      .def_readwrite("mass", &Species::mass)
      .def_readwrite("dc_polarizability", &Species::dc_polarizability)
      .def_readwrite("c3_gold", &Species::c3_gold);

  py::class_<Geometry>(m, "Geometry")
      .def(py::init<>())
      .def_readwrite("L1", &Geometry::L1)
      .def_readwrite("L2", &Geometry::L2)
      .def_readwrite("tilt_alpha", &Geometry::tilt_alpha)
      .def_readwrite("g", &Geometry::g);

  py::class_<GratingSpec>(m, "GratingSpec")
      .def(py::init<>())
      .def_readwrite("period", &GratingSpec::period)
      .def_readwrite("open_fraction", &GratingSpec::open_fraction)
      .def_readwrite("thickness", &GratingSpec::thickness)
      .def_readwrite("c3", &GratingSpec::c3)
      .def_readwrite("edge_cutoff", &GratingSpec::edge_cutoff)
      .def("effective_open_fraction", &GratingSpec::effective_open_fraction);

  py::class_<Numerics>(m, "Numerics")
      .def(py::init<>())
      .def_readwrite("samples_per_period", &Numerics::samples_per_period)
      .def_readwrite("n_max", &Numerics::n_max)
      .def_readwrite("k_max", &Numerics::k_max)
      .def_readwrite("velocity_nodes", &Numerics::velocity_nodes)
      .def_readwrite("threads", &Numerics::threads);

  py::class_<Interferometer>(m, "Interferometer")
      .def(py::init<>())
      .def_static("c70_default", &Interferometer::c70_default)
      .def_readwrite("species", &Interferometer::species)
      .def_readwrite("gratings", &Interferometer::gratings)
      .def_readwrite("geometry", &Interferometer::geometry)
      .def_readwrite("numerics", &Interferometer::numerics)
      .def_readwrite("oven_temperature", &Interferometer::oven_temperature)
      .def("talbot_parameter", &Interferometer::talbot_parameter, py::arg("v"));

  m.def("vdw_phase", &vdw_phase, py::arg("grating"), py::arg("x"), py::arg("v"));
  m.def(
      "fourier_coeffs",
      [](const GratingSpec& g, double v, std::size_t samples, int n_max) {
        return fourier_coeffs(build_transmission(g, v, samples), n_max).coeffs;
      },
      py::arg("grating"), py::arg("v"), py::arg("samples") = 65536, py::arg("n_max") = 64,
      "Coefficients b_n for n = -n_max..n_max.");
  m.def(
      "talbot_coefficients",
      [](const GratingSpec& g, double v, double xi, int m_max, std::size_t samples, int n_max) {
        return talbot_coefficients(fourier_coeffs(build_transmission(g, v, samples), n_max), xi, m_max).coeffs;
      },
      py::arg("grating"), py::arg("v"), py::arg("xi"), py::arg("m_max") = 16, py::arg("samples") = 65536,
      py::arg("n_max") = 512);
  m.def("gravity_phase", &gravity_phase, py::arg("geometry"), py::arg("period"), py::arg("v"));

  py::class_<FringeSpectrum>(m, "FringeSpectrum")
      .def_readonly("harmonics", &FringeSpectrum::harmonics)
      .def_readonly("period", &FringeSpectrum::period)
      .def("visibility", &FringeSpectrum::visibility)
      .def("contrast", &FringeSpectrum::contrast, py::arg("grid") = 1024)
      .def("phase", &FringeSpectrum::phase)
      .def("signal", &FringeSpectrum::signal, py::arg("x"));

  m.def("monochromatic_spectrum", &monochromatic_spectrum, py::arg("ifm"), py::arg("v"), py::arg("vdw") = true);
  m.def("monochromatic_visibility", &monochromatic_visibility, py::arg("ifm"), py::arg("v"),
        py::arg("vdw") = true);
  m.def("fwhm_model", &fwhm_model, py::arg("v0"));
  m.def(
      "velocity_averaged",
      [](const Interferometer& ifm, double center, bool vdw, const std::string& kind,
         std::optional<double> fwhm) {
        const auto a = velocity_averaged(ifm, model_from(kind, fwhm).at(center), vdw);
        return py::make_tuple(a.visibility, a.flux);
      },
      py::arg("ifm"), py::arg("center"), py::arg("vdw") = true, py::arg("kind") = "gaussian",
      py::arg("fwhm_fraction") = py::none(), "Returns (visibility, relative flux).");
  m.def(
      "visibility_curve",
      [](const Interferometer& ifm, const std::vector<double>& centers, bool vdw, const std::string& kind,
         std::optional<double> fwhm) { return curve_dict(visibility_curve(ifm, centers, model_from(kind, fwhm), vdw)); },
      py::arg("ifm"), py::arg("centers"), py::arg("vdw") = true, py::arg("kind") = "gaussian",
      py::arg("fwhm_fraction") = py::none());

  m.def("vdw_kick", &vdw_kick, py::arg("grating"), py::arg("x"), py::arg("v"), py::arg("mass"));
  m.def(
      "classical_visibility",
      [](const Interferometer& ifm, double v, bool vdw) { return classical_visibility(ifm, v, vdw); },
      py::arg("ifm"), py::arg("v"), py::arg("vdw") = true);
  m.def(
      "classical_signal",
      [](const Interferometer& ifm, double v, bool vdw, const std::vector<double>& shifts) {
        return classical_signal(ifm, v, vdw, shifts);
      },
      py::arg("ifm"), py::arg("v"), py::arg("vdw"), py::arg("shifts"));
  m.def(
      "classical_visibility_curve",
      [](const Interferometer& ifm, const std::vector<double>& centers, bool vdw, const std::string& kind,
         std::optional<double> fwhm) {
        return curve_dict(classical_visibility_curve(ifm, centers, model_from(kind, fwhm), vdw));
      },
      py::arg("ifm"), py::arg("centers"), py::arg("vdw") = true, py::arg("kind") = "gaussian",
      py::arg("fwhm_fraction") = py::none());
  m.def("classical_focal_length", &classical_focal_length, py::arg("grating"), py::arg("v"), py::arg("mass"));
  m.def("tilt_visibility_factor", &tilt_visibility_factor, py::arg("delta_theta"), py::arg("beam_height"),
        py::arg("period"));

  py::class_<OracleSettings>(m, "OracleSettings")
      .def(py::init<>())
      .def_readwrite("grating_samples", &OracleSettings::grating_samples)
      .def_readwrite("source_samples", &OracleSettings::source_samples)
      .def_readwrite("screen_samples", &OracleSettings::screen_samples)
      .def_readwrite("shifts", &OracleSettings::shifts)
      .def_readwrite("aperture_orders", &OracleSettings::aperture_orders)
      .def_readwrite("doubling_tolerance", &OracleSettings::doubling_tolerance);
  m.def(
      "fresnel_oracle",
      [](const Interferometer& ifm, double v, bool vdw, const OracleSettings& s) {
        return fresnel_oracle(ifm, v, vdw, s).spectrum;
      },
      py::arg("ifm"), py::arg("v"), py::arg("vdw") = true, py::arg("settings") = OracleSettings{});

  py::class_<ScanRecord>(m, "ScanRecord")
      .def(py::init<>())
      .def_readwrite("positions", &ScanRecord::positions)
      .def_readwrite("counts", &ScanRecord::counts)
      .def_readwrite("dwell", &ScanRecord::dwell)
      .def_readwrite("timestamp", &ScanRecord::timestamp)
      .def_readwrite("period", &ScanRecord::period)
      .def_readwrite("seed", &ScanRecord::seed)
      .def("to_csv", [](const ScanRecord& s) { return to_csv(s); })
      .def_static("from_csv", [](const std::string& text) { return scan_from_csv(text); });

  py::class_<FringeFit>(m, "FringeFit")
      .def_readonly("visibility", &FringeFit::visibility)
      .def_readonly("phase", &FringeFit::phase)
      .def_readonly("mean_rate", &FringeFit::mean_rate)
      .def_readonly("amplitude", &FringeFit::amplitude)
      .def_readonly("sigma_visibility", &FringeFit::sigma_visibility)
      .def_readonly("sigma_phase", &FringeFit::sigma_phase)
      .def_readonly("sigma_amplitude", &FringeFit::sigma_amplitude);

  m.def("uniform_positions", &uniform_positions, py::arg("points"), py::arg("periods"), py::arg("period"));
  m.def(
      "synthesize_scan",
      [](double rate, double visibility, double phase, double period, const std::vector<double>& positions,
         double dwell, double dark_rate, std::uint64_t seed, double timestamp) {
        return synthesize_scan(rate, visibility, phase, period, positions, dwell, dark_rate, seed, timestamp);
      },
      py::arg("mean_rate"), py::arg("visibility"), py::arg("phase"), py::arg("period"), py::arg("positions"),
      py::arg("dwell"), py::arg("dark_rate") = 0.0, py::arg("seed") = 1, py::arg("timestamp") = 0.0);
  m.def("extract_fringe", &extract_fringe, py::arg("scan"), py::arg("period"),
        py::arg("dark_rate") = py::none());
  m.def("snr_estimate", &snr_estimate, py::arg("scan"), py::arg("period"));
  m.def(
      "drift_rate",
      [](const std::vector<ScanRecord>& scans, double period) {
        const auto r = drift_rate(scans, period);
        return py::make_tuple(r.rate, r.sigma, r.ambiguous);
      },
      py::arg("scans"), py::arg("period"), "Returns (rate m/s, sigma m/s, ambiguous).");

  py::class_<VelocityBand>(m, "VelocityBand")
      .def_readonly("v_min", &VelocityBand::v_min)
      .def_readonly("v_center", &VelocityBand::v_center)
      .def_readonly("v_max", &VelocityBand::v_max)
      .def_readonly("unbounded", &VelocityBand::unbounded);
  py::class_<SelectorGeometry>(m, "SelectorGeometry")
      .def(py::init<>())
      .def_readwrite("oven_height", &SelectorGeometry::oven_height)
      .def_readwrite("limiter_height", &SelectorGeometry::limiter_height)
      .def_readwrite("limiter_z", &SelectorGeometry::limiter_z)
      .def_readwrite("detector_z", &SelectorGeometry::detector_z)
      .def_readwrite("detector_height", &SelectorGeometry::detector_height)
      .def_readwrite("g", &SelectorGeometry::g);
  m.def(
      "velocity_band_from_geometry",
      [](const SelectorGeometry& sel, double offset) { return velocity_band_from_geometry(sel, offset); },
      py::arg("selector"), py::arg("oven_offset"));

  m.def("default_config_text", &default_config_text);
  m.def(
      "run_visibility_sweep",
      [](const std::string& config_text) {
        const SweepResult r = run_visibility_sweep(parse_config(config_text));
        py::dict d;
        d["v_center_mps"] = r.centers;
        for (const auto& c : r.columns) d[py::str(c.name)] = c.values;
        return d;
      },
      py::arg("config_text") = "", "Runs the sweep scenario for a configuration text.");
}
