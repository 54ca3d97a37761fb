#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "escalife/energy.hpp"
#include "escalife/error.hpp"
#include "escalife/health.hpp"
#include "escalife/rul.hpp"
#include "escalife/vibration.hpp"

namespace py = pybind11;
using namespace escalife;

namespace {

vibration::SpectrumRecord spectrum(std::vector<double> magnitudes, double bin_hz) {
  vibration::SpectrumRecord s;
  s.bin_hz = bin_hz;
  s.magnitudes = std::move(magnitudes);
  return s;
}

vibration::BandSelection band(double lo_khz, double hi_khz) {
  vibration::BandSelection b;
  b.band_lo_khz = lo_khz;
  b.band_hi_khz = hi_khz;
  return b;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the escalife toolkit.";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def(
      "compute_lhi",
      [](double working_hours, double passenger_load, double at_areas, double fixed_loss_residual, double fault_counts) {
        health::LhiInputs n;
        n.working_time = working_hours;
        n.passenger_load = passenger_load;
        n.exceedance_area = at_areas;
        n.fixed_loss_residual = fixed_loss_residual;
        n.fault_count = fault_counts;
        return health::compute_lhi(n);
      },
      py::arg("working_hours"), py::arg("passenger_load"), py::arg("at_areas"), py::arg("fixed_loss_residual"),
      py::arg("fault_counts"), "Weighted LHI of five normalised variables.");

  m.def(
      "normalize", [](double raw, const std::string& variable) { return health::normalize(raw, variable); },
      py::arg("raw"), py::arg("variable"), "Min-max normalisation clamped to [0, 1].");

  m.def(
      "remaining_useful_life",
      [](double lhi, double actual_age, double a, double b, double t_end) {
        health::LhiModel model;
        model.a = a;
        model.b = b;
        model.set_end_of_life(t_end);
        health::validate(model);
        const auto r = rul::remaining_useful_life(lhi, actual_age, model);
        py::dict d;
        d["estimated_age"] = r.estimated_age;
        d["rul"] = r.rul_years;
        d["end_age"] = r.end_age_years;
        return d;
      },
      py::arg("lhi"), py::arg("actual_age"), py::arg("a") = 0.0928, py::arg("b") = 0.0665,
      py::arg("t_end") = health::kDefaultEndOfLifeYears);

  m.def(
      "fit_exponential",
      [](const std::vector<double>& ages, const std::vector<double>& lhi, bool refine) {
        auto fit = health::fit_exponential(ages, lhi);
        if (refine) fit = health::refine_exponential(ages, lhi, fit);
        return std::make_tuple(fit.a, fit.b);
      },
      py::arg("ages"), py::arg("lhi"), py::arg("refine") = false, "Returns (a, b) of y = a * exp(b * t).");

  m.def(
      "band_rms",
      [](std::vector<double> magnitudes, double bin_hz, double lo_khz, double hi_khz) {
        return vibration::band_rms(spectrum(std::move(magnitudes), bin_hz), lo_khz, hi_khz);
      },
      py::arg("magnitudes"), py::arg("bin_hz"), py::arg("lo_khz"), py::arg("hi_khz"));

  m.def(
      "at_value",
      [](std::vector<double> magnitudes, double bin_hz, double lo_khz, double hi_khz) {
        return vibration::at_value(spectrum(std::move(magnitudes), bin_hz), band(lo_khz, hi_khz));
      },
      py::arg("magnitudes"), py::arg("bin_hz"), py::arg("lo_khz"), py::arg("hi_khz"));

  m.def(
      "exceedance_area", [](const std::vector<double>& values) { return vibration::exceedance_area(values); },
      py::arg("values"));

  m.def(
      "fft_magnitude",
      [](const std::vector<double>& samples, double sample_rate_hz) {
        auto s = vibration::fft_magnitude(samples, sample_rate_hz);
        return std::make_tuple(s.bin_hz, s.magnitudes);
      },
      py::arg("samples"), py::arg("sample_rate_hz"), "Returns (bin_hz, magnitudes).");

  m.def(
      "estimate_passengers",
      [](double variable_loss_wh, double rise_m, const std::string& direction) {
        EscalatorMeta meta;
        meta.rise_m = rise_m;
        meta.direction = parse_direction(direction);
        return energy::estimate_passengers(variable_loss_wh, meta);
      },
      py::arg("variable_loss_wh"), py::arg("rise_m"), py::arg("direction") = "Up");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::dispatch(args, out, err);
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line; returns (exit_code, stdout, stderr).");
}
