#include "riccikit/cli_runner.hpp"
#include "riccikit/inequality_catalog.hpp"
#include "riccikit/metric_families.hpp"
#include "riccikit/specs.hpp"
#include "riccikit/transport_legendre.hpp"
#include "riccikit/verification_engine.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace riccikit;

namespace {

// Structured values cross the boundary as JSON text; the Python side decodes.
std::string catalog_json() {
  Json out = Json::array();
  for (const CatalogEntry& e : catalog()) {
    out.push_back({{"id", e.id},
                   {"statement", e.statement},
                   {"constant_known", e.constant_known},
                   {"parameters", e.parameters},
                   {"min_dim", e.min_dim},
                   {"max_dim", e.max_dim}});
  }
  return out.dump();
}

std::string check_json(const std::string& config, int workers, const std::string& format) {
  const SuiteConfig suite = parse_suite(Json::parse(config));
  const VerificationReport report = run_suite(suite, workers);
  return format == "csv" ? report_csv(report) : report_json(report).dump();
}

std::pair<double, double> spectral_gap(const std::string& potential, double a, double b, int n) {
  const SpectralGap g = spectral_gap_1d(potential_from_json(Json::parse(potential)), a, b, n);
  return {g.lambda1, g.poincare};
}

std::vector<std::pair<double, double>> monotone_map(const std::string& source, const std::string& target,
                                                    const std::vector<double>& xs) {
  const Density1D mu(potential_from_json(Json::parse(source)));
  const Density1D nu(potential_from_json(Json::parse(target)));
  std::vector<std::pair<double, double>> out;
  for (double x : xs) {
    const MapValue m = monotone_map_1d(mu, nu, x);
    out.emplace_back(m.T, m.dT);
  }
  return out;
}

std::vector<std::vector<double>> sample(const std::string& measure, int dim, int n, std::uint64_t seed, int workers) {
  const PointSet x = sample_measure(measure_from_json(Json::parse(measure), dim), n, seed, workers);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(x.cols()), std::vector<double>(dim));
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (int i = 0; i < dim; ++i) out[j][i] = x(i, j);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "riccikit native core";

  static py::exception<Error> error(m, "RiccikitError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    } catch (const Json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("catalog_json", &catalog_json);
  m.def("check_json", &check_json, py::arg("config"), py::arg("workers") = 1, py::arg("format") = "json",
        py::call_guard<py::gil_scoped_release>());
  m.def("spectral_gap", &spectral_gap, py::arg("potential"), py::arg("a"), py::arg("b"), py::arg("n") = 4096);
  m.def("monotone_map", &monotone_map, py::arg("source"), py::arg("target"), py::arg("xs"));
  m.def("sample", &sample, py::arg("measure"), py::arg("dim"), py::arg("n"), py::arg("seed"), py::arg("workers") = 1);
  m.def("ric_1d_power", [](double c, double q, double x) { return ric_1d_exact(potentials::power(c, q), x); });
  m.def("small_dimension_condition", &small_dimension_condition);
  m.def("rho_poly_bounded", &rho_poly_bounded);
  m.def("rho_poly_monotone", &rho_poly_monotone);
}
