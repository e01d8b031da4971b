#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "afflab/json_io.hpp"
#include "afflab/lab.hpp"

namespace py = pybind11;
using namespace afflab;
using nlohmann::ordered_json;

namespace {

// Everything crosses the boundary as JSON text; the Python package converts to dicts.
nlohmann::json parse(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(e.what());
  }
}

AffineElement element(const std::string& text) { return json::read_element(parse(text)); }

std::string dump(const ordered_json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_afflab, m) {
  m.doc() = "Exact p-adic affine actions and Poisson configuration checks";

  m.def("valuation", [](const std::string& x, long p) { return valuation(parse_rational(x), Prime(p)); });
  m.def("padic_norm", [](const std::string& x, long p) { return to_string(padic_norm(parse_rational(x), Prime(p))); });

  m.def("act_point", [](const std::string& g, const std::string& x) {
    return to_string(act_point(element(g), parse_rational(x)));
  });
  m.def("product_motion", [](const std::string& g2, const std::string& g1) {
    return dump(json::write(product_motion(element(g2), element(g1))));
  });
  m.def("product_pointwise", [](const std::string& g2, const std::string& g1) {
    return dump(json::write(product_pointwise(element(g2), element(g1))));
  });
  m.def("is_bijective", [](const std::string& g) { return is_bijective(element(g)).verdict; });
  m.def("pushforward_density", [](const std::string& g) { return dump(json::write(pushforward_density(element(g)))); });
  m.def("mass_defect", [](const std::string& g) { return to_string(mass_defect(element(g))); });

  m.def("integrate", [](const std::string& f, long p) { return to_string(integrate(json::read_step(parse(f), Prime(p)))); });
  m.def("laplace_exponent", [](const std::string& phi, long p) {
    return to_string(laplace_exact(json::read_step(parse(phi), Prime(p))).exponent);
  });

  m.def(
      "sample",
      [](const std::string& window, long p, std::uint64_t seed, std::size_t count, std::optional<long> resolution) {
        Ball ball = json::read_ball(parse(window), Prime(p));
        WindowSpec spec = make_window({Region(ball)});
        RandomStream rng(seed);
        std::vector<std::vector<std::string>> out;
        for (std::size_t i = 0; i < count; ++i) {
          std::vector<std::string> points;
          Configuration gamma = sample_configuration(spec, resolution.value_or(ball.level() - 4), rng);
          for (const auto& x : gamma.points()) {
            points.push_back(to_string(x));
          }
          out.push_back(std::move(points));
        }
        return out;
      },
      py::arg("window"), py::arg("prime") = 3, py::arg("seed") = 0, py::arg("count") = 1,
      py::arg("resolution") = py::none());

  m.def("expectation_exact", [](const std::string& f) {
    return dump(json::write(expectation_exact(json::read_rep_function(parse(f)))));
  });
  m.def(
      "expectation_mc",
      [](const std::string& f, std::uint64_t samples, std::uint64_t seed) {
        auto fn = json::read_rep_function(parse(f));
        py::gil_scoped_release release;
        return dump(json::write(expectation_mc(fn, McPlan{samples, seed})));
      },
      py::arg("f"), py::arg("samples") = 100000, py::arg("seed") = 0);

  m.def("counterexamples", [] {
    std::vector<std::string> out;
    for (const auto& r : counterexample_registry()) out.push_back(dump(to_json(r)));
    return out;
  });
  m.def("reverify", [](const std::string& record) {
    return reverify(check_record_from_json(ordered_json::parse(record)));
  });
  m.def("run_suite", [](const std::string& config) {
    LabConfig c = lab_config_from_json(parse(config));
    SuiteReport report;
    {
      py::gil_scoped_release release;
      report = run_suite(c);
    }
    std::vector<std::string> records;
    for (const auto& r : report.records) records.push_back(dump(to_json(r)));
    return py::make_tuple(report.ok(), records, report.summary());
  });
}
