#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "gssdecon/bandwidth.hpp"
#include "gssdecon/errors.hpp"
#include "gssdecon/estimator.hpp"
#include "gssdecon/gmm.hpp"
#include "gssdecon/gss.hpp"
#include "gssdecon/harness.hpp"
#include "gssdecon/ingestion.hpp"
#include "gssdecon/selection.hpp"

namespace py = pybind11;
using namespace gssd;

namespace {

py::dict solution_dict(const GmmSolution& s) {
  py::dict d;
  d["xi"] = s.xi;
  d["omega"] = s.omega;
  d["d"] = s.d;
  d["starts"] = s.starts;
  return d;
}

py::dict selection_dict(const SelectionRecord& s) {
  py::dict d;
  d["criterion"] = to_string(s.criterion);
  d["chosen"] = s.chosen;
  d["scores"] = s.scores;
  d["tstar"] = s.tstar;
  d["warnings"] = s.warnings;
  return d;
}

GssModel make_model(const std::string& skew, double xi, double omega, double slope) {
  if (skew == "half" || skew == "pi0") return GssModel(SkewingFunction::constant_half(), xi, omega);
  if (skew == "probit") return GssModel(SkewingFunction::probit_scaled(slope), xi, omega);
  if (skew == "pi1") return GssModel(SkewingFunction::probit_scaled(kSharpProbitSlope), xi, omega);
  if (skew == "cubic" || skew == "pi2") return GssModel(SkewingFunction::probit_cubic(), xi, omega);
  throw Error(ErrorKind::Config, "unknown skewing function '" + skew + "'");
}

CsvTable table_from_rows(const std::vector<std::vector<double>>& rows) {
  CsvTable t;
  const std::size_t k = rows.empty() ? 0 : rows.front().size();
  for (std::size_t j = 0; j < k; ++j) t.header.push_back("c" + std::to_string(j + 1));
  for (const auto& r : rows) {
    if (r.size() != k) throw Error(ErrorKind::Parse, "rows differ in length");
  }
  t.rows = rows;
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Skew-symmetric density deconvolution";

  // Raised with a `kind` attribute naming the library error kind.
  static py::handle exc_type = py::exception<Error>(m, "GssdeconError", PyExc_RuntimeError).inc_ref();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = exc_type(std::string(to_string(e.kind())) + ": " + e.what());
      err.attr("kind") = to_string(e.kind());
      PyErr_SetObject(exc_type.ptr(), err.ptr());
    }
  });

  py::class_<ErrorModel>(m, "ErrorModel")
      .def(py::init([](const std::string& family, double variance) {
             return ErrorModel(parse_error_family(family), variance);
           }),
           py::arg("family"), py::arg("variance"))
      .def_property_readonly("family",
                             [](const ErrorModel& e) { return std::string(to_string(e.family())); })
      .def_property_readonly("variance", &ErrorModel::variance)
      .def("cf", &ErrorModel::cf, py::arg("t"))
      .def("pdf", &ErrorModel::pdf, py::arg("u"))
      .def("__repr__", [](const ErrorModel& e) {
        return std::string("ErrorModel('") + to_string(e.family()) + "', " +
               std::to_string(e.variance()) + ")";
      });

  py::class_<GssModel>(m, "GssModel")
      .def(py::init(&make_model), py::arg("skew") = "pi1", py::arg("xi") = 0.0,
           py::arg("omega") = 1.0, py::arg("slope") = kSharpProbitSlope,
           "skew: 'half'/'pi0', 'probit' (with slope), 'pi1', 'cubic'/'pi2'")
      .def_property_readonly("xi", &GssModel::xi)
      .def_property_readonly("omega", &GssModel::omega)
      .def("pdf", &GssModel::pdf, py::arg("x"))
      .def("skew", [](const GssModel& g, double z) { return g.skew()(z); }, py::arg("z"))
      .def("mean", [](const GssModel& g) { return model_mean(g); })
      .def("variance", [](const GssModel& g) { return model_variance(g); });

  m.def("truth_model", [](const std::string& k) { return truth_model(parse_truth_kind(k)); },
        py::arg("kind"), "simulation truth 'pi0', 'pi1' or 'pi2'");
  m.def("gss_sample", &gss_sample, py::arg("n"), py::arg("model"), py::arg("seed"));

  py::class_<DeconvFit>(m, "DeconvFit")
      .def_property_readonly("xi", &DeconvFit::xi)
      .def_property_readonly("omega", &DeconvFit::omega)
      .def_readonly("h", &DeconvFit::h)
      .def("density", &DeconvFit::density, py::arg("x"))
      .def("density", [](const DeconvFit& f, const std::vector<double>& xs) {
             std::vector<double> out;
             out.reserve(xs.size());
             for (double x : xs) out.push_back(f.density(x));
             return out;
           }, py::arg("x"))
      .def("skew", [](const DeconvFit& f, double z) { return f.model.skew()(z); }, py::arg("z"));

  m.def(
      "gmm_solve",
      [](const std::vector<double>& w, const ErrorModel& error, int moments) {
        py::list out;
        for (const auto& s : gmm_solve(w, MomentSpec(moments, error))) out.append(solution_dict(s));
        return out;
      },
      py::arg("w"), py::arg("error"), py::arg("moments") = 5);

  m.def(
      "run_pipeline",
      [](const std::vector<double>& w, const ErrorModel& error, const std::string& bandwidth,
         const std::string& select, int moments, double kappa, std::optional<double> tstar,
         std::uint64_t seed) {
        PipelineConfig cfg;
        cfg.bandwidth = parse_bandwidth_method(bandwidth);
        cfg.selection = parse_selection_criterion(select);
        cfg.moments = moments;
        cfg.kappa = kappa;
        cfg.tstar = tstar;
        cfg.seed = seed;
        const PipelineResult r = run_pipeline(w, error, cfg);
        py::dict d;
        py::list sols;
        for (const auto& s : r.solutions) sols.append(solution_dict(s));
        py::list cands;
        for (const auto& c : r.candidates) {
          py::dict cd = solution_dict(c.solution);
          cd["h"] = c.bandwidth.h;
          cands.append(cd);
        }
        d["solutions"] = sols;
        d["candidates"] = cands;
        d["selection"] = selection_dict(r.selection);
        d["dropped"] = r.dropped;
        d["fit"] = r.fit;
        return d;
      },
      py::arg("w"), py::arg("error"), py::arg("bandwidth") = "mise", py::arg("select") = "phase",
      py::arg("moments") = 5, py::arg("kappa") = kDefaultKappa, py::arg("tstar") = py::none(),
      py::arg("seed") = 20240601);

  m.def(
      "plugin_bandwidth",
      [](const std::vector<double>& w, const ErrorModel& error) { return plugin_bandwidth(w, error); },
      py::arg("w"), py::arg("error"));

  m.def(
      "np_fit",
      [](const std::vector<double>& w, const ErrorModel& error, double h,
         std::optional<std::vector<double>> x) {
        const NonparFit f = np_fit(w, error, h, x ? *x : default_xgrid(w));
        py::dict d;
        d["x"] = f.x;
        d["density"] = f.density;
        d["h"] = f.h;
        d["truncated"] = f.truncated;
        return d;
      },
      py::arg("w"), py::arg("error"), py::arg("h"), py::arg("x") = py::none());

  m.def(
      "harmonize_pairs",
      [](const std::vector<double>& w1, const std::vector<double>& w2) {
        const PairedEstimate p = harmonize_pairs(w1, w2);
        py::dict d;
        d["w"] = p.w;
        d["mu"] = p.mu;
        d["sigma"] = p.sigma;
        d["sigma_u2"] = p.sigma_u2;
        d["error_variance"] = p.error_variance;
        d["signal_variance"] = p.signal_variance;
        d["nsr"] = p.nsr;
        return d;
      },
      py::arg("w1"), py::arg("w2"));

  m.def(
      "replicate_average",
      [](const std::vector<std::vector<double>>& rows, double shift, bool log) {
        const ReplicateEstimate r = replicate_average(table_from_rows(rows), {shift, log});
        py::dict d;
        d["w"] = r.w;
        d["sigma_x"] = r.sigma_x;
        d["sigma_u"] = r.sigma_u;
        d["error_variance"] = r.error_variance;
        d["nsr"] = r.nsr;
        d["rejected_rows"] = r.rejected_rows;
        return d;
      },
      py::arg("rows"), py::arg("shift") = 50.0, py::arg("log") = true,
      "rows of 2 exam means or 4 readings (two per exam)");

  m.def(
      "simulate",
      [](const std::string& config_json) {
        SimResult r;
        {
          py::gil_scoped_release release;
          r = run_study(sim_config_from_json(config_json));
        }
        return py::make_tuple(sim_result_to_json(r), sim_result_to_csv(r));
      },
      py::arg("config_json"), "run a simulation study; returns (summary JSON, replicate CSV)");
}
