// Python bindings. Reports cross the boundary as JSON text; porc/__init__.py
// decodes them into plain dicts.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "porc/alignment.hpp"
#include "porc/approx.hpp"
#include "porc/behavioral.hpp"
#include "porc/errors.hpp"
#include "porc/log_model.hpp"
#include "porc/measures.hpp"
#include "porc/process_model.hpp"
#include "porc/report.hpp"
#include "porc/resolution.hpp"

namespace py = pybind11;

namespace {

porc::ModelSpec spec_of(const std::string& name, bool start_marker) {
  auto spec = porc::ModelSpec::parse(name);
  if (!spec) throw py::value_error("unknown behavioral model '" + name + "'");
  spec->start_marker = start_marker;
  return *spec;
}

porc::ConformanceFunction conf_of(const std::string& name) {
  if (name == "bin") return porc::ConformanceFunction::Binary;
  if (name == "fitness") return porc::ConformanceFunction::Fitness;
  throw py::value_error("conf must be 'bin' or 'fitness'");
}

std::string count_text(const porc::Trace& t) {
  try {
    return std::to_string(porc::resolution_count(t));
  } catch (const porc::CountOverflow&) {
    return "overflow";
  }
}

porc::EventLog read_log(const std::string& path, const std::string& format,
                        const std::string& case_column, const std::string& activity_column,
                        const std::string& timestamp_column, const std::string& timestamp_format) {
  std::string fmt = format;
  if (fmt == "auto") fmt = path.size() >= 4 && path.substr(path.size() - 4) == ".xes" ? "xes" : "csv";
  if (fmt == "xes") return porc::parse_xes(path);
  if (fmt != "csv") throw py::value_error("format must be 'auto', 'csv' or 'xes'");
  porc::CsvOptions o;
  o.mapping = {case_column, activity_column, timestamp_column, {}};
  o.timestamp_format = timestamp_format;
  return porc::parse_csv(path, o);
}

// Same per-trace error handling as the CLI: failures are recorded, not raised.
std::string check(const porc::EventLog& log, const porc::PetriNet& net, const std::string& model,
                  const std::string& conf, bool approx, double alpha, double delta,
                  std::size_t cap, bool start_marker) {
  const porc::ModelSpec spec = spec_of(model, start_marker);
  const auto fn = conf_of(conf);
  porc::Aligner aligner(net);
  const auto bm = porc::BehavioralModel::build(spec, log);
  porc::ApproxOptions opts;
  opts.alpha = alpha;
  opts.delta = delta;
  opts.cap = cap;
  porc::CheckReport report;
  report.conformance = std::string(porc::to_string(fn));
  for (const porc::Trace& t : log.traces()) {
    try {
      const auto r = approx ? porc::approximate_conformance(t, aligner, bm, fn, opts)
                            : porc::exact_conformance(t, aligner, bm, fn, opts);
      report.per_trace.push_back(porc::make_trace_report(t, spec, r));
    } catch (const porc::IoError&) {
      throw;
    } catch (const porc::Error& e) {
      porc::TraceReport entry;
      entry.case_id = t.case_id();
      entry.model = spec.name();
      entry.resolutions = count_text(t);
      entry.error = e.what();
      report.per_trace.push_back(std::move(entry));
    }
  }
  report.log_summary = porc::summarize(report.per_trace, log);
  report.provenance.tool_version = std::string(porc::kToolVersion);
  return porc::to_json(report, -1);
}

std::string resolve(const porc::EventLog& log, const std::string& model, std::size_t top,
                    std::size_t cap, bool start_marker) {
  const porc::ModelSpec spec = spec_of(model, start_marker);
  const auto bm = porc::BehavioralModel::build(spec, log);
  porc::ResolveReport report;
  report.model = spec.name();
  for (const porc::Trace& t : log.traces()) {
    porc::ResolveEntry entry;
    entry.case_id = t.case_id();
    entry.resolutions = count_text(t);
    entry.fallback_used = !porc::has_evidence(t, bm);
    for (const auto& s : porc::k_best(t, bm, top, cap))
      entry.top.push_back({s.resolution.word, s.probability});
    report.traces.push_back(std::move(entry));
  }
  return porc::to_json(report, -1);
}

std::string measures(const porc::EventLog& log, double coverage_threshold) {
  porc::SelectionOptions opts;
  opts.coverage_threshold = coverage_threshold;
  return porc::to_json(porc::recommend(log, opts), -1);
}

}  // namespace

PYBIND11_MODULE(_porc, m) {
  m.doc() = "Conformance checking for event logs with order uncertainty";

  py::register_exception<porc::Error>(m, "PorcError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const porc::IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    }
  });

  py::class_<porc::EventLog>(m, "EventLog")
      .def("__len__", &porc::EventLog::size)
      .def_property_readonly("case_ids",
                             [](const porc::EventLog& l) {
                               std::vector<std::string> ids;
                               for (const auto& t : l.traces()) ids.push_back(t.case_id());
                               return ids;
                             })
      .def_property_readonly("uncertain_count", &porc::EventLog::uncertain_count)
      .def("resolution_counts", [](const porc::EventLog& l) {
        std::vector<std::string> out;
        for (const auto& t : l.traces()) out.push_back(count_text(t));
        return out;
      });

  py::class_<porc::PetriNet>(m, "PetriNet")
      .def_property_readonly("labels", &porc::PetriNet::labels)
      .def("accepts", [](const porc::PetriNet& n, const std::vector<std::string>& w) {
        return porc::accepts(n, w);
      });

  m.def("read_log", &read_log, py::arg("path"), py::arg("format") = "auto",
        py::arg("case_column") = "case", py::arg("activity_column") = "activity",
        py::arg("timestamp_column") = "timestamp",
        py::arg("timestamp_format") = "%Y-%m-%dT%H:%M:%S");
  m.def(
      "read_pnml",
      [](const std::string& path, const std::string& final_place) {
        return porc::parse_pnml(path, porc::PnmlOptions{final_place});
      },
      py::arg("path"), py::arg("final_place") = "");
  m.def(
      "fitness",
      [](const porc::PetriNet& net, const std::vector<std::string>& word) {
        return porc::Aligner(net).fitness(word);
      },
      py::arg("net"), py::arg("word"));
  m.def("check_json", &check, py::arg("log"), py::arg("net"), py::arg("model") = "2g",
        py::arg("conf") = "fitness", py::arg("approx") = false, py::arg("alpha") = 0.99,
        py::arg("delta") = 0.10, py::arg("cap") = porc::kDefaultEnumerationCap,
        py::arg("start_marker") = true);
  m.def("resolve_json", &resolve, py::arg("log"), py::arg("model") = "2g", py::arg("top") = 5,
        py::arg("cap") = porc::kDefaultEnumerationCap, py::arg("start_marker") = true);
  m.def("measures_json", &measures, py::arg("log"), py::arg("coverage_threshold") = 0.8);
  m.def("z_value", &porc::z_value, py::arg("alpha"));
  m.def(
      "wilson_interval",
      [](std::size_t k, std::size_t n, double alpha) {
        const auto ci = porc::wilson_interval(k, n, alpha);
        return py::make_tuple(ci.low, ci.high);
      },
      py::arg("successes"), py::arg("n"), py::arg("alpha"));
  m.attr("__version__") = std::string(porc::kToolVersion);
}
