#include "porc/report.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "porc/errors.hpp"

namespace porc {

using nlohmann::json;

double round6(double x) {
  if (!std::isfinite(x)) return x;
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

TraceReport make_trace_report(const Trace& trace, const ModelSpec& spec, const ApproxResult& r) {
  TraceReport t;
  t.case_id = trace.case_id();
  try {
    t.resolutions = std::to_string(resolution_count(trace));
  } catch (const CountOverflow&) {
    t.resolutions = "overflow";
  }
  t.model = spec.name();
  t.expected_conf = round6(r.expected);
  // Rounding must not push the estimate outside its own interval.
  t.ci_low = std::min(round6(r.ci_low), t.expected_conf);
  t.ci_high = std::max(round6(r.ci_high), t.expected_conf);
  t.sampled = r.sampled;
  t.exact = r.exact;
  t.p_bar = round6(r.p_bar);
  t.fallback_used = r.fallback_used;
  for (const SkipMass& s : r.skip_mass)
    t.skip_mass.push_back(SkipMassEntry{std::string(to_string(s.kind)), s.activity, round6(s.mass)});
  return t;
}

LogSummary summarize(const std::vector<TraceReport>& traces, const EventLog& log) {
  LogSummary s;
  s.traces = traces.size();
  double sum = 0.0;
  std::size_t ok = 0;
  for (const TraceReport& t : traces) {
    if (t.error) {
      ++s.errors;
      continue;
    }
    sum += t.expected_conf;
    ++ok;
    s.fallback_count += t.fallback_used ? 1 : 0;
  }
  s.weighted_log_conformance = round6(ok ? sum / static_cast<double>(ok) : 0.0);
  s.uncertain_ratio = round6(log.uncertain_ratio());
  return s;
}

// ---- JSON helpers -------------------------------------------------------------

namespace {

json number(double x) { return round6(x); }

json provenance_json(const Provenance& p) {
  return json{{"log_path", p.log_path},         {"model_path", p.model_path},
              {"flags", p.flags},               {"tool_version", p.tool_version},
              {"seed", p.seed}};
}

Provenance provenance_from(const json& j) {
  Provenance p;
  p.log_path = j.at("log_path").get<std::string>();
  p.model_path = j.at("model_path").get<std::string>();
  p.flags = j.at("flags").get<std::map<std::string, std::string>>();
  p.tool_version = j.at("tool_version").get<std::string>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

json ranked_json(const std::vector<RankedWord>& words) {
  json out = json::array();
  for (const RankedWord& w : words) out.push_back({{"word", w.word}, {"probability", number(w.probability)}});
  return out;
}

std::vector<RankedWord> ranked_from(const json& j) {
  std::vector<RankedWord> out;
  for (const json& w : j)
    out.push_back(RankedWord{w.at("word").get<Word>(), w.at("probability").get<double>()});
  return out;
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed JSON report: ") + e.what());
  }
}

template <typename Fn>
auto guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed JSON report: ") + e.what());
  }
}

}  // namespace

// ---- check report ---------------------------------------------------------------

std::string to_json(const CheckReport& report, int indent) {
  json traces = json::array();
  for (const TraceReport& t : report.per_trace) {
    json skip = json::array();
    for (const SkipMassEntry& s : t.skip_mass)
      skip.push_back({{"kind", s.kind}, {"activity", s.activity}, {"mass", number(s.mass)}});
    json entry = {{"case_id", t.case_id},
                  {"resolutions", t.resolutions},
                  {"model", t.model},
                  {"expected_conf", number(t.expected_conf)},
                  {"ci", {number(t.ci_low), number(t.ci_high)}},
                  {"sampled", t.sampled},
                  {"exact", t.exact},
                  {"p_bar", number(t.p_bar)},
                  {"fallback_used", t.fallback_used},
                  {"top_resolutions", ranked_json(t.top_resolutions)},
                  {"skip_mass", skip}};
    entry["error"] = t.error ? json(*t.error) : json(nullptr);
    traces.push_back(std::move(entry));
  }
  const LogSummary& s = report.log_summary;
  json doc = {{"conformance", report.conformance},
              {"per_trace", traces},
              {"log_summary",
               {{"weighted_log_conformance", number(s.weighted_log_conformance)},
                {"uncertain_ratio", number(s.uncertain_ratio)},
                {"fallback_count", s.fallback_count},
                {"traces", s.traces},
                {"errors", s.errors}}},
              {"provenance", provenance_json(report.provenance)}};
  return doc.dump(indent);
}

CheckReport check_report_from_json(std::string_view text) {
  const json doc = parse_document(text);
  return guarded([&] {
    CheckReport r;
    r.conformance = doc.at("conformance").get<std::string>();
    for (const json& e : doc.at("per_trace")) {
      TraceReport t;
      t.case_id = e.at("case_id").get<std::string>();
      t.resolutions = e.at("resolutions").get<std::string>();
      t.model = e.at("model").get<std::string>();
      t.expected_conf = e.at("expected_conf").get<double>();
      t.ci_low = e.at("ci").at(0).get<double>();
      t.ci_high = e.at("ci").at(1).get<double>();
      t.sampled = e.at("sampled").get<std::uint64_t>();
      t.exact = e.at("exact").get<bool>();
      t.p_bar = e.at("p_bar").get<double>();
      t.fallback_used = e.at("fallback_used").get<bool>();
      t.top_resolutions = ranked_from(e.at("top_resolutions"));
      for (const json& s : e.at("skip_mass"))
        t.skip_mass.push_back(SkipMassEntry{s.at("kind").get<std::string>(),
                                            s.at("activity").get<std::string>(),
                                            s.at("mass").get<double>()});
      if (!e.at("error").is_null()) t.error = e.at("error").get<std::string>();
      r.per_trace.push_back(std::move(t));
    }
    const json& s = doc.at("log_summary");
    r.log_summary.weighted_log_conformance = s.at("weighted_log_conformance").get<double>();
    r.log_summary.uncertain_ratio = s.at("uncertain_ratio").get<double>();
    r.log_summary.fallback_count = s.at("fallback_count").get<std::uint64_t>();
    r.log_summary.traces = s.at("traces").get<std::uint64_t>();
    r.log_summary.errors = s.at("errors").get<std::uint64_t>();
    r.provenance = provenance_from(doc.at("provenance"));
    return r;
  });
}

// ---- selection report -----------------------------------------------------------

std::string to_json(const SelectionReport& report, int indent) {
  json models = json::array();
  for (const ModelMeasures& m : report.per_model) {
    json pairs = json::array();
    for (const PairMeasure& p : m.pairs)
      pairs.push_back({{"x", p.x},
                       {"y", p.y},
                       {"uncertain_traces", p.uncertain_traces},
                       {"support", p.support},
                       {"ratio", number(p.ratio)}});
    models.push_back({{"model", m.spec.name()},
                      {"start_marker", m.spec.start_marker},
                      {"coverage", number(m.coverage)},
                      {"mean_uncertainty_ratio", number(m.mean_uncertainty_ratio)},
                      {"qualifies", m.qualifies},
                      {"pairs", pairs}});
  }
  json doc = {{"per_model", models},
              {"recommended", report.recommended.name()},
              {"threshold_met", report.threshold_met}};
  return doc.dump(indent);
}

SelectionReport selection_report_from_json(std::string_view text) {
  const json doc = parse_document(text);
  return guarded([&] {
    SelectionReport r;
    auto spec_of = [](const std::string& name, bool marker) {
      auto spec = ModelSpec::parse(name);
      if (!spec) throw Error("unknown behavioral model '" + name + "' in report");
      spec->start_marker = marker;
      return *spec;
    };
    bool marker = true;
    for (const json& m : doc.at("per_model")) {
      ModelMeasures mm;
      marker = m.at("start_marker").get<bool>();
      mm.spec = spec_of(m.at("model").get<std::string>(), marker);
      mm.coverage = m.at("coverage").get<double>();
      mm.mean_uncertainty_ratio = m.at("mean_uncertainty_ratio").get<double>();
      mm.qualifies = m.at("qualifies").get<bool>();
      for (const json& p : m.at("pairs"))
        mm.pairs.push_back(PairMeasure{p.at("x").get<std::string>(), p.at("y").get<std::string>(),
                                       p.at("uncertain_traces").get<std::size_t>(),
                                       p.at("support").get<std::size_t>(),
                                       p.at("ratio").get<double>()});
      r.per_model.push_back(std::move(mm));
    }
    r.recommended = spec_of(doc.at("recommended").get<std::string>(), marker);
    r.threshold_met = doc.at("threshold_met").get<bool>();
    return r;
  });
}

// ---- evaluation report ------------------------------------------------------------

namespace {

json evaluation_json(const ModelEvaluation& e) {
  return json{{"model", e.model},
              {"rmse", e.rmse_defined ? number(e.rmse) : json(nullptr)},
              {"log_error", e.estimate_defined ? number(e.log_error) : json(nullptr)},
              {"estimated_log_fitness",
               e.estimate_defined ? number(e.estimated_log_fitness) : json(nullptr)},
              {"uncertain_traces", e.uncertain_traces},
              {"fallback_count", e.fallback_count},
              {"runtime_ms", number(e.runtime_ms)}};
}

ModelEvaluation evaluation_from(const json& j) {
  ModelEvaluation e;
  e.model = j.at("model").get<std::string>();
  e.rmse_defined = !j.at("rmse").is_null();
  e.rmse = e.rmse_defined ? j.at("rmse").get<double>() : 0.0;
  e.estimate_defined = !j.at("log_error").is_null();
  if (e.estimate_defined) {
    e.log_error = j.at("log_error").get<double>();
    e.estimated_log_fitness = j.at("estimated_log_fitness").get<double>();
  }
  e.uncertain_traces = j.at("uncertain_traces").get<std::size_t>();
  e.fallback_count = j.at("fallback_count").get<std::size_t>();
  e.runtime_ms = j.at("runtime_ms").get<double>();
  return e;
}

}  // namespace

std::string to_json(const EvalReport& report, int indent) {
  json models = json::array();
  for (const BenchmarkEntry& b : report.per_model) {
    json entry = evaluation_json(b.exact);
    if (b.approximate) {
      entry["approx"] = evaluation_json(*b.approximate);
      entry["time_saved"] = number(b.time_saved);
      entry["additional_rmse"] = number(b.additional_rmse);
      entry["additional_error"] = number(b.additional_error);
    }
    models.push_back(std::move(entry));
  }
  json doc = {{"traces", report.traces},
              {"uncertain_traces", report.uncertain_traces},
              {"true_log_fitness", number(report.true_log_fitness)},
              {"per_model", models}};
  return doc.dump(indent);
}

EvalReport eval_report_from_json(std::string_view text) {
  const json doc = parse_document(text);
  return guarded([&] {
    EvalReport r;
    r.traces = doc.at("traces").get<std::size_t>();
    r.uncertain_traces = doc.at("uncertain_traces").get<std::size_t>();
    r.true_log_fitness = doc.at("true_log_fitness").get<double>();
    for (const json& m : doc.at("per_model")) {
      BenchmarkEntry b;
      b.exact = evaluation_from(m);
      if (m.contains("approx")) {
        b.approximate = evaluation_from(m.at("approx"));
        b.time_saved = m.at("time_saved").get<double>();
        b.additional_rmse = m.at("additional_rmse").get<double>();
        b.additional_error = m.at("additional_error").get<double>();
      }
      r.per_model.push_back(std::move(b));
    }
    return r;
  });
}

// ---- resolve report -----------------------------------------------------------------

std::string to_json(const ResolveReport& report, int indent) {
  json traces = json::array();
  for (const ResolveEntry& e : report.traces)
    traces.push_back({{"case_id", e.case_id},
                      {"resolutions", e.resolutions},
                      {"fallback_used", e.fallback_used},
                      {"top_resolutions", ranked_json(e.top)}});
  json doc = {{"model", report.model},
              {"traces", traces},
              {"provenance", provenance_json(report.provenance)}};
  return doc.dump(indent);
}

ResolveReport resolve_report_from_json(std::string_view text) {
  const json doc = parse_document(text);
  return guarded([&] {
    ResolveReport r;
    r.model = doc.at("model").get<std::string>();
    for (const json& e : doc.at("traces"))
      r.traces.push_back(ResolveEntry{e.at("case_id").get<std::string>(),
                                      e.at("resolutions").get<std::string>(),
                                      e.at("fallback_used").get<bool>(),
                                      ranked_from(e.at("top_resolutions"))});
    r.provenance = provenance_from(doc.at("provenance"));
    return r;
  });
}

// ---- flat renderings ------------------------------------------------------------------

namespace {

std::string fixed6(double x) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << round6(x);
  return out.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const Word& w, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += sep;
    out += w[i];
  }
  return out;
}

/// Left-aligned columns sized to their widest cell.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      out << rows[r][i];
      if (i + 1 < rows[r].size()) out << std::string(width[i] - rows[r][i].size() + 2, ' ');
    }
    out << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w + 2;
      out << std::string(total >= 2 ? total - 2 : 0, '-') << '\n';
    }
  }
  return out.str();
}

std::vector<std::vector<std::string>> check_rows(const CheckReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"case_id", "resolutions", "model", "expected_conf", "ci_low", "ci_high", "sampled", "exact",
       "fallback", "error"}};
  for (const TraceReport& t : report.per_trace)
    rows.push_back({t.case_id, t.resolutions, t.model, fixed6(t.expected_conf), fixed6(t.ci_low),
                    fixed6(t.ci_high), std::to_string(t.sampled), t.exact ? "true" : "false",
                    t.fallback_used ? "true" : "false", t.error.value_or("")});
  return rows;
}

std::string rows_to_csv(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::vector<std::string>> selection_rows(const SelectionReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"model", "coverage", "mean_uncertainty_ratio", "pairs", "qualifies", "recommended"}};
  for (const ModelMeasures& m : report.per_model)
    rows.push_back({m.spec.name(), fixed6(m.coverage), fixed6(m.mean_uncertainty_ratio),
                    std::to_string(m.pairs.size()), m.qualifies ? "yes" : "no",
                    m.spec == report.recommended ? "*" : ""});
  return rows;
}

std::vector<std::vector<std::string>> eval_rows(const EvalReport& report) {
  std::vector<std::vector<std::string>> rows = {{"model", "rmse", "log_error", "uncertain_traces",
                                                 "runtime_ms", "approx_rmse", "approx_log_error",
                                                 "time_saved", "additional_rmse"}};
  for (const BenchmarkEntry& b : report.per_model) {
    const ModelEvaluation& e = b.exact;
    std::vector<std::string> row = {e.model, e.rmse_defined ? fixed6(e.rmse) : "n/a",
                                    e.estimate_defined ? fixed6(e.log_error) : "n/a",
                                    std::to_string(e.uncertain_traces),
                                    fixed6(e.runtime_ms)};
    if (b.approximate) {
      row.push_back(b.approximate->rmse_defined ? fixed6(b.approximate->rmse) : "n/a");
      row.push_back(fixed6(b.approximate->log_error));
      row.push_back(fixed6(b.time_saved));
      row.push_back(fixed6(b.additional_rmse));
    } else {
      row.insert(row.end(), {"", "", "", ""});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<std::string>> resolve_rows(const ResolveReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"case_id", "resolutions", "rank", "probability", "word", "fallback"}};
  for (const ResolveEntry& e : report.traces)
    for (std::size_t i = 0; i < e.top.size(); ++i)
      rows.push_back({e.case_id, e.resolutions, std::to_string(i + 1), fixed6(e.top[i].probability),
                      join(e.top[i].word, " "), e.fallback_used ? "true" : "false"});
  return rows;
}

}  // namespace

std::string to_csv(const CheckReport& report) { return rows_to_csv(check_rows(report)); }

std::string to_table(const CheckReport& report) {
  const LogSummary& s = report.log_summary;
  return render_table(check_rows(report)) + "\nweighted log conformance: " +
         fixed6(s.weighted_log_conformance) + "\nuncertain ratio: " + fixed6(s.uncertain_ratio) +
         "\nfallback traces: " + std::to_string(s.fallback_count) +
         "\nerrors: " + std::to_string(s.errors) + "\n";
}

std::string to_csv(const SelectionReport& report) { return rows_to_csv(selection_rows(report)); }

std::string to_table(const SelectionReport& report) {
  std::string out = render_table(selection_rows(report));
  out += "\nrecommended: " + report.recommended.name();
  if (!report.threshold_met) out += " (no model met the thresholds; least strict model returned)";
  out += "\n";
  for (const ModelMeasures& m : report.per_model) {
    if (m.pairs.empty()) continue;
    std::vector<std::vector<std::string>> rows = {{"x", "y", "uncertain_traces", "support", "ratio"}};
    for (const PairMeasure& p : m.pairs)
      rows.push_back({p.x, p.y, std::to_string(p.uncertain_traces), std::to_string(p.support),
                      fixed6(p.ratio)});
    out += "\n[" + m.spec.name() + "]\n" + render_table(rows);
  }
  return out;
}

std::string to_csv(const EvalReport& report) { return rows_to_csv(eval_rows(report)); }

std::string to_table(const EvalReport& report) {
  return render_table(eval_rows(report)) + "\ntrue log fitness: " +
         fixed6(report.true_log_fitness) + "\ntraces: " + std::to_string(report.traces) +
         " (uncertain: " + std::to_string(report.uncertain_traces) + ")\n";
}

std::string to_csv(const ResolveReport& report) { return rows_to_csv(resolve_rows(report)); }

std::string to_table(const ResolveReport& report) { return render_table(resolve_rows(report)); }

}  // namespace porc
