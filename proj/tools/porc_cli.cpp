// porc: conformance checking for event logs with order uncertainty.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "porc/alignment.hpp"
#include "porc/approx.hpp"
#include "porc/behavioral.hpp"
#include "porc/errors.hpp"
#include "porc/evaluate.hpp"
#include "porc/log_model.hpp"
#include "porc/measures.hpp"
#include "porc/parallel.hpp"
#include "porc/process_model.hpp"
#include "porc/report.hpp"
#include "porc/resolution.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTraceErrors = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitIo = 74;

struct UsageError : porc::Error {
  using porc::Error::Error;
};

struct LogArgs {
  std::string path;
  std::string format = "auto";
  std::string case_column = "case";
  std::string activity_column = "activity";
  std::string timestamp_column = "timestamp";
  std::string id_column;
  std::string timestamp_format = "%Y-%m-%dT%H:%M:%S";
  char delimiter = ',';
};

struct OutputArgs {
  std::string out;
  std::string format = "json";
};

void add_log_options(CLI::App& cmd, LogArgs& a, bool required = true) {
  auto* opt = cmd.add_option("--log", a.path, "Event log (.csv or .xes)");
  if (required) opt->required();
  cmd.add_option("--log-format", a.format, "Log format")
      ->check(CLI::IsMember({"auto", "csv", "xes"}))
      ->capture_default_str();
  cmd.add_option("--case-column", a.case_column, "CSV column holding the case id")
      ->capture_default_str();
  cmd.add_option("--activity-column", a.activity_column, "CSV column holding the activity")
      ->capture_default_str();
  cmd.add_option("--timestamp-column", a.timestamp_column, "CSV column holding the timestamp")
      ->capture_default_str();
  cmd.add_option("--id-column", a.id_column, "CSV column holding event ids (optional)");
  cmd.add_option("--timestamp-format", a.timestamp_format,
                 "CSV timestamp format (%Y %m %d %H %M %S %f %T %%)")
      ->capture_default_str();
  cmd.add_option("--delimiter", a.delimiter, "CSV field delimiter")->capture_default_str();
}

void add_output_options(CLI::App& cmd, OutputArgs& a) {
  cmd.add_option("--out", a.out, "Output file (default: stdout)");
  cmd.add_option("--format", a.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
}

std::string lower_extension(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

porc::CsvOptions csv_options(const LogArgs& a) {
  porc::CsvOptions o;
  o.mapping = {a.case_column, a.activity_column, a.timestamp_column, a.id_column};
  o.timestamp_format = a.timestamp_format;
  o.delimiter = a.delimiter;
  return o;
}

porc::EventLog load_log(const LogArgs& a) {
  const std::string format = a.format == "auto" ? lower_extension(a.path) : a.format;
  if (format == "xes") return porc::parse_xes(a.path);
  return porc::parse_csv(a.path, csv_options(a));
}

porc::ModelSpec parse_model(const std::string& name, bool start_marker) {
  auto spec = porc::ModelSpec::parse(name);
  if (!spec) throw UsageError("unknown behavioral model '" + name + "'");
  spec->start_marker = start_marker;
  return *spec;
}

void emit(const OutputArgs& o, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw porc::IoError(o.out);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
  if (!f) throw porc::IoError(o.out);
}

template <typename Report>
std::string render(const Report& r, const std::string& format) {
  if (format == "csv") return porc::to_csv(r);
  if (format == "table") return porc::to_table(r);
  return porc::to_json(r);
}

std::string fmt_double(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

std::vector<porc::RankedWord> top_words(const porc::Trace& trace, const porc::BehavioralModel& model,
                                        std::size_t k, std::size_t cap) {
  std::vector<porc::RankedWord> out;
  if (k == 0) return out;
  for (auto& s : porc::k_best(trace, model, k, cap))
    out.push_back(porc::RankedWord{std::move(s.resolution.word), porc::round6(s.probability)});
  return out;
}

// ---- check -----------------------------------------------------------------

struct CheckArgs {
  LogArgs log;
  OutputArgs output;
  std::string model_path;
  std::string final_place;
  std::string behavioral = "2g";
  bool no_start_marker = false;
  std::string conf = "fitness";
  bool approx = false;
  double alpha = 0.99;
  double delta = 0.10;
  std::size_t jobs = 0;
  std::size_t top = 0;
  std::size_t cap = porc::kDefaultEnumerationCap;
  bool skip_mass = false;
  bool loo = false;
  std::uint64_t seed = 0;
};

int run_check(const CheckArgs& a) {
  const porc::EventLog log = load_log(a.log);
  const porc::PetriNet net = porc::parse_pnml(a.model_path, porc::PnmlOptions{a.final_place});
  const porc::ModelSpec spec = parse_model(a.behavioral, !a.no_start_marker);
  const auto fn = a.conf == "bin" ? porc::ConformanceFunction::Binary
                                  : porc::ConformanceFunction::Fitness;
  porc::Aligner aligner(net);
  std::optional<porc::BehavioralModel> shared;
  if (!a.loo) shared.emplace(porc::BehavioralModel::build(spec, log));

  porc::ApproxOptions options;
  options.alpha = a.alpha;
  options.delta = a.delta;
  options.cap = a.cap;
  options.skip_mass = a.skip_mass;

  porc::CheckReport report;
  report.conformance = std::string(porc::to_string(fn));
  report.per_trace.resize(log.size());
  porc::parallel_for(log.size(), a.jobs, [&](std::size_t i) {
    const porc::Trace& trace = log.traces()[i];
    porc::TraceReport& entry = report.per_trace[i];
    try {
      std::optional<porc::BehavioralModel> own;
      if (!shared) own.emplace(porc::BehavioralModel::build(spec, log, trace.case_id()));
      const porc::BehavioralModel& model = shared ? *shared : *own;
      const porc::ApproxResult r =
          a.approx ? porc::approximate_conformance(trace, aligner, model, fn, options)
                   : porc::exact_conformance(trace, aligner, model, fn, options);
      entry = porc::make_trace_report(trace, spec, r);
      entry.top_resolutions = top_words(trace, model, a.top, a.cap);
    } catch (const porc::IoError&) {
      throw;
    } catch (const porc::Error& e) {
      entry = porc::TraceReport{};
      entry.case_id = trace.case_id();
      entry.model = spec.name();
      try {
        entry.resolutions = std::to_string(porc::resolution_count(trace));
      } catch (const porc::CountOverflow&) {
        entry.resolutions = "overflow";
      }
      entry.exact = false;
      entry.error = e.what();
    }
  });
  report.log_summary = porc::summarize(report.per_trace, log);
  report.provenance.log_path = a.log.path;
  report.provenance.model_path = a.model_path;
  report.provenance.seed = a.seed;
  report.provenance.flags = {{"behavioral_model", spec.name()},
                             {"start_marker", a.no_start_marker ? "false" : "true"},
                             {"conf", a.conf},
                             {"approx", a.approx ? "true" : "false"},
                             {"alpha", fmt_double(a.alpha)},
                             {"delta", fmt_double(a.delta)},
                             {"cap", std::to_string(a.cap)},
                             {"loo", a.loo ? "true" : "false"},
                             {"top", std::to_string(a.top)}};
  emit(a.output, render(report, a.output.format));
  return report.log_summary.errors ? kExitTraceErrors : kExitOk;
}

// ---- resolve ---------------------------------------------------------------

struct ResolveArgs {
  LogArgs log;
  OutputArgs output;
  std::string behavioral = "2g";
  bool no_start_marker = false;
  std::size_t top = 5;
  std::size_t cap = porc::kDefaultEnumerationCap;
  bool uncertain_only = false;
  bool loo = false;
};

int run_resolve(const ResolveArgs& a) {
  const porc::EventLog log = load_log(a.log);
  const porc::ModelSpec spec = parse_model(a.behavioral, !a.no_start_marker);
  std::optional<porc::BehavioralModel> shared;
  if (!a.loo) shared.emplace(porc::BehavioralModel::build(spec, log));
  porc::ResolveReport report;
  report.model = spec.name();
  report.provenance.log_path = a.log.path;
  report.provenance.flags = {{"behavioral_model", spec.name()},
                             {"start_marker", a.no_start_marker ? "false" : "true"},
                             {"top", std::to_string(a.top)},
                             {"cap", std::to_string(a.cap)},
                             {"loo", a.loo ? "true" : "false"}};
  bool failed = false;
  for (const porc::Trace& trace : log.traces()) {
    if (a.uncertain_only && trace.certain()) continue;
    std::optional<porc::BehavioralModel> own;
    if (!shared) own.emplace(porc::BehavioralModel::build(spec, log, trace.case_id()));
    const porc::BehavioralModel& model = shared ? *shared : *own;
    porc::ResolveEntry entry;
    entry.case_id = trace.case_id();
    try {
      entry.resolutions = std::to_string(porc::resolution_count(trace));
    } catch (const porc::CountOverflow&) {
      entry.resolutions = "overflow";
    }
    try {
      entry.fallback_used = !porc::has_evidence(trace, model);
      entry.top = top_words(trace, model, a.top, a.cap);
    } catch (const porc::EnumerationCapExceeded& e) {
      std::cerr << "porc: " << trace.case_id() << ": " << e.what() << '\n';
      failed = true;
    }
    report.traces.push_back(std::move(entry));
  }
  emit(a.output, render(report, a.output.format));
  return failed ? kExitTraceErrors : kExitOk;
}

// ---- measures --------------------------------------------------------------

struct MeasuresArgs {
  LogArgs log;
  OutputArgs output;
  std::string models = "te,4g,3g,2g,wo";
  double coverage_threshold = 0.8;
  std::optional<double> min_ratio;
  std::optional<double> max_ratio;
  bool no_start_marker = false;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int run_measures(const MeasuresArgs& a) {
  const porc::EventLog log = load_log(a.log);
  porc::SelectionOptions o;
  o.coverage_threshold = a.coverage_threshold;
  o.start_marker = !a.no_start_marker;
  o.kinds = split_list(a.models);
  for (const auto& k : o.kinds) parse_model(k, o.start_marker);
  if (a.min_ratio && a.max_ratio) throw UsageError("--min-ratio and --max-ratio are exclusive");
  if (a.max_ratio) {
    o.direction = porc::RatioDirection::AtMost;
    o.ratio_threshold = *a.max_ratio;
  } else if (a.min_ratio) {
    o.ratio_threshold = *a.min_ratio;
  }
  const porc::SelectionReport report = porc::recommend(log, o);
  emit(a.output, render(report, a.output.format));
  return kExitOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  LogArgs log;
  OutputArgs output;
  std::string model_path;
  std::string final_place;
  std::size_t simulate = 0;
  std::string coarsen = "min";
  double noise = 0.0;
  std::string noise_kinds = "insert,swap,remove";
  std::string models = "te,2g,3g,4g,wo,bl1,bl2";
  bool no_start_marker = false;
  std::uint64_t seed = 1;
  bool approx = false;
  double alpha = 0.99;
  double delta = 0.10;
  std::size_t jobs = 0;
  std::size_t cap = porc::kDefaultEnumerationCap;
  bool loo = false;
};

int run_evaluate(const EvaluateArgs& a) {
  if (a.log.path.empty() == (a.simulate == 0))
    throw UsageError("evaluate needs exactly one of --log and --simulate");
  const porc::PetriNet net = porc::parse_pnml(a.model_path, porc::PnmlOptions{a.final_place});
  const auto unit = porc::parse_precision(a.coarsen);
  if (!unit) throw UsageError("unknown --coarsen unit '" + a.coarsen + "'");
  std::mt19937_64 rng(a.seed);

  porc::EventLog original = [&] {
    if (a.simulate > 0) {
      porc::SimulationOptions so;
      so.traces = a.simulate;
      return porc::simulate(net, so, rng);
    }
    return load_log(a.log);
  }();
  if (a.noise > 0.0) {
    std::vector<porc::NoiseKind> kinds;
    for (const auto& k : split_list(a.noise_kinds)) {
      if (k == "insert") kinds.push_back(porc::NoiseKind::Insert);
      else if (k == "swap") kinds.push_back(porc::NoiseKind::Swap);
      else if (k == "remove") kinds.push_back(porc::NoiseKind::Remove);
      else throw UsageError("unknown noise kind '" + k + "'");
    }
    original = porc::add_noise(original, a.noise, kinds, rng);
  }
  const porc::GoldLog gold = porc::make_gold_log(original, *unit);

  std::vector<std::string> kinds = split_list(a.models);
  for (const auto& k : kinds)
    if (k != "bl2") parse_model(k, true);

  porc::EvalOptions options;
  options.approximate = a.approx;
  options.approx.alpha = a.alpha;
  options.approx.delta = a.delta;
  options.approx.cap = a.cap;
  options.jobs = a.jobs;
  options.leave_one_out = a.loo;
  options.start_marker = !a.no_start_marker;
  const porc::EvalReport report = porc::run_benchmark(gold, net, kinds, options);
  emit(a.output, render(report, a.output.format));
  return kExitOk;
}

std::size_t state_cap_from_env() { return porc::default_state_cap(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformance checking for event logs with order uncertainty"};
  app.set_version_flag("--version", std::string(porc::kToolVersion));
  app.require_subcommand(1);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Probabilistic conformance of every trace");
  add_log_options(*c, check.log);
  add_output_options(*c, check.output);
  c->add_option("--model", check.model_path, "Process model (PNML)")->required();
  c->add_option("--final-place", check.final_place, "Place holding the single final token");
  c->add_option("--behavioral-model", check.behavioral, "te | 2g | 3g | 4g | <N>g | wo | bl1")
      ->capture_default_str();
  c->add_flag("--no-start-marker", check.no_start_marker, "N-gram models without start event");
  c->add_option("--conf", check.conf, "Conformance function")
      ->check(CLI::IsMember({"bin", "fitness"}))
      ->capture_default_str();
  c->add_flag("--approx", check.approx, "Sample resolutions with confidence intervals");
  c->add_option("--alpha", check.alpha, "Confidence level")
      ->check(CLI::Range(0.5, 0.999999))
      ->capture_default_str();
  c->add_option("--delta", check.delta, "Relative accuracy threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c->add_option("--jobs", check.jobs, "Worker threads (0: all cores)")->capture_default_str();
  c->add_option("--top", check.top, "Most probable resolutions listed per trace")
      ->capture_default_str();
  c->add_option("--cap", check.cap, "Maximum resolutions enumerated per trace")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c->add_flag("--skip-mass", check.skip_mass, "Report probability mass per skip move");
  c->add_flag("--loo", check.loo, "Build the estimator without the trace being resolved");
  c->add_option("--seed", check.seed, "Recorded in the report provenance")->capture_default_str();

  ResolveArgs resolve;
  auto* r = app.add_subcommand("resolve", "Most probable resolutions per trace");
  add_log_options(*r, resolve.log);
  add_output_options(*r, resolve.output);
  r->add_option("--behavioral-model", resolve.behavioral, "te | 2g | 3g | 4g | <N>g | wo | bl1")
      ->capture_default_str();
  r->add_flag("--no-start-marker", resolve.no_start_marker, "N-gram models without start event");
  r->add_option("--top", resolve.top, "Resolutions listed per trace")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  r->add_option("--cap", resolve.cap, "Maximum resolutions enumerated per trace")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  r->add_flag("--uncertain-only", resolve.uncertain_only, "Skip certain traces");
  r->add_flag("--loo", resolve.loo, "Build the estimator without the trace being resolved");

  MeasuresArgs measures;
  auto* m = app.add_subcommand("measures", "Model-selection measures and recommendation");
  add_log_options(*m, measures.log);
  add_output_options(*m, measures.output);
  m->add_option("--models", measures.models, "Candidate models, strictest first")
      ->capture_default_str();
  m->add_option("--coverage-threshold", measures.coverage_threshold,
                "Coverage a model must exceed")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  m->add_option("--min-ratio", measures.min_ratio,
                "Minimum mean uncertainty ratio (default 1.0)");
  m->add_option("--max-ratio", measures.max_ratio, "Maximum mean uncertainty ratio instead");
  m->add_flag("--no-start-marker", measures.no_start_marker, "N-gram models without start event");

  EvaluateArgs evaluate;
  auto* e = app.add_subcommand("evaluate", "Compare estimators against gold orders");
  add_log_options(*e, evaluate.log, false);
  add_output_options(*e, evaluate.output);
  e->add_option("--model", evaluate.model_path, "Process model (PNML)")->required();
  e->add_option("--final-place", evaluate.final_place, "Place holding the single final token");
  e->add_option("--simulate", evaluate.simulate, "Simulate this many traces instead of --log");
  e->add_option("--coarsen", evaluate.coarsen, "Timestamp unit: ms | s | min | h | d")
      ->capture_default_str();
  e->add_option("--noise", evaluate.noise, "Fraction of traces receiving noise")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  e->add_option("--noise-kinds", evaluate.noise_kinds, "insert,swap,remove")
      ->capture_default_str();
  e->add_option("--models", evaluate.models, "Estimators to evaluate (bl2 included)")
      ->capture_default_str();
  e->add_flag("--no-start-marker", evaluate.no_start_marker, "N-gram models without start event");
  e->add_option("--seed", evaluate.seed, "Seed for simulation and noise")->capture_default_str();
  e->add_flag("--approx", evaluate.approx, "Also run with approximation");
  e->add_option("--alpha", evaluate.alpha, "Confidence level")
      ->check(CLI::Range(0.5, 0.999999))
      ->capture_default_str();
  e->add_option("--delta", evaluate.delta, "Relative accuracy threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  e->add_option("--jobs", evaluate.jobs, "Worker threads (0: all cores)")->capture_default_str();
  e->add_option("--cap", evaluate.cap, "Maximum resolutions enumerated per trace")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  e->add_flag("--loo", evaluate.loo, "Build each estimator without the trace being resolved");

  app.footer("Environment: PORC_STATE_CAP overrides the search-state budget (currently " +
             std::to_string(state_cap_from_env()) + ").");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (*c) return run_check(check);
    if (*r) return run_resolve(resolve);
    if (*m) return run_measures(measures);
    if (*e) return run_evaluate(evaluate);
  } catch (const UsageError& err) {
    std::cerr << "porc: " << err.what() << '\n';
    return kExitUsage;
  } catch (const porc::IoError& err) {
    std::cerr << "porc: " << err.what() << '\n';
    return kExitIo;
  } catch (const porc::Error& err) {
    std::cerr << "porc: " << err.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
