#ifndef PORC_REPORT_HPP
#define PORC_REPORT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "porc/approx.hpp"
#include "porc/evaluate.hpp"
#include "porc/log_model.hpp"
#include "porc/measures.hpp"

namespace porc {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Rounds to 6 decimal digits; every number in a report passes through it,
/// so printing and re-reading yields the same double.
double round6(double x);

struct RankedWord {
  Word word;
  double probability = 0.0;
  friend bool operator==(const RankedWord&, const RankedWord&) = default;
};

struct SkipMassEntry {
  std::string kind;  // "log" | "model"
  std::string activity;
  double mass = 0.0;
  friend bool operator==(const SkipMassEntry&, const SkipMassEntry&) = default;
};

struct TraceReport {
  std::string case_id;
  std::string resolutions;  // decimal count; "overflow" past 2^64 - 1
  std::string model;
  double expected_conf = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t sampled = 0;
  bool exact = true;
  double p_bar = 0.0;
  bool fallback_used = false;
  std::vector<RankedWord> top_resolutions;
  std::vector<SkipMassEntry> skip_mass;
  std::optional<std::string> error;
  friend bool operator==(const TraceReport&, const TraceReport&) = default;
};

struct LogSummary {
  double weighted_log_conformance = 0.0;  // mean expected_conf over traces without error
  double uncertain_ratio = 0.0;
  std::uint64_t fallback_count = 0;
  std::uint64_t traces = 0;
  std::uint64_t errors = 0;
  friend bool operator==(const LogSummary&, const LogSummary&) = default;
};

struct Provenance {
  std::string log_path;
  std::string model_path;
  std::map<std::string, std::string> flags;
  std::string tool_version{kToolVersion};
  std::uint64_t seed = 0;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct CheckReport {
  std::string conformance;  // "bin" | "fitness"
  std::vector<TraceReport> per_trace;
  LogSummary log_summary;
  Provenance provenance;
  friend bool operator==(const CheckReport&, const CheckReport&) = default;
};

/// Fills a per-trace entry from an approximation result (numbers rounded).
TraceReport make_trace_report(const Trace& trace, const ModelSpec& spec, const ApproxResult& r);
/// Recomputes the summary from the per-trace entries.
LogSummary summarize(const std::vector<TraceReport>& traces, const EventLog& log);

std::string to_json(const CheckReport& report, int indent = 2);
/// Throws Error on malformed documents.
CheckReport check_report_from_json(std::string_view text);

std::string to_json(const SelectionReport& report, int indent = 2);
SelectionReport selection_report_from_json(std::string_view text);

std::string to_json(const EvalReport& report, int indent = 2);
EvalReport eval_report_from_json(std::string_view text);

// Flat renderings.
std::string to_csv(const CheckReport& report);
std::string to_table(const CheckReport& report);
std::string to_csv(const SelectionReport& report);
std::string to_table(const SelectionReport& report);
std::string to_csv(const EvalReport& report);
std::string to_table(const EvalReport& report);

/// One distribution listing per trace, for the resolve command.
struct ResolveEntry {
  std::string case_id;
  std::string resolutions;
  bool fallback_used = false;
  std::vector<RankedWord> top;
  friend bool operator==(const ResolveEntry&, const ResolveEntry&) = default;
};

struct ResolveReport {
  std::string model;
  std::vector<ResolveEntry> traces;
  Provenance provenance;
  friend bool operator==(const ResolveReport&, const ResolveReport&) = default;
};

std::string to_json(const ResolveReport& report, int indent = 2);
ResolveReport resolve_report_from_json(std::string_view text);
std::string to_csv(const ResolveReport& report);
std::string to_table(const ResolveReport& report);

}  // namespace porc

#endif  // PORC_REPORT_HPP
