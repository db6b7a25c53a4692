#ifndef PORC_MEASURES_HPP
#define PORC_MEASURES_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "porc/behavioral.hpp"
#include "porc/log_model.hpp"

namespace porc {

/// Fraction of uncertain traces for which some resolution has a positive raw
/// score. 1 when the log has no uncertain trace.
double coverage(const EventLog& log, const BehavioralModel& model);

/// True iff some resolution of `trace` has a positive raw score.
bool has_evidence(const Trace& trace, const BehavioralModel& model);

/// Number of traces of `log` that provide evidence for some resolution of
/// `trace` under the model kind. 0 for certain traces.
std::size_t support_trace(const EventLog& log, const BehavioralModel& model, const Trace& trace);

/// Traces holding `x` and `y` (x != y) in one event set.
std::vector<const Trace*> uncertain_traces(const EventLog& log, const std::string& x,
                                           const std::string& y);

/// Number of traces whose evidence orders `x` against `y` in some trace that
/// holds both in one event set.
std::size_t support_pair(const EventLog& log, const BehavioralModel& model, const std::string& x,
                         const std::string& y);

/// support_pair / |uncertain_traces(x, y)|. Throws NoUncertainPair.
double uncertainty_ratio(const EventLog& log, const BehavioralModel& model, const std::string& x,
                         const std::string& y);

struct PairMeasure {
  std::string x;  // x < y
  std::string y;
  std::size_t uncertain_traces = 0;
  std::size_t support = 0;
  double ratio = 0.0;
};

/// Every unordered activity pair sharing an event set somewhere, x < y.
std::vector<std::pair<std::string, std::string>> uncertain_pairs(const EventLog& log);

std::vector<PairMeasure> pair_measures(const EventLog& log, const BehavioralModel& model);

struct ModelMeasures {
  ModelSpec spec;
  double coverage = 0.0;
  double mean_uncertainty_ratio = 0.0;  // 0 when no pair is uncertain
  std::vector<PairMeasure> pairs;
  bool qualifies = false;
};

enum class RatioDirection { AtLeast, AtMost };

struct SelectionOptions {
  double coverage_threshold = 0.8;  // strict: coverage must exceed it
  double ratio_threshold = 1.0;
  RatioDirection direction = RatioDirection::AtLeast;
  bool start_marker = true;
  /// Strictest first.
  std::vector<std::string> kinds = {"te", "4g", "3g", "2g", "wo"};
};

struct SelectionReport {
  std::vector<ModelMeasures> per_model;
  ModelSpec recommended;
  bool threshold_met = false;  // false: no kind qualified, least strict kind returned
};

SelectionReport recommend(const EventLog& log, const SelectionOptions& options = {});

}  // namespace porc

#endif  // PORC_MEASURES_HPP
