#ifndef PORC_EVALUATE_HPP
#define PORC_EVALUATE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "porc/alignment.hpp"
#include "porc/approx.hpp"
#include "porc/behavioral.hpp"
#include "porc/log_model.hpp"
#include "porc/process_model.hpp"

namespace porc {

/// A coarsened log together with the total order each trace had before
/// coarsening.
struct GoldLog {
  EventLog coarse;
  std::unordered_map<std::string, Word> gold_orders;
};

/// Coarsens `original` to `unit`; the gold order of a case is its event
/// sequence in `original`, which must be a certain log.
GoldLog make_gold_log(const EventLog& original, Precision unit);

struct EvalOptions {
  bool approximate = false;
  ApproxOptions approx;
  std::size_t jobs = 1;
  bool leave_one_out = false;
  bool start_marker = true;  // applied to N-gram names in run_benchmark
  /// run_benchmark clears the alignment cache before every run so runtimes
  /// compare. Off shares alignments across models; errors are unchanged.
  bool cold_cache = true;
};

/// Errors of one estimator against the gold orders.
struct ModelEvaluation {
  std::string model;
  double rmse = 0.0;
  bool rmse_defined = true;  // false when no trace is uncertain, or for bl2
  double log_error = 0.0;
  double estimated_log_fitness = 0.0;
  bool estimate_defined = true;  // false for bl2 when no trace is certain
  std::size_t uncertain_traces = 0;
  std::size_t fallback_count = 0;
  double runtime_ms = 0.0;
  std::vector<double> trace_fitness;  // P_fit per trace, log order
};

/// Per-trace gold fitness, log order. Throws MissingGoldOrder.
std::vector<double> gold_fitness(const GoldLog& gold, Aligner& aligner);

ModelEvaluation evaluate_model(const GoldLog& gold, Aligner& aligner, const ModelSpec& spec,
                               const EvalOptions& options = {});

/// Root-mean-square difference between gold fitness and weighted fitness
/// over the uncertain traces; 0 when there are none.
double trace_rmse(const GoldLog& gold, Aligner& aligner, const ModelSpec& spec,
                  const EvalOptions& options = {});

/// |mean gold fitness - mean weighted fitness| over all traces.
double log_error(const GoldLog& gold, Aligner& aligner, const ModelSpec& spec,
                 const EvalOptions& options = {});

/// Baseline that estimates log fitness from the certain traces only.
ModelEvaluation evaluate_discard_uncertain(const GoldLog& gold, Aligner& aligner);

struct BenchmarkEntry {
  ModelEvaluation exact;
  std::optional<ModelEvaluation> approximate;
  double time_saved = 0.0;        // 1 - approx runtime / exact runtime
  double additional_rmse = 0.0;   // approx rmse - exact rmse
  double additional_error = 0.0;  // approx log_error - exact log_error
};

struct EvalReport {
  std::vector<BenchmarkEntry> per_model;
  double true_log_fitness = 0.0;
  std::size_t traces = 0;
  std::size_t uncertain_traces = 0;
};

/// Model names as accepted by ModelSpec::parse, plus "bl2".
EvalReport run_benchmark(const GoldLog& gold, const PetriNet& net,
                         const std::vector<std::string>& kinds, const EvalOptions& options = {});

// ---- synthetic data ---------------------------------------------------------

struct SimulationOptions {
  std::size_t traces = 500;
  double mean_gap_seconds = 40.0;  // exponential inter-event time
  std::size_t max_events = 40;     // longer runs are discarded and redrawn
  std::int64_t start_millis = 1'577'836'800'000;  // 2020-01-01T00:00:00Z
  std::string case_prefix = "case";
};

/// Random walk over the net: uniform choice among enabled transitions until
/// the final marking is reached. Timestamps carry millisecond precision and
/// strictly increase within a trace.
EventLog simulate(const PetriNet& net, const SimulationOptions& options, std::mt19937_64& rng);

enum class NoiseKind { Insert, Swap, Remove };

/// Applies one random noise operation to `fraction` of the traces of a
/// certain log. Inserted activities come from the log's universe.
EventLog add_noise(const EventLog& log, double fraction, const std::vector<NoiseKind>& kinds,
                   std::mt19937_64& rng);

struct NetGeneratorOptions {
  std::size_t min_activities = 5;
  std::size_t max_activities = 9;
  double loop_probability = 0.1;
};

/// Random block-structured net (sequence, exclusive choice, parallel split,
/// loop) with uniquely labeled visible transitions.
PetriNet random_block_net(const NetGeneratorOptions& options, std::mt19937_64& rng);

}  // namespace porc

#endif  // PORC_EVALUATE_HPP
