#ifndef PORC_BEHAVIORAL_HPP
#define PORC_BEHAVIORAL_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "porc/log_model.hpp"
#include "porc/resolution.hpp"

namespace porc {

enum class ModelKind { TraceEquivalence, NGram, WeakOrder, Uniform };

struct ModelSpec {
  ModelKind kind = ModelKind::Uniform;
  int n = 2;                 // N-gram only, >= 2
  bool start_marker = true;  // N-gram only

  /// te | 2g | 3g | 4g | <N>g | wo | bl1
  static std::optional<ModelSpec> parse(std::string_view name);
  std::string name() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Label used for the artificial start event of N-gram models.
inline constexpr std::string_view kStartMarker = "\xe2\x88\x98";  // U+2218

/// Trace-level predicates over the recorded (partially ordered) behavior.
/// `seq` must appear as consecutive singleton event sets; with
/// `leading_marker` the trace is read with an artificial first singleton set.
bool certain_in(std::span<const std::string> seq, const Trace& trace, bool leading_marker);
/// Some `a` event sits in a strictly earlier event set than some `b` event.
bool ordered_in(std::string_view a, std::string_view b, const Trace& trace);

/// Estimator of resolution probabilities built from one event log. Scores
/// are kept in log space.
class BehavioralModel {
 public:
  /// Throws EmptyLog. `exclude_case` leaves one trace out of the statistics.
  static BehavioralModel build(const ModelSpec& spec, const EventLog& log,
                               std::string_view exclude_case = {});

  const ModelSpec& spec() const { return spec_; }
  /// Model-local activity id, -1 when the activity never occurred.
  int activity_id(std::string_view activity) const;
  const std::vector<std::string>& activities() const { return names_; }

  // Incremental scoring: the score of a word is start() folded with
  // extend() over its activities. Prefix scores never increase.
  ScoreState start(std::size_t length) const;
  ScoreState extend(const ScoreState& state, std::span<const int> prefix, int next) const;

  double log_score(std::span<const std::string> word) const;
  double score(std::span<const std::string> word) const;

  /// log Σ_φ score(φ) over all resolutions, computed per event set rather
  /// than per resolution. Throws EnumerationCapExceeded when one event set is
  /// too large to enumerate within `cap`.
  double log_normalizer(const Trace& trace, std::size_t cap = kDefaultEnumerationCap) const;

  // Statistics.
  std::size_t certain_traces() const { return certain_traces_; }
  std::size_t variant_frequency(std::span<const std::string> word) const;
  /// Traces for which certain_in(seq) holds; `leading_marker` prefixes the start event.
  std::size_t ngram_count(std::span<const std::string> seq, bool leading_marker) const;
  std::size_t order_count(std::string_view a, std::string_view b) const;
  std::size_t cooccurrence_count(std::string_view a, std::string_view b) const;

 private:
  friend class CompletionBound;

  struct TrieNode {
    std::unordered_map<int, std::int32_t> children;
    std::uint64_t count = 0;
  };

  BehavioralModel() = default;
  std::string key(std::span<const int> ids) const;
  std::size_t count_of(std::span<const int> ids) const;
  double ngram_factor(std::span<const int> context, int next) const;
  /// The N-1 (or fewer) ids an N-gram conditions on after `prefix`.
  std::vector<int> ngram_context(std::span<const int> prefix) const;
  double pair_log(int a, int b) const;
  double log_normalizer_ngram(const Trace& trace, std::size_t cap) const;
  double log_normalizer_weak_order(const Trace& trace, std::size_t cap) const;
  double log_normalizer_trace_equivalence(const Trace& trace) const;
  std::vector<int> ids_of(std::span<const std::string> word) const;

  ModelSpec spec_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
  int marker_id_ = -2;
  std::size_t certain_traces_ = 0;
  std::size_t traces_ = 0;

  // trace equivalence: one trie per word length, root index by length
  std::vector<TrieNode> trie_;
  std::unordered_map<std::size_t, std::int32_t> roots_;
  std::unordered_map<std::size_t, std::vector<std::pair<std::vector<int>, std::uint64_t>>>
      variants_by_length_;

  // N-gram: traces holding each certain sequence of length <= N
  std::unordered_map<std::string, std::uint32_t> ngram_counts_;

  // weak order: dense |A|x|A| matrices
  std::vector<std::uint32_t> ordered_;
  std::vector<std::uint32_t> both_;
  std::vector<double> pair_log_;
};

/// Upper bound on the log score a partial resolution of one trace can still
/// gain. Exact (the best completion) for N-gram and weak order; 0 for trace
/// equivalence and uniform, whose prefix scores already bound completions.
/// Degrades to 0 when an event set exceeds the subset budget. Memoizes, so
/// one instance must not be shared between threads.
class CompletionBound {
 public:
  CompletionBound(const BehavioralModel& model, const Trace& trace,
                  std::size_t cap = kDefaultEnumerationCap);

  /// `set`: index of the event set being filled; `mask`: its events already
  /// placed (bit i = event i of the set); `prefix`: model ids of all placed
  /// events. Call with set == number of sets for a complete resolution.
  double operator()(std::size_t set, std::uint64_t mask, std::span<const int> prefix) const;

 private:
  double ngram_best(std::size_t set, std::uint64_t mask, const std::vector<int>& context) const;

  const BehavioralModel& model_;
  std::size_t cap_;
  bool active_ = false;
  std::vector<std::vector<int>> ids_;  // model ids per set, set order
  // weak order: pairs across sets are fixed, only the order inside a set varies
  std::vector<std::vector<double>> cross_;     // per event, pair terms with earlier sets
  std::vector<std::vector<double>> in_set_;    // per set and mask, best order of the rest
  std::vector<double> tail_;                   // per set, everything owed by later sets
  mutable std::map<std::tuple<std::size_t, std::uint64_t, std::vector<int>>, double> memo_;
};

/// Normalized probabilities over all resolutions of one trace.
struct ScoredDistribution {
  std::vector<ScoredResolution> entries;
  bool fallback_used = false;
};

/// Scores and normalizes every resolution (enumeration order). When no
/// resolution has a positive score, each receives |Φ|^-1.
ScoredDistribution distribution(const BehavioralModel& model, const Trace& trace,
                                std::size_t cap = kDefaultEnumerationCap);

}  // namespace porc

#endif  // PORC_BEHAVIORAL_HPP
