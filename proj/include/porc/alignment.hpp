#ifndef PORC_ALIGNMENT_HPP
#define PORC_ALIGNMENT_HPP

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "porc/log_model.hpp"
#include "porc/process_model.hpp"

namespace porc {

enum class MoveKind { Synchronous = 0, LogSkip, ModelSkip };

std::string_view to_string(MoveKind kind);

struct Move {
  MoveKind kind = MoveKind::Synchronous;
  std::string activity;    // empty for silent model moves
  std::string transition;  // transition id for synchronous and model moves

  bool silent() const { return kind == MoveKind::ModelSkip && activity.empty(); }
  friend bool operator==(const Move&, const Move&) = default;
};

struct Alignment {
  std::vector<Move> moves;
  std::uint32_t cost = 0;
};

/// Skip costs; unit costs unless overridden per activity. Silent model moves
/// and synchronous moves always cost 0.
struct CostFunction {
  std::unordered_map<std::string, std::uint32_t> log_skip;
  std::unordered_map<std::string, std::uint32_t> model_skip;

  std::uint32_t log_cost(const std::string& activity) const;
  std::uint32_t model_cost(const std::string& label) const;
};

struct AlignmentOptions {
  std::size_t state_cap = default_state_cap();
  CostFunction costs;
};

/// Cost-optimal alignment by best-first search over the synchronous product
/// of word positions and markings. Ties are broken by move kind, then label.
Alignment optimal_alignment(const PetriNet& net, std::span<const std::string> word,
                            const AlignmentOptions& options = {});

/// 1 iff `word` is in the language of `net`.
int conf_bin(const PetriNet& net, std::span<const std::string> word,
             std::size_t state_cap = default_state_cap());

/// 1 - cost / (|word| + shortest accepted word), clamped to [0, 1].
double conf_fit(const PetriNet& net, std::span<const std::string> word,
                const AlignmentOptions& options = {});

enum class ConformanceFunction { Binary, Fitness };

std::string_view to_string(ConformanceFunction fn);

struct WordHash {
  std::size_t operator()(const Word& w) const;
};

/// Reachable markings of a net with their transitions. Optimal alignment
/// costs of a word prefix form one cost vector over these markings, so words
/// sharing a prefix share that work.
class MarkingGraph {
 public:
  using Costs = std::vector<std::uint32_t>;
  static constexpr std::uint32_t kUnreachable = UINT32_MAX;

  /// Null when more than `cap` markings are reachable or the final marking is not.
  static std::unique_ptr<MarkingGraph> build(const PetriNet& net, const CostFunction& costs,
                                             std::size_t cap);

  /// Costs after the empty prefix.
  const Costs& start() const { return start_; }
  /// Costs after appending `activity` to the prefix behind `prefix`.
  Costs step(const Costs& prefix, const std::string& activity) const;
  /// Optimal alignment cost of the word behind `costs`.
  std::uint32_t final_cost(const Costs& costs) const { return costs[final_]; }
  std::size_t size() const { return out_.size(); }

 private:
  struct Edge {
    std::uint32_t target;
    std::int32_t label;  // -1 for silent transitions
    std::uint32_t cost;
  };
  void close(Costs& costs) const;  // model moves until no cost improves

  const CostFunction* costs_ = nullptr;
  std::vector<std::vector<Edge>> out_;
  std::unordered_map<std::string, std::int32_t> label_ids_;
  std::uint32_t final_ = 0;
  Costs start_;
};

/// Conformance checker bound to one net, memoizing results per activity
/// sequence. Safe for concurrent use.
class Aligner {
 public:
  struct Stats {
    std::size_t searches = 0;
    std::size_t hits = 0;
  };

  explicit Aligner(const PetriNet& net, AlignmentOptions options = {});

  const PetriNet& net() const { return net_; }
  const AlignmentOptions& options() const { return options_; }

  std::shared_ptr<const Alignment> align(std::span<const std::string> word);
  bool conforms(std::span<const std::string> word);
  double fitness(std::span<const std::string> word);
  double conformance(std::span<const std::string> word, ConformanceFunction fn);
  /// Conformance of every word, in input order. Words are processed in sorted
  /// order over the marking graph so shared prefixes are aligned once; results
  /// are not cached.
  std::vector<double> conformance_all(std::span<const Word> words, ConformanceFunction fn);

  /// Shared marking graph, built on first use; null when it exceeds the state cap.
  const MarkingGraph* graph();
  /// Conformance from an optimal alignment cost.
  double conformance_from_cost(std::span<const std::string> word, std::uint32_t cost,
                               ConformanceFunction fn);

  /// Cost of skipping a cheapest complete model run entirely.
  std::uint32_t empty_word_cost() const { return empty_word_cost_; }

  Stats stats() const;
  void clear_cache();

 private:
  const PetriNet& net_;
  AlignmentOptions options_;
  std::uint32_t empty_word_cost_ = 0;
  bool zero_cost_means_fit_ = true;  // no skip is free, so cost 0 iff the word fits

  std::once_flag graph_once_;
  std::unique_ptr<MarkingGraph> graph_;

  mutable std::shared_mutex mutex_;
  std::unordered_map<Word, std::shared_ptr<const Alignment>, WordHash> alignments_;
  std::unordered_map<Word, bool, WordHash> membership_;
  std::atomic<std::size_t> searches_{0};
  std::atomic<std::size_t> hits_{0};
};

/// Checks a stream of related words, such as resolutions of one trace in
/// probability order, keeping the cost vector of every prefix seen so far.
/// Falls back to the aligner's per-word search without a marking graph.
class PrefixAligner {
 public:
  explicit PrefixAligner(Aligner& aligner);
  double conformance(std::span<const std::string> word, ConformanceFunction fn);

 private:
  struct Node {
    MarkingGraph::Costs costs;
    std::map<std::string, std::size_t, std::less<>> next;
  };
  Aligner& aligner_;
  const MarkingGraph* graph_;
  std::vector<Node> nodes_;
};

}  // namespace porc

#endif  // PORC_ALIGNMENT_HPP
