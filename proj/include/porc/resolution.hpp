#ifndef PORC_RESOLUTION_HPP
#define PORC_RESOLUTION_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "porc/log_model.hpp"

namespace porc {

class BehavioralModel;
class CompletionBound;

/// Running score of a resolution prefix under a behavioral model.
struct ScoreState {
  double log_score = 0.0;
  std::int32_t cursor = -1;  // model-specific position (trie node for trace equivalence)
};

/// One total order of a trace's events that keeps the event-set blocks.
struct Resolution {
  std::string case_id;
  std::vector<Event> events;
  Word word;
};

struct ScoredResolution {
  Resolution resolution;
  double log_score = 0.0;    // log of the raw (unnormalized) score; -inf for 0
  double probability = 0.0;  // normalized over all resolutions of the trace

  double raw_score() const;
};

/// Default bound on materialized resolutions / best-first nodes.
inline constexpr std::size_t kDefaultEnumerationCap = 100'000;

/// Lazily yields every resolution of a trace, lexicographic by canonical event
/// order (the last event set varies fastest).
class ResolutionEnumerator {
 public:
  explicit ResolutionEnumerator(const Trace& trace);

  std::optional<Resolution> next();

 private:
  Resolution materialize() const;

  const Trace& trace_;
  std::vector<std::vector<std::size_t>> perms_;
  bool done_ = false;
};

/// All resolutions; throws EnumerationCapExceeded above `cap`.
std::vector<Resolution> enumerate_all(const Trace& trace,
                                      std::size_t cap = kDefaultEnumerationCap);

/// Yields resolutions in non-increasing score under a behavioral model, ties
/// broken by word and then by canonical event order. Best-first search over
/// partial resolutions ordered by prefix score plus an upper bound on what
/// the remaining events can still gain (CompletionBound). The bound never
/// underestimates, so the first complete node popped is the best. The bound
/// sums terms in another order than the prefix score, so consecutive scores
/// may rise by a few ulps.
class RankedResolutions {
 public:
  RankedResolutions(const Trace& trace, const BehavioralModel& model,
                    std::size_t node_budget = 50 * kDefaultEnumerationCap);
  ~RankedResolutions();

  /// The next best resolution; `probability` is left at 0.
  std::optional<ScoredResolution> next();

  std::size_t nodes_created() const { return nodes_created_; }

 private:
  struct Node {
    std::vector<std::uint32_t> chosen;  // flat event indices
    ScoreState state;
    double priority = 0.0;  // state.log_score + completion bound
  };
  double bound_after(const std::vector<std::uint32_t>& chosen, std::span<const int> prefix) const;
  struct NodeOrder {
    const RankedResolutions* owner;
    bool operator()(const Node& a, const Node& b) const;
  };
  friend struct NodeOrder;

  const Trace& trace_;
  const BehavioralModel& model_;
  std::size_t node_budget_;
  std::unique_ptr<CompletionBound> bound_;
  std::size_t nodes_created_ = 0;
  std::vector<Event> flat_;
  std::vector<int> model_ids_;        // activity id in the model per flat event
  std::vector<std::uint32_t> ranks_;  // activity string rank per flat event
  std::vector<std::size_t> set_of_position_;
  std::vector<std::size_t> set_begin_;
  std::vector<std::size_t> set_end_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open_;
};

/// The k most probable resolutions in non-increasing probability.
/// Scores every resolution when |Φ| ≤ cap, otherwise runs the best-first
/// ranking with the model's factorized normalizer; the ranking and the
/// normalizer keep their default budgets whatever `cap` is.
std::vector<ScoredResolution> k_best(const Trace& trace, const BehavioralModel& model,
                                     std::size_t k, std::size_t cap = kDefaultEnumerationCap);

}  // namespace porc

#endif  // PORC_RESOLUTION_HPP
