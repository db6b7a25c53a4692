#ifndef PORC_PROCESS_MODEL_HPP
#define PORC_PROCESS_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "porc/log_model.hpp"

namespace porc {

using PlaceIndex = std::uint32_t;
using TransitionIndex = std::uint32_t;

/// Token counts indexed by place.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t places) : tokens_(places, 0) {}
  explicit Marking(std::vector<std::uint32_t> tokens) : tokens_(std::move(tokens)) {}

  std::uint32_t operator[](PlaceIndex p) const { return tokens_[p]; }
  std::uint32_t& operator[](PlaceIndex p) { return tokens_[p]; }
  std::size_t size() const { return tokens_.size(); }
  std::uint64_t total() const;
  bool empty() const { return total() == 0; }
  const std::vector<std::uint32_t>& tokens() const { return tokens_; }

  friend bool operator==(const Marking&, const Marking&) = default;

 private:
  std::vector<std::uint32_t> tokens_;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const;
};

struct Arc {
  PlaceIndex place;
  std::uint32_t weight = 1;
};

struct Transition {
  std::string id;
  std::string label;  // empty for silent transitions
  std::vector<Arc> inputs;
  std::vector<Arc> outputs;

  bool silent() const { return label.empty(); }
};

/// Labeled Petri net with designated initial and final markings.
class PetriNet {
 public:
  struct ArcSpec {
    std::string id;
    std::string source;
    std::string target;
    std::uint32_t weight = 1;
  };
  struct TransitionSpec {
    std::string id;
    std::string label;  // empty: silent
  };

  /// Validates the structure; markings are given as place id -> tokens.
  PetriNet(std::vector<std::string> places, std::vector<TransitionSpec> transitions,
           std::vector<ArcSpec> arcs,
           std::vector<std::pair<std::string, std::uint32_t>> initial_marking,
           std::vector<std::pair<std::string, std::uint32_t>> final_marking);

  const std::vector<std::string>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const Marking& initial_marking() const { return initial_; }
  const Marking& final_marking() const { return final_; }

  std::optional<PlaceIndex> place_index(std::string_view id) const;
  std::optional<TransitionIndex> transition_index(std::string_view id) const;
  /// Distinct visible labels.
  std::vector<std::string> labels() const;

 private:
  std::vector<std::string> places_;
  std::vector<Transition> transitions_;
  Marking initial_;
  Marking final_;
};

struct PnmlOptions {
  /// Overrides (or supplies) the final marking with one token on this place.
  std::string final_place;
};

PetriNet parse_pnml(const std::string& path, const PnmlOptions& options = {});
PetriNet read_pnml(std::istream& in, const PnmlOptions& options = {});
void write_pnml(const PetriNet& net, std::ostream& out);

/// Default cap on explored states; PORC_STATE_CAP overrides it.
std::size_t default_state_cap();

bool is_enabled(const PetriNet& net, const Marking& m, TransitionIndex t);
/// Enabled transitions, ascending index.
std::vector<TransitionIndex> enabled(const PetriNet& net, const Marking& m);
/// Throws NotEnabled.
Marking fire(const PetriNet& net, const Marking& m, TransitionIndex t);

/// Whether some firing sequence with visible projection `word` reaches the
/// final marking. Throws SearchBudgetExceeded past `state_cap` states.
bool accepts(const PetriNet& net, std::span<const std::string> word,
             std::size_t state_cap = default_state_cap());

/// Minimum number of visible firings from initial to final marking.
/// Throws NoAcceptedWord.
std::size_t shortest_accepted_word_cost(const PetriNet& net,
                                        std::size_t state_cap = default_state_cap());

}  // namespace porc

#endif  // PORC_PROCESS_MODEL_HPP
