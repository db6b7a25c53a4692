#include "porc/alignment.hpp"

#include <algorithm>
#include <numeric>
#include <mutex>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "porc/errors.hpp"

namespace porc {

std::string_view to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::Synchronous: return "sync";
    case MoveKind::LogSkip: return "log";
    case MoveKind::ModelSkip: return "model";
  }
  return "sync";
}

std::string_view to_string(ConformanceFunction fn) {
  return fn == ConformanceFunction::Binary ? "bin" : "fitness";
}

std::uint32_t CostFunction::log_cost(const std::string& activity) const {
  auto it = log_skip.find(activity);
  return it == log_skip.end() ? 1 : it->second;
}

std::uint32_t CostFunction::model_cost(const std::string& label) const {
  if (label.empty()) return 0;
  auto it = model_skip.find(label);
  return it == model_skip.end() ? 1 : it->second;
}

std::size_t WordHash::operator()(const Word& w) const {
  std::size_t h = w.size();
  std::hash<std::string> hs;
  for (const auto& s : w) h ^= hs(s) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

namespace {

struct SearchNode {
  std::size_t position;
  Marking marking;
  std::uint32_t cost;
  std::int64_t parent;
  MoveKind kind;
  std::int32_t transition;  // -1 for log moves
};

struct StateKey {
  std::size_t position;
  Marking marking;
  friend bool operator==(const StateKey&, const StateKey&) = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    return MarkingHash{}(k.marking) * 1000003ULL + k.position;
  }
};

}  // namespace

Alignment optimal_alignment(const PetriNet& net, std::span<const std::string> word,
                            const AlignmentOptions& options) {
  const auto& transitions = net.transitions();
  // Successor order: label ascending, then index.
  std::vector<TransitionIndex> order(transitions.size());
  for (TransitionIndex t = 0; t < order.size(); ++t) order[t] = t;
  std::stable_sort(order.begin(), order.end(), [&](TransitionIndex a, TransitionIndex b) {
    return transitions[a].label < transitions[b].label;
  });

  std::vector<SearchNode> nodes;
  std::unordered_map<StateKey, std::uint32_t, StateKeyHash> best;
  // (cost, sequence) min-heap; the sequence number doubles as the node index.
  using Entry = std::pair<std::uint32_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  auto push = [&](SearchNode node) {
    StateKey key{node.position, node.marking};
    auto it = best.find(key);
    if (it != best.end() && it->second <= node.cost) return;
    if (it == best.end()) {
      if (best.size() >= options.state_cap) throw SearchBudgetExceeded(options.state_cap);
      best.emplace(std::move(key), node.cost);
    } else {
      it->second = node.cost;
    }
    open.emplace(node.cost, nodes.size());
    nodes.push_back(std::move(node));
  };

  push(SearchNode{0, net.initial_marking(), 0, -1, MoveKind::Synchronous, -1});
  while (!open.empty()) {
    const auto [cost, index] = open.top();
    open.pop();
    const std::size_t position = nodes[index].position;
    const Marking marking = nodes[index].marking;
    if (best.at(StateKey{position, marking}) < cost) continue;  // stale entry

    if (position == word.size() && marking == net.final_marking()) {
      Alignment result;
      result.cost = cost;
      for (std::int64_t i = static_cast<std::int64_t>(index); nodes[i].parent >= 0;
           i = nodes[i].parent) {
        const SearchNode& n = nodes[i];
        Move m;
        m.kind = n.kind;
        if (n.kind == MoveKind::LogSkip) {
          m.activity = word[n.position - 1];
        } else {
          m.activity = transitions[n.transition].label;
          m.transition = transitions[n.transition].id;
        }
        result.moves.push_back(std::move(m));
      }
      std::reverse(result.moves.begin(), result.moves.end());
      return result;
    }

    const std::vector<TransitionIndex> live = enabled(net, marking);
    auto is_live = [&](TransitionIndex t) {
      return std::binary_search(live.begin(), live.end(), t);
    };
    const auto self = static_cast<std::int64_t>(index);
    if (position < word.size()) {
      for (TransitionIndex t : order) {
        if (!transitions[t].silent() && transitions[t].label == word[position] && is_live(t)) {
          push(SearchNode{position + 1, fire(net, marking, t), cost, self,
                          MoveKind::Synchronous, static_cast<std::int32_t>(t)});
        }
      }
      push(SearchNode{position + 1, marking, cost + options.costs.log_cost(word[position]), self,
                      MoveKind::LogSkip, -1});
    }
    for (TransitionIndex t : order) {
      if (!is_live(t)) continue;
      push(SearchNode{position, fire(net, marking, t),
                      cost + options.costs.model_cost(transitions[t].label), self,
                      MoveKind::ModelSkip, static_cast<std::int32_t>(t)});
    }
  }
  throw NoAcceptedWord();
}

int conf_bin(const PetriNet& net, std::span<const std::string> word, std::size_t state_cap) {
  return accepts(net, word, state_cap) ? 1 : 0;
}

namespace {

double fitness_value(std::uint32_t cost, std::uint64_t worst) {
  if (worst == 0) return 1.0;
  return std::clamp(1.0 - static_cast<double>(cost) / static_cast<double>(worst), 0.0, 1.0);
}

std::uint64_t log_skip_total(const CostFunction& costs, std::span<const std::string> word) {
  std::uint64_t sum = 0;
  for (const auto& a : word) sum += costs.log_cost(a);
  return sum;
}

}  // namespace

double conf_fit(const PetriNet& net, std::span<const std::string> word,
                const AlignmentOptions& options) {
  const std::uint32_t model_only = optimal_alignment(net, {}, options).cost;
  const Alignment a = optimal_alignment(net, word, options);
  return fitness_value(a.cost, log_skip_total(options.costs, word) + model_only);
}

// ---- marking graph ---------------------------------------------------------

std::unique_ptr<MarkingGraph> MarkingGraph::build(const PetriNet& net, const CostFunction& costs,
                                                  std::size_t cap) {
  auto g = std::make_unique<MarkingGraph>();
  g->costs_ = &costs;
  const auto& transitions = net.transitions();
  for (const Transition& t : transitions)
    if (!t.silent()) g->label_ids_.try_emplace(t.label, static_cast<std::int32_t>(g->label_ids_.size()));

  std::vector<Marking> markings = {net.initial_marking()};
  std::unordered_map<Marking, std::uint32_t, MarkingHash> index = {{net.initial_marking(), 0}};
  for (std::size_t i = 0; i < markings.size(); ++i) {
    std::vector<Edge> out;
    for (TransitionIndex t : enabled(net, markings[i])) {
      Marking next = fire(net, markings[i], t);
      auto [it, fresh] = index.try_emplace(next, static_cast<std::uint32_t>(markings.size()));
      if (fresh) {
        if (markings.size() >= cap) return nullptr;
        markings.push_back(std::move(next));
      }
      const Transition& tr = transitions[t];
      out.push_back(Edge{it->second, tr.silent() ? -1 : g->label_ids_.at(tr.label),
                         costs.model_cost(tr.label)});
    }
    g->out_.push_back(std::move(out));
  }
  auto fin = index.find(net.final_marking());
  if (fin == index.end()) return nullptr;
  g->final_ = fin->second;
  g->start_.assign(markings.size(), kUnreachable);
  g->start_[0] = 0;
  g->close(g->start_);
  return g;
}

void MarkingGraph::close(Costs& costs) const {
  using Entry = std::pair<std::uint32_t, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  for (std::uint32_t m = 0; m < costs.size(); ++m)
    if (costs[m] != kUnreachable) open.emplace(costs[m], m);
  while (!open.empty()) {
    const auto [c, m] = open.top();
    open.pop();
    if (c > costs[m]) continue;
    for (const Edge& e : out_[m]) {
      if (c + e.cost < costs[e.target]) {
        costs[e.target] = c + e.cost;
        open.emplace(costs[e.target], e.target);
      }
    }
  }
}

MarkingGraph::Costs MarkingGraph::step(const Costs& prefix, const std::string& activity) const {
  Costs next(prefix.size(), kUnreachable);
  auto label = label_ids_.find(activity);
  const std::uint32_t skip = costs_->log_cost(activity);
  for (std::uint32_t m = 0; m < prefix.size(); ++m) {
    const std::uint32_t c = prefix[m];
    if (c == kUnreachable) continue;
    next[m] = std::min(next[m], c + skip);
    if (label == label_ids_.end()) continue;
    for (const Edge& e : out_[m])
      if (e.label == label->second) next[e.target] = std::min(next[e.target], c);
  }
  close(next);
  return next;
}

// ---------------------------------------------------------------------------

Aligner::Aligner(const PetriNet& net, AlignmentOptions options)
    : net_(net), options_(std::move(options)) {
  empty_word_cost_ = optimal_alignment(net_, {}, options_).cost;
  for (const auto& [label, cost] : options_.costs.log_skip) zero_cost_means_fit_ &= cost > 0;
  for (const auto& [label, cost] : options_.costs.model_skip) zero_cost_means_fit_ &= cost > 0;
}

const MarkingGraph* Aligner::graph() {
  std::call_once(graph_once_, [&] {
    graph_ = MarkingGraph::build(net_, options_.costs, options_.state_cap);
  });
  return graph_.get();
}

double Aligner::conformance_from_cost(std::span<const std::string> word, std::uint32_t cost,
                                      ConformanceFunction fn) {
  if (fn == ConformanceFunction::Fitness)
    return fitness_value(cost, log_skip_total(options_.costs, word) + empty_word_cost_);
  if (zero_cost_means_fit_) return cost == 0 ? 1.0 : 0.0;
  return conforms(word) ? 1.0 : 0.0;
}

std::vector<double> Aligner::conformance_all(std::span<const Word> words, ConformanceFunction fn) {
  std::vector<double> out(words.size());
  const MarkingGraph* g = graph();
  if (!g) {
    for (std::size_t i = 0; i < words.size(); ++i) out[i] = conformance(words[i], fn);
    return out;
  }
  std::vector<std::size_t> order(words.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return words[a] < words[b]; });
  // stack[k] holds the costs after the first k activities of the current word
  std::vector<MarkingGraph::Costs> stack = {g->start()};
  const Word* previous = nullptr;
  for (std::size_t i : order) {
    const Word& w = words[i];
    std::size_t common = 0;
    if (previous) {
      const std::size_t limit = std::min(previous->size(), w.size());
      while (common < limit && (*previous)[common] == w[common]) ++common;
    }
    stack.resize(common + 1);
    for (std::size_t k = common; k < w.size(); ++k) stack.push_back(g->step(stack.back(), w[k]));
    out[i] = conformance_from_cost(w, g->final_cost(stack.back()), fn);
    previous = &w;
  }
  return out;
}

std::shared_ptr<const Alignment> Aligner::align(std::span<const std::string> word) {
  Word key(word.begin(), word.end());
  {
    std::shared_lock lock(mutex_);
    auto it = alignments_.find(key);
    if (it != alignments_.end()) {
      ++hits_;
      return it->second;
    }
  }
  ++searches_;
  auto result = std::make_shared<const Alignment>(optimal_alignment(net_, word, options_));
  std::unique_lock lock(mutex_);
  return alignments_.try_emplace(std::move(key), std::move(result)).first->second;
}

bool Aligner::conforms(std::span<const std::string> word) {
  Word key(word.begin(), word.end());
  {
    std::shared_lock lock(mutex_);
    auto it = membership_.find(key);
    if (it != membership_.end()) {
      ++hits_;
      return it->second;
    }
  }
  ++searches_;
  const bool ok = accepts(net_, word, options_.state_cap);
  std::unique_lock lock(mutex_);
  membership_.try_emplace(std::move(key), ok);
  return ok;
}

double Aligner::fitness(std::span<const std::string> word) {
  const auto a = align(word);
  return fitness_value(a->cost, log_skip_total(options_.costs, word) + empty_word_cost_);
}

double Aligner::conformance(std::span<const std::string> word, ConformanceFunction fn) {
  return fn == ConformanceFunction::Binary ? (conforms(word) ? 1.0 : 0.0) : fitness(word);
}

Aligner::Stats Aligner::stats() const { return Stats{searches_.load(), hits_.load()}; }

void Aligner::clear_cache() {
  std::unique_lock lock(mutex_);
  alignments_.clear();
  membership_.clear();
}

PrefixAligner::PrefixAligner(Aligner& aligner) : aligner_(aligner), graph_(aligner.graph()) {
  if (graph_) nodes_.push_back(Node{graph_->start(), {}});
}

double PrefixAligner::conformance(std::span<const std::string> word, ConformanceFunction fn) {
  if (!graph_) return aligner_.conformance(word, fn);
  std::size_t at = 0;
  for (const std::string& a : word) {
    auto it = nodes_[at].next.find(a);
    if (it == nodes_[at].next.end()) {
      MarkingGraph::Costs costs = graph_->step(nodes_[at].costs, a);
      nodes_.push_back(Node{std::move(costs), {}});
      it = nodes_[at].next.emplace(a, nodes_.size() - 1).first;
    }
    at = it->second;
  }
  return aligner_.conformance_from_cost(word, graph_->final_cost(nodes_[at].costs), fn);
}

}  // namespace porc
