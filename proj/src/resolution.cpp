#include "porc/resolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "porc/behavioral.hpp"
#include "porc/errors.hpp"

namespace porc {

double ScoredResolution::raw_score() const { return std::exp(log_score); }

ResolutionEnumerator::ResolutionEnumerator(const Trace& trace) : trace_(trace) {
  for (const EventSet& set : trace.event_sets()) {
    std::vector<std::size_t> p(set.size());
    std::iota(p.begin(), p.end(), 0);
    perms_.push_back(std::move(p));
  }
}

Resolution ResolutionEnumerator::materialize() const {
  Resolution r;
  r.case_id = trace_.case_id();
  r.events.reserve(trace_.event_count());
  r.word.reserve(trace_.event_count());
  const auto& sets = trace_.event_sets();
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (std::size_t i : perms_[s]) {
      r.events.push_back(sets[s].events()[i]);
      r.word.push_back(sets[s].events()[i].activity);
    }
  }
  return r;
}

std::optional<Resolution> ResolutionEnumerator::next() {
  if (done_) return std::nullopt;
  Resolution r = materialize();
  // Odometer over per-set permutations, last set fastest.
  std::size_t s = perms_.size();
  for (;;) {
    if (s == 0) {
      done_ = true;
      break;
    }
    --s;
    if (std::next_permutation(perms_[s].begin(), perms_[s].end())) break;
  }
  return r;
}

std::vector<Resolution> enumerate_all(const Trace& trace, std::size_t cap) {
  std::uint64_t count = 0;
  try {
    count = resolution_count(trace);
  } catch (const CountOverflow&) {
    throw EnumerationCapExceeded(cap);
  }
  if (count > cap) throw EnumerationCapExceeded(cap);
  std::vector<Resolution> out;
  out.reserve(count);
  ResolutionEnumerator it(trace);
  while (auto r = it.next()) out.push_back(std::move(*r));
  return out;
}

// ---------------------------------------------------------------------------

RankedResolutions::RankedResolutions(const Trace& trace, const BehavioralModel& model,
                                     std::size_t node_budget)
    : trace_(trace),
      model_(model),
      node_budget_(node_budget),
      bound_(std::make_unique<CompletionBound>(model, trace)),
      open_(NodeOrder{this}) {
  flat_ = trace.events();
  std::vector<std::string> labels;
  for (const Event& e : flat_) labels.push_back(e.activity);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  for (const Event& e : flat_) {
    model_ids_.push_back(model.activity_id(e.activity));
    ranks_.push_back(static_cast<std::uint32_t>(
        std::lower_bound(labels.begin(), labels.end(), e.activity) - labels.begin()));
  }
  std::size_t begin = 0;
  for (const EventSet& set : trace.event_sets()) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      set_of_position_.push_back(set_begin_.size());
    }
    set_begin_.push_back(begin);
    begin += set.size();
    set_end_.push_back(begin);
  }
  Node root{{}, model.start(flat_.size())};
  root.priority = root.state.log_score + bound_after(root.chosen, {});
  open_.push(std::move(root));
  nodes_created_ = 1;
}

RankedResolutions::~RankedResolutions() = default;

double RankedResolutions::bound_after(const std::vector<std::uint32_t>& chosen,
                                      std::span<const int> prefix) const {
  const std::size_t p = chosen.size();
  if (p == flat_.size()) return 0.0;
  const std::size_t set = set_of_position_[p];
  std::uint64_t mask = 0;
  for (std::size_t i = set_begin_[set]; i < p; ++i) mask |= std::uint64_t{1} << (chosen[i] - set_begin_[set]);
  return (*bound_)(set, mask, prefix);
}

// priority_queue pops the greatest element, so "less" means "worse".
bool RankedResolutions::NodeOrder::operator()(const Node& a, const Node& b) const {
  if (a.priority != b.priority) return a.priority < b.priority;
  const auto& r = owner->ranks_;
  const std::size_t n = std::min(a.chosen.size(), b.chosen.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t x = r[a.chosen[i]], y = r[b.chosen[i]];
    if (x != y) return x > y;
  }
  if (a.chosen.size() != b.chosen.size()) return a.chosen.size() > b.chosen.size();
  return a.chosen > b.chosen;
}

std::optional<ScoredResolution> RankedResolutions::next() {
  while (!open_.empty()) {
    Node node = open_.top();
    open_.pop();
    const std::size_t p = node.chosen.size();
    if (p == flat_.size()) {
      ScoredResolution out;
      out.log_score = node.state.log_score;
      out.resolution.case_id = trace_.case_id();
      for (std::uint32_t i : node.chosen) {
        out.resolution.events.push_back(flat_[i]);
        out.resolution.word.push_back(flat_[i].activity);
      }
      return out;
    }
    const std::size_t set = set_of_position_[p];
    std::vector<int> prefix;
    prefix.reserve(p);
    for (std::uint32_t i : node.chosen) prefix.push_back(model_ids_[i]);
    for (std::size_t e = set_begin_[set]; e < set_end_[set]; ++e) {
      const auto idx = static_cast<std::uint32_t>(e);
      if (std::find(node.chosen.begin() + static_cast<std::ptrdiff_t>(set_begin_[set]),
                    node.chosen.end(), idx) != node.chosen.end())
        continue;
      if (nodes_created_ >= node_budget_) throw EnumerationCapExceeded(node_budget_);
      Node child{node.chosen, model_.extend(node.state, prefix, model_ids_[e])};
      child.chosen.push_back(idx);
      prefix.push_back(model_ids_[e]);
      child.priority = child.state.log_score == -std::numeric_limits<double>::infinity()
                           ? child.state.log_score
                           : child.state.log_score + bound_after(child.chosen, prefix);
      prefix.pop_back();
      open_.push(std::move(child));
      ++nodes_created_;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::vector<ScoredResolution> k_best(const Trace& trace, const BehavioralModel& model,
                                     std::size_t k, std::size_t cap) {
  if (k == 0) return {};
  bool small = true;
  try {
    small = resolution_count(trace) <= cap;
  } catch (const CountOverflow&) {
    small = false;
  }

  if (small) {
    ScoredDistribution d = distribution(model, trace, cap);
    std::vector<std::size_t> order(d.entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = d.entries[a];
      const auto& y = d.entries[b];
      if (!d.fallback_used && x.log_score != y.log_score) return x.log_score > y.log_score;
      return x.resolution.word < y.resolution.word;
    });
    std::vector<ScoredResolution> out;
    for (std::size_t i = 0; i < std::min(k, order.size()); ++i)
      out.push_back(std::move(d.entries[order[i]]));
    return out;
  }

  const double log_norm = model.log_normalizer(trace);
  double log_count = 0.0;
  for (const EventSet& set : trace.event_sets())
    log_count += std::lgamma(static_cast<double>(set.size()) + 1.0);
  RankedResolutions ranked(trace, model);
  std::vector<ScoredResolution> out;
  while (out.size() < k) {
    auto next = ranked.next();
    if (!next) break;
    next->probability = log_norm == -std::numeric_limits<double>::infinity()
                            ? std::exp(-log_count)
                            : std::exp(next->log_score - log_norm);
    out.push_back(std::move(*next));
  }
  return out;
}

}  // namespace porc
