#include "porc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "porc/errors.hpp"
#include "porc/resolution.hpp"

namespace porc {

namespace {

/// A window label together with the event set it was drawn from (-1 for the
/// start marker).
struct Slot {
  std::string label;
  int set = -1;
};
using Window = std::vector<Slot>;

/// Every activity sequence that occupies `n` consecutive positions in some
/// resolution (optionally prefixed with the start marker). Positions inside
/// one event set may hold any ordered selection of its distinct events.
std::vector<Window> resolution_windows(const Trace& trace, std::size_t n, bool marker) {
  std::vector<int> position_set;
  if (marker) position_set.push_back(-1);
  const auto& sets = trace.event_sets();
  for (std::size_t s = 0; s < sets.size(); ++s)
    for (std::size_t i = 0; i < sets[s].size(); ++i) position_set.push_back(static_cast<int>(s));
  const std::size_t len = std::min(n, position_set.size());

  std::vector<Window> out;
  Window current;
  std::vector<std::vector<bool>> used(sets.size());
  for (std::size_t s = 0; s < sets.size(); ++s) used[s].assign(sets[s].size(), false);

  auto dfs = [&](auto&& self, std::size_t q, std::size_t end) -> void {
    if (q == end) {
      out.push_back(current);
      return;
    }
    const int s = position_set[q];
    if (s < 0) {
      current.push_back(Slot{std::string(kStartMarker), -1});
      self(self, q + 1, end);
      current.pop_back();
      return;
    }
    const auto& events = sets[static_cast<std::size_t>(s)].events();
    for (std::size_t e = 0; e < events.size(); ++e) {
      if (used[s][e]) continue;
      used[s][e] = true;
      current.push_back(Slot{events[e].activity, s});
      self(self, q + 1, end);
      current.pop_back();
      used[s][e] = false;
    }
  };
  for (std::size_t p = 0; p + len <= position_set.size(); ++p) dfs(dfs, p, p + len);
  return out;
}

Word labels_of(const Window& w) {
  Word out;
  for (const Slot& s : w) out.push_back(s.label);
  return out;
}

bool touches_uncertain(const Window& w, const Trace& trace) {
  return std::any_of(w.begin(), w.end(), [&](const Slot& s) {
    return s.set >= 0 && trace.event_sets()[static_cast<std::size_t>(s.set)].uncertain();
  });
}

/// σ′ is certain and its word is the word of some resolution of `trace`.
bool same_variant(const Trace& candidate, const Trace& trace) {
  if (!candidate.certain() || candidate.event_count() != trace.event_count()) return false;
  const Word word = candidate.canonical_word();
  std::size_t pos = 0;
  for (const EventSet& set : trace.event_sets()) {
    std::vector<std::string> want;
    for (const Event& e : set.events()) want.push_back(e.activity);
    std::vector<std::string> have(word.begin() + static_cast<std::ptrdiff_t>(pos),
                                  word.begin() + static_cast<std::ptrdiff_t>(pos + want.size()));
    std::sort(want.begin(), want.end());
    std::sort(have.begin(), have.end());
    if (want != have) return false;
    pos += want.size();
  }
  return true;
}

bool certain_any(const std::set<Word>& windows, const Trace& candidate) {
  for (const Word& w : windows) {
    const bool marker = !w.empty() && w.front() == kStartMarker;
    if (certain_in(w, candidate, marker)) return true;
  }
  return false;
}

/// Distinct ordered label pairs (x, y), x != y, sharing an uncertain set.
std::set<std::pair<std::string, std::string>> unordered_label_pairs(const Trace& trace) {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const EventSet& set : trace.event_sets()) {
    if (!set.uncertain()) continue;
    for (const Event& a : set.events())
      for (const Event& b : set.events())
        if (a.activity != b.activity) pairs.emplace(a.activity, b.activity);
  }
  return pairs;
}

bool shares_set(const Trace& trace, const std::string& x, const std::string& y) {
  for (const EventSet& set : trace.event_sets()) {
    bool hx = false, hy = false;
    for (const Event& e : set.events()) {
      hx |= e.activity == x;
      hy |= e.activity == y;
    }
    if (hx && hy) return true;
  }
  return false;
}

}  // namespace

bool has_evidence(const Trace& trace, const BehavioralModel& model) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  try {
    return model.log_normalizer(trace) > kNegInf;
  } catch (const EnumerationCapExceeded&) {
    RankedResolutions ranked(trace, model);
    auto best = ranked.next();
    return best && best->log_score > kNegInf;
  }
}

double coverage(const EventLog& log, const BehavioralModel& model) {
  std::size_t uncertain = 0, covered = 0;
  for (const Trace& t : log.traces()) {
    if (t.certain()) continue;
    ++uncertain;
    if (has_evidence(t, model)) ++covered;
  }
  if (uncertain == 0) return 1.0;
  return static_cast<double>(covered) / static_cast<double>(uncertain);
}

std::size_t support_trace(const EventLog& log, const BehavioralModel& model, const Trace& trace) {
  if (trace.certain()) return 0;
  const ModelSpec& spec = model.spec();
  std::size_t count = 0;
  switch (spec.kind) {
    case ModelKind::Uniform:
      return 0;
    case ModelKind::TraceEquivalence:
      for (const Trace& other : log.traces()) count += same_variant(other, trace) ? 1 : 0;
      return count;
    case ModelKind::NGram: {
      std::set<Word> windows;
      for (const Window& w :
           resolution_windows(trace, static_cast<std::size_t>(spec.n), spec.start_marker))
        if (touches_uncertain(w, trace)) windows.insert(labels_of(w));
      for (const Trace& other : log.traces()) count += certain_any(windows, other) ? 1 : 0;
      return count;
    }
    case ModelKind::WeakOrder: {
      const auto pairs = unordered_label_pairs(trace);
      for (const Trace& other : log.traces()) {
        count += std::any_of(pairs.begin(), pairs.end(), [&](const auto& p) {
          return ordered_in(p.first, p.second, other);
        }) ? 1 : 0;
      }
      return count;
    }
  }
  return 0;
}

std::vector<const Trace*> uncertain_traces(const EventLog& log, const std::string& x,
                                           const std::string& y) {
  std::vector<const Trace*> out;
  if (x == y) return out;
  for (const Trace& t : log.traces())
    if (shares_set(t, x, y)) out.push_back(&t);
  return out;
}

std::size_t support_pair(const EventLog& log, const BehavioralModel& model, const std::string& x,
                         const std::string& y) {
  const auto needing = uncertain_traces(log, x, y);
  if (needing.empty()) return 0;
  const ModelSpec& spec = model.spec();
  std::size_t count = 0;
  switch (spec.kind) {
    case ModelKind::Uniform:
      return 0;
    case ModelKind::TraceEquivalence:
      for (const Trace& other : log.traces()) {
        count += std::any_of(needing.begin(), needing.end(), [&](const Trace* t) {
          return same_variant(other, *t);
        }) ? 1 : 0;
      }
      return count;
    case ModelKind::NGram: {
      std::set<Word> windows;
      for (const Trace* t : needing) {
        for (const Window& w :
             resolution_windows(*t, static_cast<std::size_t>(spec.n), spec.start_marker)) {
          // x and y must both come from one event set that holds the pair.
          bool relevant = false;
          for (const Slot& a : w) {
            if (a.set < 0 || a.label != x) continue;
            for (const Slot& b : w) relevant |= b.set == a.set && b.label == y;
          }
          if (relevant) windows.insert(labels_of(w));
        }
      }
      for (const Trace& other : log.traces()) count += certain_any(windows, other) ? 1 : 0;
      return count;
    }
    case ModelKind::WeakOrder:
      for (const Trace& other : log.traces())
        count += (ordered_in(x, y, other) || ordered_in(y, x, other)) ? 1 : 0;
      return count;
  }
  return 0;
}

double uncertainty_ratio(const EventLog& log, const BehavioralModel& model, const std::string& x,
                         const std::string& y) {
  const std::size_t n = uncertain_traces(log, x, y).size();
  if (n == 0) throw NoUncertainPair(x, y);
  return static_cast<double>(support_pair(log, model, x, y)) / static_cast<double>(n);
}

std::vector<std::pair<std::string, std::string>> uncertain_pairs(const EventLog& log) {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const Trace& t : log.traces())
    for (const auto& [a, b] : unordered_label_pairs(t))
      if (a < b) pairs.emplace(a, b);
  return {pairs.begin(), pairs.end()};
}

std::vector<PairMeasure> pair_measures(const EventLog& log, const BehavioralModel& model) {
  std::vector<PairMeasure> out;
  for (const auto& [x, y] : uncertain_pairs(log)) {
    PairMeasure m;
    m.x = x;
    m.y = y;
    m.uncertain_traces = uncertain_traces(log, x, y).size();
    m.support = support_pair(log, model, x, y);
    m.ratio = static_cast<double>(m.support) / static_cast<double>(m.uncertain_traces);
    out.push_back(std::move(m));
  }
  return out;
}

SelectionReport recommend(const EventLog& log, const SelectionOptions& options) {
  SelectionReport report;
  bool chosen = false;
  for (const std::string& name : options.kinds) {
    auto spec = ModelSpec::parse(name);
    if (!spec) throw Error("unknown behavioral model '" + name + "'");
    spec->start_marker = options.start_marker;
    const BehavioralModel model = BehavioralModel::build(*spec, log);

    ModelMeasures m;
    m.spec = *spec;
    m.coverage = coverage(log, model);
    m.pairs = pair_measures(log, model);
    double sum = 0.0;
    for (const PairMeasure& p : m.pairs) sum += p.ratio;
    m.mean_uncertainty_ratio = m.pairs.empty() ? 0.0 : sum / static_cast<double>(m.pairs.size());
    const bool ratio_ok =
        m.pairs.empty() || (options.direction == RatioDirection::AtLeast
                                ? m.mean_uncertainty_ratio >= options.ratio_threshold
                                : m.mean_uncertainty_ratio <= options.ratio_threshold);
    m.qualifies = m.coverage > options.coverage_threshold && ratio_ok;
    if (m.qualifies && !chosen) {
      report.recommended = *spec;
      report.threshold_met = true;
      chosen = true;
    }
    report.per_model.push_back(std::move(m));
  }
  if (!chosen && !report.per_model.empty()) report.recommended = report.per_model.back().spec;
  return report;
}

}  // namespace porc
