#include "porc/behavioral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "porc/errors.hpp"

namespace porc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kUncertainSlot = -3;

double safe_log_ratio(double num, double den) {
  if (den <= 0.0 || num <= 0.0) return kNegInf;
  return std::log(num / den);
}

/// log(exp(a) + exp(b)) without overflow; -inf is the neutral element.
double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void append_id(std::string& key, int id) {
  char buf[sizeof(int)];
  std::memcpy(buf, &id, sizeof(int));
  key.append(buf, sizeof(int));
}

}  // namespace

std::optional<ModelSpec> ModelSpec::parse(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "te") return ModelSpec{ModelKind::TraceEquivalence, 2, true};
  if (s == "wo") return ModelSpec{ModelKind::WeakOrder, 2, true};
  if (s == "bl1" || s == "uniform") return ModelSpec{ModelKind::Uniform, 2, true};
  if (s.size() >= 2 && s.back() == 'g') {
    const std::string digits = s.substr(0, s.size() - 1);
    if (digits.empty() || digits.size() > 3 ||
        !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
      return std::nullopt;
    const int n = std::stoi(digits);
    if (n < 2) return std::nullopt;
    return ModelSpec{ModelKind::NGram, n, true};
  }
  return std::nullopt;
}

std::string ModelSpec::name() const {
  switch (kind) {
    case ModelKind::TraceEquivalence: return "te";
    case ModelKind::NGram: return std::to_string(n) + "g";
    case ModelKind::WeakOrder: return "wo";
    case ModelKind::Uniform: return "bl1";
  }
  return "bl1";
}

bool certain_in(std::span<const std::string> seq, const Trace& trace, bool leading_marker) {
  const auto& sets = trace.event_sets();
  const std::size_t offset = leading_marker ? 1 : 0;
  const std::size_t n = sets.size() + offset;
  if (seq.size() > n) return false;
  auto label_at = [&](std::size_t slot) -> const std::string* {
    if (leading_marker && slot == 0) return nullptr;
    const EventSet& set = sets[slot - offset];
    return set.uncertain() ? nullptr : &set.events().front().activity;
  };
  for (std::size_t i = 0; i + seq.size() <= n; ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < seq.size() && ok; ++j) {
      const std::size_t slot = i + j;
      if (leading_marker && slot == 0) {
        ok = seq[j] == kStartMarker;
      } else {
        const std::string* label = label_at(slot);
        ok = label != nullptr && *label == seq[j];
      }
    }
    if (ok) return true;
  }
  return false;
}

bool ordered_in(std::string_view a, std::string_view b, const Trace& trace) {
  std::optional<std::size_t> first_a;
  std::optional<std::size_t> last_b;
  const auto& sets = trace.event_sets();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (const Event& e : sets[i].events()) {
      if (e.activity == a && !first_a) first_a = i;
      if (e.activity == b) last_b = i;
    }
  }
  return first_a && last_b && *first_a < *last_b;
}

// ---------------------------------------------------------------------------

BehavioralModel BehavioralModel::build(const ModelSpec& spec, const EventLog& log,
                                       std::string_view exclude_case) {
  if (log.size() == 0) throw EmptyLog();
  if (spec.kind == ModelKind::NGram && spec.n < 2)
    throw Error("N-gram models need N >= 2");

  BehavioralModel m;
  m.spec_ = spec;
  m.names_.assign(log.activity_universe().begin(), log.activity_universe().end());
  for (std::size_t i = 0; i < m.names_.size(); ++i) m.ids_.emplace(m.names_[i], int(i));
  m.marker_id_ = static_cast<int>(m.names_.size());

  std::vector<const Trace*> used;
  for (const Trace& t : log.traces())
    if (exclude_case.empty() || t.case_id() != exclude_case) used.push_back(&t);
  m.traces_ = used.size();
  for (const Trace* t : used) m.certain_traces_ += t->certain() ? 1 : 0;

  switch (spec.kind) {
    case ModelKind::TraceEquivalence: {
      std::map<std::vector<int>, std::uint64_t> variants;
      for (const Trace* t : used) {
        if (!t->certain()) continue;
        ++variants[m.ids_of(t->canonical_word())];
      }
      for (const auto& [ids, count] : variants) {
        auto [root_it, fresh] = m.roots_.try_emplace(ids.size(), 0);
        if (fresh) {
          root_it->second = static_cast<std::int32_t>(m.trie_.size());
          m.trie_.emplace_back();
        }
        std::int32_t node = root_it->second;
        m.trie_[node].count += count;
        for (int id : ids) {
          auto it = m.trie_[node].children.find(id);
          std::int32_t child;
          if (it == m.trie_[node].children.end()) {
            child = static_cast<std::int32_t>(m.trie_.size());
            m.trie_[node].children.emplace(id, child);
            m.trie_.emplace_back();
          } else {
            child = it->second;
          }
          node = child;
          m.trie_[node].count += count;
        }
        m.variants_by_length_[ids.size()].emplace_back(ids, count);
      }
      break;
    }
    case ModelKind::NGram: {
      const std::size_t n = static_cast<std::size_t>(spec.n);
      for (const Trace* t : used) {
        std::vector<int> slots;
        if (spec.start_marker) slots.push_back(m.marker_id_);
        for (const EventSet& set : t->event_sets())
          slots.push_back(set.uncertain() ? kUncertainSlot : m.activity_id(set.events().front().activity));
        std::unordered_set<std::string> seen;
        for (std::size_t i = 0; i < slots.size(); ++i) {
          std::string key;
          for (std::size_t len = 1; len <= n && i + len <= slots.size(); ++len) {
            if (slots[i + len - 1] == kUncertainSlot) break;
            append_id(key, slots[i + len - 1]);
            seen.insert(key);
          }
        }
        for (const auto& key : seen) ++m.ngram_counts_[key];
      }
      break;
    }
    case ModelKind::WeakOrder: {
      const std::size_t a = m.names_.size();
      m.ordered_.assign(a * a, 0);
      m.both_.assign(a * a, 0);
      constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();
      std::vector<std::size_t> first(a, kAbsent), last(a, kAbsent);
      for (const Trace* t : used) {
        std::vector<int> present;
        const auto& sets = t->event_sets();
        for (std::size_t i = 0; i < sets.size(); ++i) {
          for (const Event& e : sets[i].events()) {
            const int id = m.activity_id(e.activity);
            if (first[id] == kAbsent) {
              first[id] = i;
              present.push_back(id);
            }
            last[id] = i;
          }
        }
        for (int x : present) {
          for (int y : present) {
            ++m.both_[x * a + y];
            if (first[x] < last[y]) ++m.ordered_[x * a + y];
          }
        }
        for (int x : present) first[x] = last[x] = kAbsent;
      }
      m.pair_log_.resize(a * a);
      for (std::size_t i = 0; i < a * a; ++i)
        m.pair_log_[i] = safe_log_ratio(m.ordered_[i], m.both_[i]);
      break;
    }
    case ModelKind::Uniform:
      break;
  }
  return m;
}

int BehavioralModel::activity_id(std::string_view activity) const {
  auto it = ids_.find(std::string(activity));
  return it == ids_.end() ? -1 : it->second;
}

std::vector<int> BehavioralModel::ids_of(std::span<const std::string> word) const {
  std::vector<int> ids;
  ids.reserve(word.size());
  for (const auto& a : word) ids.push_back(activity_id(a));
  return ids;
}

std::string BehavioralModel::key(std::span<const int> ids) const {
  std::string k;
  k.reserve(ids.size() * sizeof(int));
  for (int id : ids) append_id(k, id);
  return k;
}

std::size_t BehavioralModel::count_of(std::span<const int> ids) const {
  if (std::find(ids.begin(), ids.end(), -1) != ids.end()) return 0;
  auto it = ngram_counts_.find(key(ids));
  return it == ngram_counts_.end() ? 0 : it->second;
}

double BehavioralModel::ngram_factor(std::span<const int> context, int next) const {
  if (context.empty()) return 0.0;
  std::vector<int> full(context.begin(), context.end());
  full.push_back(next);
  return safe_log_ratio(static_cast<double>(count_of(full)),
                        static_cast<double>(count_of(context)));
}

std::vector<int> BehavioralModel::ngram_context(std::span<const int> prefix) const {
  const std::size_t width = static_cast<std::size_t>(spec_.n) - 1;
  std::vector<int> context;
  if (spec_.start_marker && prefix.size() < width) context.push_back(marker_id_);
  const std::size_t take = std::min(prefix.size(), width - context.size());
  context.insert(context.end(), prefix.end() - static_cast<std::ptrdiff_t>(take), prefix.end());
  return context;
}

double BehavioralModel::pair_log(int a, int b) const {
  if (a < 0 || b < 0) return kNegInf;
  return pair_log_[static_cast<std::size_t>(a) * names_.size() + b];
}

ScoreState BehavioralModel::start(std::size_t length) const {
  ScoreState s;
  if (spec_.kind == ModelKind::TraceEquivalence) {
    auto it = roots_.find(length);
    if (it == roots_.end()) return ScoreState{kNegInf, -1};
    s.cursor = it->second;
    s.log_score = safe_log_ratio(double(trie_[s.cursor].count), double(certain_traces_));
  }
  return s;
}

ScoreState BehavioralModel::extend(const ScoreState& state, std::span<const int> prefix,
                                   int next) const {
  switch (spec_.kind) {
    case ModelKind::Uniform:
      return state;
    case ModelKind::TraceEquivalence: {
      if (state.cursor < 0) return ScoreState{kNegInf, -1};
      const auto& children = trie_[state.cursor].children;
      auto it = children.find(next);
      if (it == children.end()) return ScoreState{kNegInf, -1};
      return ScoreState{safe_log_ratio(double(trie_[it->second].count), double(certain_traces_)),
                        it->second};
    }
    case ModelKind::NGram:
      return ScoreState{state.log_score + ngram_factor(ngram_context(prefix), next), state.cursor};
    case ModelKind::WeakOrder: {
      double sum = state.log_score;
      for (int p : prefix) sum += pair_log(p, next);
      return ScoreState{sum, state.cursor};
    }
  }
  return state;
}

double BehavioralModel::log_score(std::span<const std::string> word) const {
  const std::vector<int> ids = ids_of(word);
  ScoreState s = start(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
    s = extend(s, std::span<const int>(ids.data(), i), ids[i]);
  return s.log_score;
}

double BehavioralModel::score(std::span<const std::string> word) const {
  return std::exp(log_score(word));
}

std::size_t BehavioralModel::variant_frequency(std::span<const std::string> word) const {
  auto it = roots_.find(word.size());
  if (it == roots_.end()) return 0;
  std::int32_t node = it->second;
  for (const auto& a : word) {
    auto c = trie_[node].children.find(activity_id(a));
    if (c == trie_[node].children.end()) return 0;
    node = c->second;
  }
  return trie_[node].count;
}

std::size_t BehavioralModel::ngram_count(std::span<const std::string> seq,
                                         bool leading_marker) const {
  std::vector<int> ids;
  if (leading_marker) ids.push_back(marker_id_);
  for (const auto& a : seq) ids.push_back(activity_id(a));
  return count_of(ids);
}

std::size_t BehavioralModel::order_count(std::string_view a, std::string_view b) const {
  const int x = activity_id(a), y = activity_id(b);
  if (x < 0 || y < 0 || ordered_.empty()) return 0;
  return ordered_[static_cast<std::size_t>(x) * names_.size() + y];
}

std::size_t BehavioralModel::cooccurrence_count(std::string_view a, std::string_view b) const {
  const int x = activity_id(a), y = activity_id(b);
  if (x < 0 || y < 0 || both_.empty()) return 0;
  return both_[static_cast<std::size_t>(x) * names_.size() + y];
}

// ---- normalizers ------------------------------------------------------------

namespace {

double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

void check_subset_space(std::size_t set_size, std::size_t cap) {
  if (set_size >= 63 || (std::size_t{1} << set_size) > cap) throw EnumerationCapExceeded(cap);
}

}  // namespace

double BehavioralModel::log_normalizer(const Trace& trace, std::size_t cap) const {
  switch (spec_.kind) {
    case ModelKind::Uniform: {
      double sum = 0.0;
      for (const EventSet& set : trace.event_sets()) sum += log_factorial(set.size());
      return sum;
    }
    case ModelKind::TraceEquivalence:
      return log_normalizer_trace_equivalence(trace);
    case ModelKind::NGram:
      return log_normalizer_ngram(trace, cap);
    case ModelKind::WeakOrder:
      return log_normalizer_weak_order(trace, cap);
  }
  return kNegInf;
}

// Each variant of the right length matches as many resolutions as there are
// orders of the same-activity events inside each event set.
double BehavioralModel::log_normalizer_trace_equivalence(const Trace& trace) const {
  auto it = variants_by_length_.find(trace.event_count());
  if (it == variants_by_length_.end() || certain_traces_ == 0) return kNegInf;

  std::vector<std::vector<int>> set_ids;
  double multiplicity = 0.0;
  for (const EventSet& set : trace.event_sets()) {
    std::vector<int> ids;
    for (const Event& e : set.events()) ids.push_back(activity_id(e.activity));
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size();) {
      std::size_t j = i;
      while (j < ids.size() && ids[j] == ids[i]) ++j;
      multiplicity += log_factorial(j - i);
      i = j;
    }
    set_ids.push_back(std::move(ids));
  }

  double total = 0.0;
  std::vector<int> segment;
  for (const auto& [variant, count] : it->second) {
    std::size_t pos = 0;
    bool match = true;
    for (const auto& ids : set_ids) {
      segment.assign(variant.begin() + static_cast<std::ptrdiff_t>(pos),
                     variant.begin() + static_cast<std::ptrdiff_t>(pos + ids.size()));
      std::sort(segment.begin(), segment.end());
      pos += ids.size();
      if (segment != ids) {
        match = false;
        break;
      }
    }
    if (match) total += static_cast<double>(count);
  }
  if (total == 0.0) return kNegInf;
  return std::log(total / static_cast<double>(certain_traces_)) + multiplicity;
}

// Pairs across event sets are ordered identically in every resolution; only
// pairs inside a set vary. Per set, a subset DP sums over all its orders.
double BehavioralModel::log_normalizer_weak_order(const Trace& trace, std::size_t cap) const {
  const auto& sets = trace.event_sets();
  double total = 0.0;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (std::size_t t = s + 1; t < sets.size(); ++t)
      for (const Event& x : sets[s].events())
        for (const Event& y : sets[t].events())
          total += pair_log(activity_id(x.activity), activity_id(y.activity));
  }
  if (total == kNegInf) return kNegInf;

  for (const EventSet& set : sets) {
    const std::size_t k = set.size();
    if (k == 1) continue;
    check_subset_space(k, cap);
    std::vector<int> ids;
    for (const Event& e : set.events()) ids.push_back(activity_id(e.activity));
    std::vector<double> f(std::size_t{1} << k, kNegInf);
    f[0] = 0.0;
    for (std::size_t mask = 0; mask < f.size(); ++mask) {
      if (f[mask] == kNegInf) continue;
      for (std::size_t x = 0; x < k; ++x) {
        if (mask & (std::size_t{1} << x)) continue;
        double step = f[mask];
        for (std::size_t y = 0; y < k && step != kNegInf; ++y)
          if (mask & (std::size_t{1} << y)) step += pair_log(ids[y], ids[x]);
        const std::size_t next = mask | (std::size_t{1} << x);
        f[next] = log_add(f[next], step);
      }
    }
    total += f.back();
    if (total == kNegInf) return kNegInf;
  }
  return total;
}

// Forward pass over event sets; the state is the last N-1 activities, inside a
// set additionally the subset of events already placed.
double BehavioralModel::log_normalizer_ngram(const Trace& trace, std::size_t cap) const {
  const std::size_t width = static_cast<std::size_t>(spec_.n) - 1;
  std::map<std::vector<int>, double> frontier;
  frontier[spec_.start_marker ? std::vector<int>{marker_id_} : std::vector<int>{}] = 0.0;

  auto push_context = [&](const std::vector<int>& context, int next) {
    std::vector<int> out = context;
    out.push_back(next);
    if (out.size() > width) out.erase(out.begin(), out.end() - static_cast<std::ptrdiff_t>(width));
    return out;
  };

  for (const EventSet& set : trace.event_sets()) {
    const std::size_t k = set.size();
    check_subset_space(k, cap);
    std::vector<int> ids;
    for (const Event& e : set.events()) ids.push_back(activity_id(e.activity));

    using State = std::pair<std::size_t, std::vector<int>>;
    std::map<State, double> layer;
    for (auto& [context, weight] : frontier) layer[{0, context}] = weight;
    const std::size_t full = (std::size_t{1} << k) - 1;
    for (std::size_t placed = 0; placed < k; ++placed) {
      std::map<State, double> next_layer;
      for (const auto& [state, weight] : layer) {
        for (std::size_t x = 0; x < k; ++x) {
          if (state.first & (std::size_t{1} << x)) continue;
          const double step = weight + ngram_factor(state.second, ids[x]);
          if (step == kNegInf) continue;
          State to{state.first | (std::size_t{1} << x), push_context(state.second, ids[x])};
          auto [it, fresh] = next_layer.try_emplace(std::move(to), step);
          if (!fresh) it->second = log_add(it->second, step);
        }
      }
      if (next_layer.size() > cap) throw EnumerationCapExceeded(cap);
      layer = std::move(next_layer);
    }
    frontier.clear();
    for (auto& [state, weight] : layer)
      if (state.first == full) frontier[state.second] = weight;
    if (frontier.empty()) return kNegInf;
  }
  double total = kNegInf;
  for (const auto& [context, weight] : frontier) total = log_add(total, weight);
  return total;
}

// ---- completion bound -------------------------------------------------------

CompletionBound::CompletionBound(const BehavioralModel& model, const Trace& trace, std::size_t cap)
    : model_(model), cap_(cap) {
  const ModelKind kind = model.spec().kind;
  if (kind != ModelKind::NGram && kind != ModelKind::WeakOrder) return;
  for (const EventSet& set : trace.event_sets()) {
    if (set.size() >= 63 || (std::size_t{1} << set.size()) > cap) return;
    std::vector<int> ids;
    for (const Event& e : set.events()) ids.push_back(model.activity_id(e.activity));
    ids_.push_back(std::move(ids));
  }
  active_ = true;
  if (kind != ModelKind::WeakOrder) return;

  const std::size_t sets = ids_.size();
  cross_.resize(sets);
  in_set_.resize(sets);
  for (std::size_t s = 0; s < sets; ++s) {
    for (int x : ids_[s]) {
      double sum = 0.0;
      for (std::size_t t = 0; t < s; ++t)
        for (int y : ids_[t]) sum += model.pair_log(y, x);
      cross_[s].push_back(sum);
    }
    const std::size_t k = ids_[s].size();
    auto& best = in_set_[s];
    best.assign(std::size_t{1} << k, kNegInf);
    best.back() = 0.0;
    for (std::size_t mask = best.size() - 1; mask-- > 0;) {
      for (std::size_t x = 0; x < k; ++x) {
        if (mask & (std::size_t{1} << x)) continue;
        double step = best[mask | (std::size_t{1} << x)];
        for (std::size_t y = 0; y < k && step != kNegInf; ++y)
          if (mask & (std::size_t{1} << y)) step += model.pair_log(ids_[s][y], ids_[s][x]);
        best[mask] = std::max(best[mask], step);
      }
    }
  }
  tail_.assign(sets + 1, 0.0);
  for (std::size_t s = sets; s-- > 0;) {
    double own = in_set_[s][0];
    for (double c : cross_[s]) own += c;
    tail_[s] = tail_[s + 1] + own;
  }
}

double CompletionBound::operator()(std::size_t set, std::uint64_t mask,
                                   std::span<const int> prefix) const {
  if (!active_ || set >= ids_.size()) return 0.0;
  if (model_.spec().kind == ModelKind::WeakOrder) {
    double sum = in_set_[set][mask] + tail_[set + 1];
    for (std::size_t i = 0; i < cross_[set].size(); ++i)
      if (!(mask & (std::uint64_t{1} << i))) sum += cross_[set][i];
    return sum;
  }
  return ngram_best(set, mask, model_.ngram_context(prefix));
}

double CompletionBound::ngram_best(std::size_t set, std::uint64_t mask,
                                   const std::vector<int>& context) const {
  if (set == ids_.size()) return 0.0;
  const auto& ids = ids_[set];
  const std::uint64_t full = (std::uint64_t{1} << ids.size()) - 1;
  if (mask == full) return ngram_best(set + 1, 0, context);
  auto key = std::make_tuple(set, mask, context);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  // Past the budget any value >= the true best keeps the bound admissible.
  if (memo_.size() >= cap_) return 0.0;

  const std::size_t width = static_cast<std::size_t>(model_.spec().n) - 1;
  double best = kNegInf;
  for (std::size_t x = 0; x < ids.size(); ++x) {
    if (mask & (std::uint64_t{1} << x)) continue;
    // unplaced events with the same activity lead to the same value
    bool repeat = false;
    for (std::size_t y = 0; y < x && !repeat; ++y)
      repeat = !(mask & (std::uint64_t{1} << y)) && ids[y] == ids[x];
    if (repeat) continue;
    const double step = model_.ngram_factor(context, ids[x]);
    if (step == kNegInf) continue;
    std::vector<int> next = context;
    next.push_back(ids[x]);
    if (next.size() > width) next.erase(next.begin(), next.end() - static_cast<std::ptrdiff_t>(width));
    best = std::max(best, step + ngram_best(set, mask | (std::uint64_t{1} << x), next));
  }
  memo_.emplace(std::move(key), best);
  return best;
}

// ---------------------------------------------------------------------------

ScoredDistribution distribution(const BehavioralModel& model, const Trace& trace,
                                std::size_t cap) {
  ScoredDistribution out;
  for (Resolution& r : enumerate_all(trace, cap)) {
    ScoredResolution s;
    s.log_score = model.log_score(r.word);
    s.resolution = std::move(r);
    out.entries.push_back(std::move(s));
  }
  double best = kNegInf;
  for (const auto& e : out.entries) best = std::max(best, e.log_score);
  if (best == kNegInf) {
    out.fallback_used = true;
    const double p = 1.0 / static_cast<double>(out.entries.size());
    for (auto& e : out.entries) e.probability = p;
    return out;
  }
  double sum = 0.0;
  for (auto& e : out.entries) {
    e.probability = std::exp(e.log_score - best);
    sum += e.probability;
  }
  for (auto& e : out.entries) e.probability /= sum;
  return out;
}

}  // namespace porc
