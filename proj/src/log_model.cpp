#include "porc/log_model.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>

#include "porc/errors.hpp"

namespace porc {

namespace {

constexpr std::int64_t kMillisPerDay = 86'400'000;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool canonical_less(const Event& a, const Event& b) {
  if (a.activity != b.activity) return a.activity < b.activity;
  return a.id < b.id;
}

}  // namespace

std::int64_t unit_millis(Precision unit) {
  switch (unit) {
    case Precision::Millisecond: return 1;
    case Precision::Second: return 1'000;
    case Precision::Minute: return 60'000;
    case Precision::Hour: return 3'600'000;
    case Precision::Day: return kMillisPerDay;
  }
  return 1;
}

std::string_view to_string(Precision unit) {
  switch (unit) {
    case Precision::Millisecond: return "ms";
    case Precision::Second: return "s";
    case Precision::Minute: return "min";
    case Precision::Hour: return "h";
    case Precision::Day: return "d";
  }
  return "ms";
}

std::optional<Precision> parse_precision(std::string_view text) {
  static const std::map<std::string_view, Precision> names = {
      {"ms", Precision::Millisecond},   {"millisecond", Precision::Millisecond},
      {"s", Precision::Second},         {"second", Precision::Second},
      {"min", Precision::Minute},       {"minute", Precision::Minute},
      {"h", Precision::Hour},           {"hour", Precision::Hour},
      {"d", Precision::Day},            {"day", Precision::Day},
  };
  auto it = names.find(text);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

Timestamp truncate(Timestamp t, Precision unit) {
  const std::int64_t u = unit_millis(unit);
  return Timestamp{floor_div(t.millis, u) * u};
}

Precision finest_component(Timestamp t) {
  for (Precision p : {Precision::Day, Precision::Hour, Precision::Minute, Precision::Second}) {
    if (truncate(t, p) == t) return p;
  }
  return Precision::Millisecond;
}

// ---------------------------------------------------------------------------

EventSet::EventSet(std::vector<Event> events) : events_(std::move(events)) {
  if (events_.empty()) throw Error("event set must not be empty");
  std::sort(events_.begin(), events_.end(), canonical_less);
  for (const Event& e : events_) {
    if (e.timestamp != events_.front().timestamp) {
      throw Error("events of one event set must share their timestamp");
    }
  }
}

Trace::Trace(std::string case_id, std::vector<EventSet> event_sets)
    : case_id_(std::move(case_id)), event_sets_(std::move(event_sets)) {
  for (std::size_t i = 0; i < event_sets_.size(); ++i) {
    if (i > 0 && !(event_sets_[i - 1].timestamp() < event_sets_[i].timestamp())) {
      throw Error("event sets of trace '" + case_id_ + "' are not strictly ordered");
    }
    event_count_ += event_sets_[i].size();
  }
}

bool Trace::certain() const {
  return std::all_of(event_sets_.begin(), event_sets_.end(),
                     [](const EventSet& s) { return !s.uncertain(); });
}

std::vector<Event> Trace::events() const {
  std::vector<Event> out;
  out.reserve(event_count_);
  for (const EventSet& s : event_sets_) {
    out.insert(out.end(), s.events().begin(), s.events().end());
  }
  return out;
}

Word Trace::canonical_word() const {
  Word w;
  w.reserve(event_count_);
  for (const EventSet& s : event_sets_) {
    for (const Event& e : s.events()) w.push_back(e.activity);
  }
  return w;
}

Trace group_events(std::string case_id, std::vector<Event> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
  std::vector<EventSet> sets;
  std::size_t begin = 0;
  while (begin < events.size()) {
    std::size_t end = begin + 1;
    while (end < events.size() && events[end].timestamp == events[begin].timestamp) ++end;
    sets.emplace_back(std::vector<Event>(std::make_move_iterator(events.begin() + begin),
                                         std::make_move_iterator(events.begin() + end)));
    begin = end;
  }
  return Trace(std::move(case_id), std::move(sets));
}

// ---------------------------------------------------------------------------

EventLog::EventLog(std::vector<Trace> traces, Precision precision)
    : traces_(std::move(traces)), precision_(precision) {
  std::unordered_map<std::string, std::size_t> ids;
  for (const Trace& t : traces_) {
    for (const EventSet& s : t.event_sets()) {
      for (const Event& e : s.events()) {
        if (e.activity.empty()) throw Error("event '" + e.id + "' has an empty activity");
        if (!ids.emplace(e.id, 0).second) throw Error("duplicate event id '" + e.id + "'");
        universe_.insert(e.activity);
      }
    }
  }
}

std::size_t EventLog::certain_count() const {
  return static_cast<std::size_t>(
      std::count_if(traces_.begin(), traces_.end(), [](const Trace& t) { return t.certain(); }));
}

double EventLog::uncertain_ratio() const {
  if (traces_.empty()) return 0.0;
  return static_cast<double>(uncertain_count()) / static_cast<double>(traces_.size());
}

const Trace* EventLog::find(std::string_view case_id) const {
  for (const Trace& t : traces_) {
    if (t.case_id() == case_id) return &t;
  }
  return nullptr;
}

EventLog make_log(std::vector<Event> events) {
  Precision precision = Precision::Day;
  for (const Event& e : events) precision = std::min(precision, finest_component(e.timestamp));
  return make_log(std::move(events), precision);
}

EventLog make_log(std::vector<Event> events, Precision precision) {
  if (events.empty()) throw EmptyLog();
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Event>> by_case;
  for (Event& e : events) {
    e.timestamp = truncate(e.timestamp, precision);
    auto [it, inserted] = by_case.try_emplace(e.case_id);
    if (inserted) order.push_back(e.case_id);
    it->second.push_back(std::move(e));
  }
  std::vector<Trace> traces;
  traces.reserve(order.size());
  for (const std::string& c : order) traces.push_back(group_events(c, std::move(by_case[c])));
  return EventLog(std::move(traces), precision);
}

// ---------------------------------------------------------------------------

EventLog coarsen(const EventLog& log, Precision unit) {
  if (unit < log.precision()) throw UnitFinerThanPrecision();
  std::vector<Trace> traces;
  traces.reserve(log.size());
  for (const Trace& t : log.traces()) {
    std::vector<Event> events = t.events();
    for (Event& e : events) e.timestamp = truncate(e.timestamp, unit);
    traces.push_back(group_events(t.case_id(), std::move(events)));
  }
  return EventLog(std::move(traces), unit);
}

std::uint64_t resolution_count(const Trace& trace) {
  std::uint64_t count = 1;
  for (const EventSet& s : trace.event_sets()) {
    for (std::uint64_t k = 2; k <= s.size(); ++k) {
      if (count > std::numeric_limits<std::uint64_t>::max() / k) throw CountOverflow();
      count *= k;
    }
  }
  return count;
}

}  // namespace porc
