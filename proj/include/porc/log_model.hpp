#ifndef PORC_LOG_MODEL_HPP
#define PORC_LOG_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace porc {

/// Activity sequence, e.g. the labels of one resolution of a trace.
using Word = std::vector<std::string>;

/// Timestamp granularity, finest first.
enum class Precision { Millisecond = 0, Second, Minute, Hour, Day };

std::int64_t unit_millis(Precision unit);
std::string_view to_string(Precision unit);
/// Accepts "ms", "s", "min", "h", "d" and the spelled-out singular names.
std::optional<Precision> parse_precision(std::string_view text);

/// Integer instant in milliseconds since the Unix epoch (UTC).
struct Timestamp {
  std::int64_t millis = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

Timestamp truncate(Timestamp t, Precision unit);
/// Coarsest unit at which `t` carries no information below it.
Precision finest_component(Timestamp t);

struct Event {
  std::string id;
  std::string activity;
  Timestamp timestamp;
  std::string case_id;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Events of one trace that share a timestamp. Members are kept in canonical
/// order (activity, then id).
class EventSet {
 public:
  explicit EventSet(std::vector<Event> events);

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool uncertain() const { return events_.size() > 1; }
  Timestamp timestamp() const { return events_.front().timestamp; }

  friend bool operator==(const EventSet&, const EventSet&) = default;

 private:
  std::vector<Event> events_;
};

class Trace {
 public:
  Trace(std::string case_id, std::vector<EventSet> event_sets);

  const std::string& case_id() const { return case_id_; }
  const std::vector<EventSet>& event_sets() const { return event_sets_; }
  std::size_t event_count() const { return event_count_; }
  bool certain() const;

  /// All events, event sets in order and canonical order inside each set.
  std::vector<Event> events() const;
  /// Activity labels in canonical order; the word of a certain trace.
  Word canonical_word() const;

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::string case_id_;
  std::vector<EventSet> event_sets_;
  std::size_t event_count_ = 0;
};

/// Groups the events of one case into event sets by equal timestamp.
Trace group_events(std::string case_id, std::vector<Event> events);

class EventLog {
 public:
  EventLog(std::vector<Trace> traces, Precision precision);

  const std::vector<Trace>& traces() const { return traces_; }
  const std::set<std::string>& activity_universe() const { return universe_; }
  Precision precision() const { return precision_; }

  std::size_t size() const { return traces_.size(); }
  std::size_t certain_count() const;
  std::size_t uncertain_count() const { return size() - certain_count(); }
  /// Fraction of traces with at least one uncertain event set.
  double uncertain_ratio() const;
  const Trace* find(std::string_view case_id) const;

  friend bool operator==(const EventLog&, const EventLog&) = default;

 private:
  std::vector<Trace> traces_;
  std::set<std::string> universe_;
  Precision precision_;
};

/// Builds a log from flat events. Cases keep their first-appearance order and
/// the precision is inferred from the finest timestamp component present.
EventLog make_log(std::vector<Event> events);
EventLog make_log(std::vector<Event> events, Precision precision);

// ---- timestamps ------------------------------------------------------------

/// Parses `text` against a strftime-like format (%Y %m %d %H %M %S %f %T %%).
std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format);
std::string format_timestamp(Timestamp t, std::string_view format);

// ---- CSV -------------------------------------------------------------------

struct CsvMapping {
  std::string case_column;
  std::string activity_column;
  std::string timestamp_column;
  std::string id_column;  // optional; ids are generated from row numbers when empty
};

struct CsvOptions {
  CsvMapping mapping;
  std::string timestamp_format;
  char delimiter = ',';
};

EventLog parse_csv(const std::string& path, const CsvOptions& options);
EventLog read_csv(std::istream& in, const CsvOptions& options);
/// Writes one row per event, traces in order and canonical order inside sets.
void write_csv(const EventLog& log, std::ostream& out, const CsvOptions& options);

// ---- XES -------------------------------------------------------------------

struct XesReadStats {
  std::size_t ignored_attributes = 0;
};

EventLog parse_xes(const std::string& path, XesReadStats* stats = nullptr);
EventLog read_xes(std::istream& in, XesReadStats* stats = nullptr);
void write_xes(const EventLog& log, std::ostream& out);

// ---- uncertainty structure --------------------------------------------------

/// Truncates every timestamp to `unit` and regroups each trace.
EventLog coarsen(const EventLog& log, Precision unit);

/// Product of factorials of the event-set sizes; throws CountOverflow.
std::uint64_t resolution_count(const Trace& trace);

}  // namespace porc

#endif  // PORC_LOG_MODEL_HPP
