#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "porc/errors.hpp"
#include "porc/log_model.hpp"

namespace porc {

namespace {

struct CivilTime {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;
  int millis = 0;
};

std::optional<std::int64_t> to_millis(const CivilTime& c) {
  using namespace std::chrono;
  const year_month_day ymd{year{c.year}, month{c.month}, day{c.day}};
  if (!ymd.ok() || c.hour > 23 || c.minute > 59 || c.second > 60) return std::nullopt;
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return ((days * 24 + c.hour) * 60 + c.minute) * 60'000 + c.second * 1'000 + c.millis;
}

CivilTime from_millis(std::int64_t millis) {
  using namespace std::chrono;
  const std::int64_t day_ms = 86'400'000;
  std::int64_t days = millis / day_ms;
  std::int64_t rest = millis % day_ms;
  if (rest < 0) {
    rest += day_ms;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  CivilTime c;
  c.year = static_cast<int>(ymd.year());
  c.month = static_cast<unsigned>(ymd.month());
  c.day = static_cast<unsigned>(ymd.day());
  c.hour = static_cast<int>(rest / 3'600'000);
  c.minute = static_cast<int>(rest / 60'000 % 60);
  c.second = static_cast<int>(rest / 1'000 % 60);
  c.millis = static_cast<int>(rest % 1'000);
  return c;
}

// Reads between min_digits and max_digits decimal digits.
bool read_number(std::string_view text, std::size_t& pos, int min_digits, int max_digits,
                 int& value) {
  int digits = 0;
  value = 0;
  while (pos < text.size() && digits < max_digits && text[pos] >= '0' && text[pos] <= '9') {
    value = value * 10 + (text[pos] - '0');
    ++pos;
    ++digits;
  }
  return digits >= min_digits;
}

// Fractional seconds: any number of digits, truncated to milliseconds.
bool read_fraction(std::string_view text, std::size_t& pos, int& millis) {
  int digits = 0;
  millis = 0;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
    if (digits < 3) millis = millis * 10 + (text[pos] - '0');
    ++pos;
    ++digits;
  }
  if (digits == 0) return false;
  for (int d = digits; d < 3; ++d) millis *= 10;
  return true;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format) {
  CivilTime c;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < format.size(); ++i) {
    if (format[i] != '%') {
      if (pos >= text.size() || text[pos] != format[i]) return std::nullopt;
      ++pos;
      continue;
    }
    if (++i >= format.size()) return std::nullopt;
    int v = 0;
    switch (format[i]) {
      case 'Y':
        if (!read_number(text, pos, 4, 4, c.year)) return std::nullopt;
        break;
      case 'm':
        if (!read_number(text, pos, 1, 2, v)) return std::nullopt;
        c.month = static_cast<unsigned>(v);
        break;
      case 'd':
        if (!read_number(text, pos, 1, 2, v)) return std::nullopt;
        c.day = static_cast<unsigned>(v);
        break;
      case 'H':
        if (!read_number(text, pos, 1, 2, c.hour)) return std::nullopt;
        break;
      case 'M':
        if (!read_number(text, pos, 1, 2, c.minute)) return std::nullopt;
        break;
      case 'S':
        if (!read_number(text, pos, 1, 2, c.second)) return std::nullopt;
        break;
      case 'f':
        if (!read_fraction(text, pos, c.millis)) return std::nullopt;
        break;
      case 'T':
        if (!read_number(text, pos, 1, 2, c.hour) || pos >= text.size() || text[pos++] != ':' ||
            !read_number(text, pos, 1, 2, c.minute) || pos >= text.size() ||
            text[pos++] != ':' || !read_number(text, pos, 1, 2, c.second)) {
          return std::nullopt;
        }
        break;
      case '%':
        if (pos >= text.size() || text[pos] != '%') return std::nullopt;
        ++pos;
        break;
      default:
        return std::nullopt;
    }
  }
  if (pos != text.size()) return std::nullopt;
  auto ms = to_millis(c);
  if (!ms) return std::nullopt;
  return Timestamp{*ms};
}

std::string format_timestamp(Timestamp t, std::string_view format) {
  const CivilTime c = from_millis(t.millis);
  std::ostringstream out;
  out << std::setfill('0');
  for (std::size_t i = 0; i < format.size(); ++i) {
    if (format[i] != '%' || i + 1 >= format.size()) {
      out << format[i];
      continue;
    }
    switch (format[++i]) {
      case 'Y': out << std::setw(4) << c.year; break;
      case 'm': out << std::setw(2) << c.month; break;
      case 'd': out << std::setw(2) << c.day; break;
      case 'H': out << std::setw(2) << c.hour; break;
      case 'M': out << std::setw(2) << c.minute; break;
      case 'S': out << std::setw(2) << c.second; break;
      case 'f': out << std::setw(3) << c.millis; break;
      case 'T':
        out << std::setw(2) << c.hour << ':' << std::setw(2) << c.minute << ':' << std::setw(2)
            << c.second;
        break;
      default: out << format[i]; break;
    }
  }
  return out.str();
}

// ---- CSV -------------------------------------------------------------------

namespace {

std::optional<std::vector<std::string>> split_csv_line(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (ch == delimiter) {
      fields.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(was_quoted ? field : trim(field));
  return fields;
}

std::string quote_csv(const std::string& value, char delimiter) {
  if (value.find_first_of(std::string{delimiter, '"', '\n'}) == std::string::npos &&
      value == trim(value)) {
    return value;
  }
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string excerpt(std::string_view line) {
  constexpr std::size_t kMax = 80;
  return std::string(line.substr(0, kMax)) + (line.size() > kMax ? "..." : "");
}

}  // namespace

EventLog read_csv(std::istream& in, const CsvOptions& options) {
  const CsvMapping& m = options.mapping;
  if (m.case_column.empty() || m.activity_column.empty() || m.timestamp_column.empty() ||
      options.timestamp_format.empty()) {
    throw Error("CSV column mapping and timestamp format are required");
  }
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, options.delimiter);
    if (!fields) throw MalformedRow(line_no, excerpt(line));
    header = std::move(*fields);
    break;
  }
  if (header.empty()) throw EmptyLog();

  auto column = [&](const std::string& name) -> std::ptrdiff_t {
    if (name.empty()) return -1;
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw MalformedRow(line_no, "header lacks column '" + name + "': " + excerpt(line));
    }
    return it - header.begin();
  };
  const auto case_col = column(m.case_column);
  const auto act_col = column(m.activity_column);
  const auto ts_col = column(m.timestamp_column);
  const auto id_col = column(m.id_column);

  std::vector<Event> events;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, options.delimiter);
    if (!fields || fields->size() != header.size()) throw MalformedRow(line_no, excerpt(line));
    Event e;
    e.case_id = (*fields)[case_col];
    e.activity = (*fields)[act_col];
    if (e.case_id.empty() || e.activity.empty()) throw MalformedRow(line_no, excerpt(line));
    auto ts = parse_timestamp((*fields)[ts_col], options.timestamp_format);
    if (!ts) throw UnparseableTimestamp(line_no, (*fields)[ts_col]);
    e.timestamp = *ts;
    e.id = id_col >= 0 ? (*fields)[id_col] : "r" + std::to_string(line_no);
    if (e.id.empty()) throw MalformedRow(line_no, excerpt(line));
    events.push_back(std::move(e));
  }
  return make_log(std::move(events));
}

EventLog parse_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError(path);
  return read_csv(in, options);
}

void write_csv(const EventLog& log, std::ostream& out, const CsvOptions& options) {
  const CsvMapping& m = options.mapping;
  const char d = options.delimiter;
  const bool with_id = !m.id_column.empty();
  out << quote_csv(m.case_column, d) << d << quote_csv(m.activity_column, d) << d
      << quote_csv(m.timestamp_column, d);
  if (with_id) out << d << quote_csv(m.id_column, d);
  out << '\n';
  for (const Trace& t : log.traces()) {
    for (const Event& e : t.events()) {
      out << quote_csv(e.case_id, d) << d << quote_csv(e.activity, d) << d
          << quote_csv(format_timestamp(e.timestamp, options.timestamp_format), d);
      if (with_id) out << d << quote_csv(e.id, d);
      out << '\n';
    }
  }
}

// ---- XES -------------------------------------------------------------------

namespace {

namespace pt = boost::property_tree;

// ISO-8601 as used by XES: 2011-10-01T00:38:44.546+02:00, 'Z' or no offset.
std::optional<Timestamp> parse_iso8601(std::string_view text) {
  CivilTime c;
  std::size_t pos = 0;
  int v = 0;
  auto expect = [&](char ch) { return pos < text.size() && text[pos++] == ch; };
  if (!read_number(text, pos, 4, 4, c.year) || !expect('-')) return std::nullopt;
  if (!read_number(text, pos, 2, 2, v) || !expect('-')) return std::nullopt;
  c.month = static_cast<unsigned>(v);
  if (!read_number(text, pos, 2, 2, v)) return std::nullopt;
  c.day = static_cast<unsigned>(v);
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
    ++pos;
    if (!read_number(text, pos, 2, 2, c.hour) || !expect(':') ||
        !read_number(text, pos, 2, 2, c.minute)) {
      return std::nullopt;
    }
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      if (!read_number(text, pos, 2, 2, c.second)) return std::nullopt;
      if (pos < text.size() && text[pos] == '.') {
        ++pos;
        if (!read_fraction(text, pos, c.millis)) return std::nullopt;
      }
    }
  }
  std::int64_t offset_ms = 0;
  if (pos < text.size()) {
    const char sign = text[pos++];
    if (sign == 'Z') {
      // UTC
    } else if (sign == '+' || sign == '-') {
      int oh = 0;
      int om = 0;
      if (!read_number(text, pos, 2, 2, oh)) return std::nullopt;
      if (pos < text.size() && text[pos] == ':') ++pos;
      if (!read_number(text, pos, 2, 2, om)) return std::nullopt;
      offset_ms = (oh * 60 + om) * 60'000LL * (sign == '+' ? 1 : -1);
    } else {
      return std::nullopt;
    }
  }
  if (pos != text.size()) return std::nullopt;
  auto ms = to_millis(c);
  if (!ms) return std::nullopt;
  return Timestamp{*ms - offset_ms};
}

bool is_attribute_element(const std::string& tag) {
  return tag == "string" || tag == "date" || tag == "int" || tag == "float" ||
         tag == "boolean" || tag == "id" || tag == "list" || tag == "container";
}

}  // namespace

EventLog read_xes(std::istream& in, XesReadStats* stats) {
  pt::ptree doc;
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw XmlError(e.line(), e.message());
  }
  auto root = doc.get_child_optional("log");
  if (!root) throw XmlError(0, "document has no <log> root element");

  XesReadStats local;
  std::vector<Event> events;
  std::size_t event_index = 0;
  std::size_t trace_index = 0;
  for (const auto& [tag, trace] : *root) {
    if (tag != "trace") continue;
    std::string case_id;
    for (const auto& [ttag, node] : trace) {
      if (!is_attribute_element(ttag)) continue;
      if (node.get<std::string>("<xmlattr>.key", "") == "concept:name") {
        case_id = node.get<std::string>("<xmlattr>.value", "");
      } else {
        ++local.ignored_attributes;
      }
    }
    if (case_id.empty()) case_id = "trace" + std::to_string(trace_index);
    std::size_t position = 0;
    for (const auto& [etag, event] : trace) {
      if (etag != "event") continue;
      Event e;
      e.case_id = case_id;
      std::optional<std::string> stamp;
      for (const auto& [atag, attr] : event) {
        if (!is_attribute_element(atag)) continue;
        const std::string key = attr.get<std::string>("<xmlattr>.key", "");
        const std::string value = attr.get<std::string>("<xmlattr>.value", "");
        if (key == "concept:name") {
          e.activity = value;
        } else if (key == "time:timestamp") {
          stamp = value;
        } else if (key == "identity:id") {
          e.id = value;
        } else {
          ++local.ignored_attributes;
        }
      }
      if (e.activity.empty()) throw MissingAttribute(event_index, "concept:name");
      if (!stamp) throw MissingAttribute(event_index, "time:timestamp");
      auto ts = parse_iso8601(*stamp);
      if (!ts) throw UnparseableTimestamp(event_index, *stamp);
      e.timestamp = *ts;
      if (e.id.empty()) e.id = case_id + ":" + std::to_string(position);
      events.push_back(std::move(e));
      ++event_index;
      ++position;
    }
    ++trace_index;
  }
  if (stats) *stats = local;
  return make_log(std::move(events));
}

EventLog parse_xes(const std::string& path, XesReadStats* stats) {
  std::ifstream in(path);
  if (!in) throw IoError(path);
  return read_xes(in, stats);
}

void write_xes(const EventLog& log, std::ostream& out) {
  pt::ptree doc;
  pt::ptree& root = doc.add("log", "");
  root.put("<xmlattr>.xes.version", "1.0");
  auto add_attr = [](pt::ptree& parent, const char* type, const std::string& key,
                     const std::string& value) {
    pt::ptree& a = parent.add(type, "");
    a.put("<xmlattr>.key", key);
    a.put("<xmlattr>.value", value);
  };
  for (const Trace& t : log.traces()) {
    pt::ptree& tn = root.add("trace", "");
    add_attr(tn, "string", "concept:name", t.case_id());
    for (const Event& e : t.events()) {
      pt::ptree& en = tn.add("event", "");
      add_attr(en, "string", "concept:name", e.activity);
      add_attr(en, "date", "time:timestamp", format_timestamp(e.timestamp, "%Y-%m-%dT%T.%fZ"));
      add_attr(en, "string", "identity:id", e.id);
    }
  }
  pt::write_xml(out, doc, pt::xml_writer_make_settings<std::string>(' ', 2));
}

}  // namespace porc
