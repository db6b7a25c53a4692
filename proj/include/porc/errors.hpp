#ifndef PORC_ERRORS_HPP
#define PORC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace porc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  explicit IoError(const std::string& path) : Error("cannot open '" + path + "'"), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// ---- log ingestion -------------------------------------------------------

class MalformedRow : public Error {
 public:
  MalformedRow(std::size_t line, std::string excerpt)
      : Error("malformed row at line " + std::to_string(line) + ": " + excerpt),
        line_(line),
        excerpt_(std::move(excerpt)) {}
  std::size_t line() const { return line_; }
  const std::string& excerpt() const { return excerpt_; }

 private:
  std::size_t line_;
  std::string excerpt_;
};

class UnparseableTimestamp : public Error {
 public:
  UnparseableTimestamp(std::size_t line, const std::string& text)
      : Error("unparseable timestamp '" + text + "' at line " + std::to_string(line)),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyLog : public Error {
 public:
  EmptyLog() : Error("event log contains no events") {}
};

class XmlError : public Error {
 public:
  XmlError(std::size_t line, const std::string& what)
      : Error("XML error at line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MissingAttribute : public Error {
 public:
  MissingAttribute(std::size_t event_index, std::string attribute)
      : Error("event " + std::to_string(event_index) + " lacks attribute '" + attribute + "'"),
        event_index_(event_index),
        attribute_(std::move(attribute)) {}
  std::size_t event_index() const { return event_index_; }
  const std::string& attribute() const { return attribute_; }

 private:
  std::size_t event_index_;
  std::string attribute_;
};

class UnitFinerThanPrecision : public Error {
 public:
  UnitFinerThanPrecision() : Error("coarsening unit is finer than the log precision") {}
};

class CountOverflow : public Error {
 public:
  CountOverflow() : Error("resolution count exceeds the representable range") {}
};

// ---- process model -------------------------------------------------------

class DanglingArc : public Error {
 public:
  explicit DanglingArc(std::string arc)
      : Error("arc '" + arc + "' references an unknown node"), arc_(std::move(arc)) {}
  const std::string& arc() const { return arc_; }

 private:
  std::string arc_;
};

class NoInitialMarking : public Error {
 public:
  NoInitialMarking() : Error("net has no initial marking") {}
};

class NoFinalMarking : public Error {
 public:
  NoFinalMarking() : Error("net has no final marking") {}
};

class NotEnabled : public Error {
 public:
  explicit NotEnabled(std::string transition)
      : Error("transition '" + transition + "' is not enabled"),
        transition_(std::move(transition)) {}
  const std::string& transition() const { return transition_; }

 private:
  std::string transition_;
};

class SearchBudgetExceeded : public Error {
 public:
  explicit SearchBudgetExceeded(std::size_t states)
      : Error("search explored more than " + std::to_string(states) + " states"),
        states_(states) {}
  std::size_t states() const { return states_; }

 private:
  std::size_t states_;
};

class NoAcceptedWord : public Error {
 public:
  NoAcceptedWord() : Error("the final marking is unreachable from the initial marking") {}
};

// ---- resolution / estimation --------------------------------------------

class EnumerationCapExceeded : public Error {
 public:
  explicit EnumerationCapExceeded(std::size_t cap)
      : Error("resolution enumeration exceeds the cap of " + std::to_string(cap)), cap_(cap) {}
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

class SampleTooSmall : public Error {
 public:
  SampleTooSmall(std::size_t size, std::size_t required)
      : Error("sample of " + std::to_string(size) + " is below the required " +
              std::to_string(required)) {}
};

class NoUncertainPair : public Error {
 public:
  NoUncertainPair(const std::string& x, const std::string& y)
      : Error("no trace holds order uncertainty between '" + x + "' and '" + y + "'") {}
};

class MissingGoldOrder : public Error {
 public:
  explicit MissingGoldOrder(std::string case_id)
      : Error("no gold order for case '" + case_id + "'"), case_id_(std::move(case_id)) {}
  const std::string& case_id() const { return case_id_; }

 private:
  std::string case_id_;
};

}  // namespace porc

#endif  // PORC_ERRORS_HPP
