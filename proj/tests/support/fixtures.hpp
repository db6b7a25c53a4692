#ifndef PORC_TESTS_FIXTURES_HPP
#define PORC_TESTS_FIXTURES_HPP

#include <string>
#include <utility>
#include <vector>

#include "porc/log_model.hpp"
#include "porc/process_model.hpp"

namespace fixtures {

inline std::string data(const std::string& name) { return std::string(PORC_TEST_DATA) + "/" + name; }

inline porc::CsvOptions example_csv_options() {
  return porc::CsvOptions{{"case", "activity", "timestamp", "id"}, "%Y-%m-%dT%H:%M:%S", ','};
}

inline porc::EventLog example_log() { return porc::parse_csv(data("example_log.csv"), example_csv_options()); }

inline porc::PetriNet example_net() { return porc::parse_pnml(data("example_net.pnml")); }

/// Activity sets of one trace; each inner list shares one timestamp.
using Shape = std::vector<std::vector<std::string>>;

/// Appends the events of one trace to `events`; set i is stamped at minute i.
inline void add_trace(std::vector<porc::Event>& events, const std::string& case_id,
                      const Shape& shape) {
  std::size_t serial = 0;
  for (std::size_t i = 0; i < shape.size(); ++i)
    for (const auto& activity : shape[i])
      events.push_back(porc::Event{case_id + "." + std::to_string(serial++), activity,
                                   porc::Timestamp{static_cast<std::int64_t>(i + 1) * 60'000},
                                   case_id});
}

/// Log of the given traces, cases named c0, c1, ... in order.
inline porc::EventLog log_of(const std::vector<Shape>& traces) {
  std::vector<porc::Event> events;
  for (std::size_t i = 0; i < traces.size(); ++i) add_trace(events, "c" + std::to_string(i), traces[i]);
  return porc::make_log(std::move(events), porc::Precision::Minute);
}

/// `count` copies of one trace shape.
inline std::vector<Shape> repeat(const Shape& shape, std::size_t count) {
  return std::vector<Shape>(count, shape);
}

inline std::vector<Shape> concat(std::vector<Shape> a, const std::vector<Shape>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

/// p0 -A-> p1.
inline porc::PetriNet single_transition_net() {
  return porc::PetriNet({"p0", "p1"}, {{"t", "A"}},
                        {{"a0", "p0", "t", 1}, {"a1", "t", "p1", 1}}, {{"p0", 1}}, {{"p1", 1}});
}

/// Strict sequence over `labels`.
inline porc::PetriNet sequence_net(const std::vector<std::string>& labels) {
  std::vector<std::string> places;
  std::vector<porc::PetriNet::TransitionSpec> transitions;
  std::vector<porc::PetriNet::ArcSpec> arcs;
  for (std::size_t i = 0; i <= labels.size(); ++i) places.push_back("p" + std::to_string(i));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string t = "t" + std::to_string(i);
    transitions.push_back({t, labels[i]});
    arcs.push_back({"in" + std::to_string(i), places[i], t, 1});
    arcs.push_back({"out" + std::to_string(i), t, places[i + 1], 1});
  }
  return porc::PetriNet(places, transitions, arcs, {{places.front(), 1}}, {{places.back(), 1}});
}

/// Every label exactly once, in any order.
inline porc::PetriNet parallel_net(const std::vector<std::string>& labels) {
  std::vector<std::string> places;
  std::vector<porc::PetriNet::TransitionSpec> transitions;
  std::vector<porc::PetriNet::ArcSpec> arcs;
  std::vector<std::pair<std::string, std::uint32_t>> initial, final_marking;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string in = "in" + std::to_string(i), out = "out" + std::to_string(i);
    const std::string t = "t" + std::to_string(i);
    places.push_back(in);
    places.push_back(out);
    transitions.push_back({t, labels[i]});
    arcs.push_back({"a" + in, in, t, 1});
    arcs.push_back({"a" + out, t, out, 1});
    initial.emplace_back(in, 1);
    final_marking.emplace_back(out, 1);
  }
  return porc::PetriNet(places, transitions, arcs, initial, final_marking);
}

}  // namespace fixtures

#endif  // PORC_TESTS_FIXTURES_HPP
