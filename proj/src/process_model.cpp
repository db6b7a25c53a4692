#include "porc/process_model.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "porc/errors.hpp"

namespace porc {

std::uint64_t Marking::total() const {
  std::uint64_t sum = 0;
  for (auto t : tokens_) sum += t;
  return sum;
}

std::size_t MarkingHash::operator()(const Marking& m) const {
  std::size_t h = 1469598103934665603ULL;
  for (auto t : m.tokens()) {
    h ^= t + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

PetriNet::PetriNet(std::vector<std::string> places, std::vector<TransitionSpec> transitions,
                   std::vector<ArcSpec> arcs,
                   std::vector<std::pair<std::string, std::uint32_t>> initial_marking,
                   std::vector<std::pair<std::string, std::uint32_t>> final_marking)
    : places_(std::move(places)) {
  std::unordered_map<std::string, PlaceIndex> place_of;
  for (PlaceIndex p = 0; p < places_.size(); ++p) {
    if (!place_of.emplace(places_[p], p).second) {
      throw Error("duplicate place id '" + places_[p] + "'");
    }
  }
  std::unordered_map<std::string, TransitionIndex> transition_of;
  for (auto& spec : transitions) {
    if (place_of.count(spec.id) || !transition_of.emplace(spec.id, transitions_.size()).second) {
      throw Error("duplicate node id '" + spec.id + "'");
    }
    transitions_.push_back(Transition{std::move(spec.id), std::move(spec.label), {}, {}});
  }
  for (const ArcSpec& arc : arcs) {
    const std::string name = arc.id.empty() ? arc.source + "->" + arc.target : arc.id;
    if (arc.weight == 0) throw Error("arc '" + name + "' has zero weight");
    auto ps = place_of.find(arc.source);
    auto pt = place_of.find(arc.target);
    auto ts = transition_of.find(arc.source);
    auto tt = transition_of.find(arc.target);
    if (ps != place_of.end() && tt != transition_of.end()) {
      transitions_[tt->second].inputs.push_back(Arc{ps->second, arc.weight});
    } else if (ts != transition_of.end() && pt != place_of.end()) {
      transitions_[ts->second].outputs.push_back(Arc{pt->second, arc.weight});
    } else {
      throw DanglingArc(name);
    }
  }
  auto to_marking = [&](const auto& spec) {
    Marking m(places_.size());
    for (const auto& [place, tokens] : spec) {
      auto it = place_of.find(place);
      if (it == place_of.end()) throw Error("marking references unknown place '" + place + "'");
      m[it->second] += tokens;
    }
    return m;
  };
  initial_ = to_marking(initial_marking);
  final_ = to_marking(final_marking);
  if (initial_.empty()) throw NoInitialMarking();
  if (final_.empty()) throw NoFinalMarking();
}

std::optional<PlaceIndex> PetriNet::place_index(std::string_view id) const {
  auto it = std::find(places_.begin(), places_.end(), id);
  if (it == places_.end()) return std::nullopt;
  return static_cast<PlaceIndex>(it - places_.begin());
}

std::optional<TransitionIndex> PetriNet::transition_index(std::string_view id) const {
  for (TransitionIndex t = 0; t < transitions_.size(); ++t) {
    if (transitions_[t].id == id) return t;
  }
  return std::nullopt;
}

std::vector<std::string> PetriNet::labels() const {
  std::set<std::string> out;
  for (const Transition& t : transitions_) {
    if (!t.silent()) out.insert(t.label);
  }
  return {out.begin(), out.end()};
}

// ---- PNML ------------------------------------------------------------------

namespace {

namespace pt = boost::property_tree;

std::uint32_t parse_count(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (v < 0 || used != text.size()) throw std::invalid_argument(text);
    return static_cast<std::uint32_t>(v);
  } catch (const std::logic_error&) {
    throw Error("invalid token count '" + text + "' in " + what);
  }
}

std::string trimmed(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct PnmlContent {
  std::vector<std::string> places;
  std::vector<PetriNet::TransitionSpec> transitions;
  std::vector<PetriNet::ArcSpec> arcs;
  std::vector<std::pair<std::string, std::uint32_t>> initial;
};

void collect(const pt::ptree& container, PnmlContent& out) {
  for (const auto& [tag, node] : container) {
    if (tag == "page") {
      collect(node, out);
    } else if (tag == "place") {
      const std::string id = node.get<std::string>("<xmlattr>.id", "");
      if (id.empty()) throw Error("place without id");
      out.places.push_back(id);
      if (auto init = node.get_optional<std::string>("initialMarking.text")) {
        const std::uint32_t tokens = parse_count(trimmed(*init), "place '" + id + "'");
        if (tokens > 0) out.initial.emplace_back(id, tokens);
      }
    } else if (tag == "transition") {
      PetriNet::TransitionSpec spec;
      spec.id = node.get<std::string>("<xmlattr>.id", "");
      if (spec.id.empty()) throw Error("transition without id");
      spec.label = trimmed(node.get<std::string>("name.text", ""));
      for (const auto& [ttag, tool] : node) {
        if (ttag == "toolspecific" &&
            tool.get<std::string>("<xmlattr>.activity", "") == "$invisible$") {
          spec.label.clear();
        }
      }
      out.transitions.push_back(std::move(spec));
    } else if (tag == "arc") {
      PetriNet::ArcSpec arc;
      arc.id = node.get<std::string>("<xmlattr>.id", "");
      arc.source = node.get<std::string>("<xmlattr>.source", "");
      arc.target = node.get<std::string>("<xmlattr>.target", "");
      if (auto w = node.get_optional<std::string>("inscription.text")) {
        arc.weight = parse_count(trimmed(*w), "arc '" + arc.id + "'");
      }
      out.arcs.push_back(std::move(arc));
    }
  }
}

}  // namespace

PetriNet read_pnml(std::istream& in, const PnmlOptions& options) {
  pt::ptree doc;
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw XmlError(e.line(), e.message());
  }
  auto net = doc.get_child_optional("pnml.net");
  if (!net) throw XmlError(0, "document has no <pnml><net> element");

  PnmlContent content;
  collect(*net, content);

  std::vector<std::pair<std::string, std::uint32_t>> final_marking;
  if (!options.final_place.empty()) {
    final_marking.emplace_back(options.final_place, 1);
  } else if (auto finals = net->get_child_optional("finalmarkings")) {
    for (const auto& [tag, marking] : *finals) {
      if (tag != "marking") continue;
      for (const auto& [ptag, place] : marking) {
        if (ptag != "place") continue;
        const std::string idref = place.get<std::string>("<xmlattr>.idref", "");
        const std::uint32_t tokens =
            parse_count(trimmed(place.get<std::string>("text", "1")), "final marking");
        if (tokens > 0) final_marking.emplace_back(idref, tokens);
      }
      break;  // first marking only
    }
  }
  if (content.initial.empty()) throw NoInitialMarking();
  if (final_marking.empty()) throw NoFinalMarking();
  return PetriNet(std::move(content.places), std::move(content.transitions),
                  std::move(content.arcs), std::move(content.initial), std::move(final_marking));
}

PetriNet parse_pnml(const std::string& path, const PnmlOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError(path);
  return read_pnml(in, options);
}

void write_pnml(const PetriNet& net, std::ostream& out) {
  pt::ptree doc;
  pt::ptree& n = doc.add("pnml.net", "");
  n.put("<xmlattr>.id", "net");
  n.put("<xmlattr>.type", "http://www.pnml.org/version-2009/grammar/pnmlcoremodel");
  pt::ptree& page = n.add("page", "");
  page.put("<xmlattr>.id", "page0");
  for (PlaceIndex p = 0; p < net.places().size(); ++p) {
    pt::ptree& pl = page.add("place", "");
    pl.put("<xmlattr>.id", net.places()[p]);
    if (net.initial_marking()[p] > 0) {
      pl.put("initialMarking.text", net.initial_marking()[p]);
    }
  }
  std::size_t arc_no = 0;
  auto add_arc = [&](const std::string& src, const std::string& dst, std::uint32_t w) {
    pt::ptree& a = page.add("arc", "");
    a.put("<xmlattr>.id", "arc" + std::to_string(arc_no++));
    a.put("<xmlattr>.source", src);
    a.put("<xmlattr>.target", dst);
    if (w != 1) a.put("inscription.text", w);
  };
  for (const Transition& t : net.transitions()) {
    pt::ptree& tn = page.add("transition", "");
    tn.put("<xmlattr>.id", t.id);
    if (t.silent()) {
      pt::ptree& tool = tn.add("toolspecific", "");
      tool.put("<xmlattr>.tool", "ProM");
      tool.put("<xmlattr>.activity", "$invisible$");
    } else {
      tn.put("name.text", t.label);
    }
  }
  for (const Transition& t : net.transitions()) {
    for (const Arc& a : t.inputs) add_arc(net.places()[a.place], t.id, a.weight);
    for (const Arc& a : t.outputs) add_arc(t.id, net.places()[a.place], a.weight);
  }
  pt::ptree& marking = n.add("finalmarkings.marking", "");
  for (PlaceIndex p = 0; p < net.places().size(); ++p) {
    if (net.final_marking()[p] == 0) continue;
    pt::ptree& pl = marking.add("place", "");
    pl.put("<xmlattr>.idref", net.places()[p]);
    pl.put("text", net.final_marking()[p]);
  }
  pt::write_xml(out, doc, pt::xml_writer_make_settings<std::string>(' ', 2));
}

// ---- semantics -------------------------------------------------------------

std::size_t default_state_cap() {
  if (const char* env = std::getenv("PORC_STATE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1'000'000;
}

bool is_enabled(const PetriNet& net, const Marking& m, TransitionIndex t) {
  for (const Arc& a : net.transitions()[t].inputs) {
    if (m[a.place] < a.weight) return false;
  }
  return true;
}

std::vector<TransitionIndex> enabled(const PetriNet& net, const Marking& m) {
  std::vector<TransitionIndex> out;
  for (TransitionIndex t = 0; t < net.transitions().size(); ++t) {
    if (is_enabled(net, m, t)) out.push_back(t);
  }
  return out;
}

Marking fire(const PetriNet& net, const Marking& m, TransitionIndex t) {
  if (t >= net.transitions().size() || !is_enabled(net, m, t)) {
    throw NotEnabled(t < net.transitions().size() ? net.transitions()[t].id : std::to_string(t));
  }
  Marking next = m;
  const Transition& tr = net.transitions()[t];
  for (const Arc& a : tr.inputs) next[a.place] -= a.weight;
  for (const Arc& a : tr.outputs) next[a.place] += a.weight;
  return next;
}

namespace {

struct ReplayState {
  std::size_t position;
  Marking marking;
  friend bool operator==(const ReplayState&, const ReplayState&) = default;
};

struct ReplayStateHash {
  std::size_t operator()(const ReplayState& s) const {
    return MarkingHash{}(s.marking) * 31 + s.position;
  }
};

}  // namespace

bool accepts(const PetriNet& net, std::span<const std::string> word, std::size_t state_cap) {
  std::unordered_set<ReplayState, ReplayStateHash> visited;
  std::deque<ReplayState> frontier;
  ReplayState start{0, net.initial_marking()};
  visited.insert(start);
  frontier.push_back(std::move(start));
  while (!frontier.empty()) {
    ReplayState s = std::move(frontier.front());
    frontier.pop_front();
    if (s.position == word.size() && s.marking == net.final_marking()) return true;
    for (TransitionIndex t : enabled(net, s.marking)) {
      const Transition& tr = net.transitions()[t];
      std::size_t next_pos = s.position;
      if (!tr.silent()) {
        if (s.position == word.size() || word[s.position] != tr.label) continue;
        ++next_pos;
      }
      ReplayState next{next_pos, fire(net, s.marking, t)};
      if (visited.insert(next).second) {
        if (visited.size() > state_cap) throw SearchBudgetExceeded(state_cap);
        frontier.push_back(std::move(next));
      }
    }
  }
  return false;
}

std::size_t shortest_accepted_word_cost(const PetriNet& net, std::size_t state_cap) {
  // 0-1 breadth-first search: silent firings cost 0, visible ones 1.
  std::unordered_map<Marking, std::size_t, MarkingHash> dist;
  std::deque<Marking> frontier;
  dist.emplace(net.initial_marking(), 0);
  frontier.push_back(net.initial_marking());
  std::unordered_set<Marking, MarkingHash> settled;
  while (!frontier.empty()) {
    Marking m = std::move(frontier.front());
    frontier.pop_front();
    if (!settled.insert(m).second) continue;
    const std::size_t d = dist.at(m);
    if (m == net.final_marking()) return d;
    for (TransitionIndex t : enabled(net, m)) {
      const std::size_t w = net.transitions()[t].silent() ? 0 : 1;
      Marking next = fire(net, m, t);
      auto it = dist.find(next);
      if (it == dist.end() || d + w < it->second) {
        dist[next] = d + w;
        if (dist.size() > state_cap) throw SearchBudgetExceeded(state_cap);
        if (w == 0) {
          frontier.push_front(std::move(next));
        } else {
          frontier.push_back(std::move(next));
        }
      }
    }
  }
  throw NoAcceptedWord();
}

}  // namespace porc
