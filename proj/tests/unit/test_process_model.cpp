#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "porc/errors.hpp"
#include "porc/evaluate.hpp"
#include "porc/process_model.hpp"

using namespace porc;

namespace {

std::vector<std::string> labels_of(const PetriNet& net, const std::vector<TransitionIndex>& ts) {
  std::vector<std::string> out;
  for (auto t : ts) out.push_back(net.transitions()[t].label);
  std::sort(out.begin(), out.end());
  return out;
}

PetriNet pnml(const std::string& text, const PnmlOptions& options = {}) {
  std::istringstream in(text);
  return read_pnml(in, options);
}

const char* kTinyNet = R"(<pnml><net id="n"><page id="pg">
  <place id="p0"><initialMarking><text>1</text></initialMarking></place>
  <place id="p1"/>
  <transition id="t"><name><text>A</text></name></transition>
  <arc id="a0" source="p0" target="t"/>
  <arc id="a1" source="t" target="p1"/>
</page>
<finalmarkings><marking><place idref="p1"><text>1</text></place></marking></finalmarkings>
</net></pnml>)";

}  // namespace

TEST(Pnml, ExampleNetStructure) {
  const PetriNet net = fixtures::example_net();
  EXPECT_EQ(net.labels(), (std::vector<std::string>{"A", "B", "C", "D", "E", "F", "G"}));
  EXPECT_EQ(labels_of(net, enabled(net, net.initial_marking())), (std::vector<std::string>{"A"}));
  const Marking after_a = fire(net, net.initial_marking(), *net.transition_index("tA"));
  EXPECT_EQ(labels_of(net, enabled(net, after_a)), (std::vector<std::string>{"B", "D"}));
  EXPECT_EQ(shortest_accepted_word_cost(net), 6u);
}

TEST(Pnml, ExampleNetLanguageHasSixWords) {
  const PetriNet net = fixtures::example_net();
  const auto lang = oracle::language(net, 12);
  EXPECT_EQ(lang.size(), 6u);
  for (const Word& w : lang) EXPECT_EQ(w.size(), 6u);
  EXPECT_TRUE(lang.count({"A", "B", "C", "D", "E", "G"}));
  EXPECT_TRUE(lang.count({"A", "D", "B", "C", "F", "G"}));
}

TEST(Pnml, TinyNetAndFinalPlaceOverride) {
  const PetriNet net = pnml(kTinyNet);
  EXPECT_EQ(oracle::language(net, 5), (std::set<Word>{{"A"}}));
  EXPECT_EQ(shortest_accepted_word_cost(net), 1u);

  std::string no_final = kTinyNet;
  no_final.erase(no_final.find("<finalmarkings>"),
                 no_final.find("</finalmarkings>") + 16 - no_final.find("<finalmarkings>"));
  EXPECT_THROW(pnml(no_final), NoFinalMarking);
  PnmlOptions opts;
  opts.final_place = "p1";
  EXPECT_EQ(pnml(no_final, opts).final_marking()[1], 1u);
}

TEST(Pnml, Errors) {
  std::string dangling = kTinyNet;
  dangling.replace(dangling.find("target=\"p1\""), 11, "target=\"p9\"");
  EXPECT_THROW(pnml(dangling), DanglingArc);

  std::string no_initial = kTinyNet;
  no_initial.replace(no_initial.find("<initialMarking><text>1</text></initialMarking>"), 47, "");
  EXPECT_THROW(pnml(no_initial), NoInitialMarking);

  EXPECT_THROW(pnml("<pnml><net>"), XmlError);
  EXPECT_THROW(parse_pnml("/nonexistent.pnml"), IoError);
}

TEST(Pnml, WriteReadRoundTrip) {
  const PetriNet net = fixtures::example_net();
  std::ostringstream out;
  write_pnml(net, out);
  const PetriNet back = pnml(out.str());
  EXPECT_EQ(back.places(), net.places());
  EXPECT_EQ(back.initial_marking(), net.initial_marking());
  EXPECT_EQ(back.final_marking(), net.final_marking());
  EXPECT_EQ(oracle::language(back, 8), oracle::language(net, 8));
}

TEST(Firing, EmptyMarkingAndNotEnabled) {
  const PetriNet net = fixtures::example_net();
  EXPECT_TRUE(enabled(net, Marking(net.places().size())).empty());
  EXPECT_THROW(fire(net, net.initial_marking(), *net.transition_index("tG")), NotEnabled);
}

TEST(Firing, TokenConservation) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 20; ++round) {
    const PetriNet net = random_block_net({}, rng);
    Marking m = net.initial_marking();
    for (int step = 0; step < 30; ++step) {
      const auto ts = enabled(net, m);
      if (ts.empty()) break;
      const auto t = ts[rng() % ts.size()];
      const Marking next = fire(net, m, t);
      auto expect = m.tokens();
      for (const Arc& a : net.transitions()[t].inputs) expect[a.place] -= a.weight;
      for (const Arc& a : net.transitions()[t].outputs) expect[a.place] += a.weight;
      EXPECT_EQ(next.tokens(), expect);
      m = next;
    }
  }
}

TEST(Accepts, RunningExample) {
  const PetriNet net = fixtures::example_net();
  const Word pi1 = {"A", "B", "C", "D", "E", "G"};
  const Word pi2 = {"A", "B", "C", "E", "D", "G"};
  EXPECT_TRUE(accepts(net, pi1));
  EXPECT_FALSE(accepts(net, pi2));
  EXPECT_FALSE(accepts(fixtures::single_transition_net(), Word{}));
}

TEST(Accepts, SilentShortcutCountsLabeledOnly) {
  // p0 -A-> p1 -B-> p2, with a silent p0 -> p1 bypass around A
  const PetriNet net({"p0", "p1", "p2"}, {{"ta", "A"}, {"tb", "B"}, {"tau", ""}},
                     {{"1", "p0", "ta"}, {"2", "ta", "p1"}, {"3", "p1", "tb"}, {"4", "tb", "p2"},
                      {"5", "p0", "tau"}, {"6", "tau", "p1"}},
                     {{"p0", 1}}, {{"p2", 1}});
  EXPECT_EQ(shortest_accepted_word_cost(net), 1u);
  EXPECT_TRUE(accepts(net, Word{"B"}));
  EXPECT_TRUE(accepts(net, Word{"A", "B"}));
}

TEST(Accepts, AgreesWithLanguageEnumeration) {
  std::mt19937_64 rng(17);
  NetGeneratorOptions gen;
  gen.loop_probability = 0.0;
  gen.max_activities = 6;
  for (int round = 0; round < 25; ++round) {
    const PetriNet net = random_block_net(gen, rng);
    const auto lang = oracle::language(net, 12);
    ASSERT_LE(lang.size(), 1000u);
    for (const Word& w : lang) EXPECT_TRUE(accepts(net, w));
    // mutated words are accepted exactly when they are in the language
    const auto labels = net.labels();
    for (const Word& w : lang) {
      Word m = w;
      if (m.size() >= 2) std::swap(m[0], m[m.size() - 1]);
      m.push_back(labels[rng() % labels.size()]);
      EXPECT_EQ(accepts(net, m), lang.count(m) > 0);
      m.pop_back();
      EXPECT_EQ(accepts(net, m), lang.count(m) > 0);
    }
  }
}

TEST(Accepts, StateBudget) {
  // an unbounded producer loop keeps generating fresh markings
  const PetriNet net({"p0", "p1", "p2"}, {{"grow", ""}, {"end", "A"}},
                     {{"1", "p0", "grow"}, {"2", "grow", "p0"}, {"3", "grow", "p1"},
                      {"4", "p0", "end"}, {"5", "end", "p2"}},
                     {{"p0", 1}}, {{"p2", 1}});
  EXPECT_THROW(accepts(net, Word{"B"}, 1000), SearchBudgetExceeded);
}
