#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "porc/approx.hpp"
#include "porc/errors.hpp"
#include "porc/evaluate.hpp"

using namespace porc;

namespace {

// Reference values computed independently (Python statistics.NormalDist and
// the closed-form Wilson interval), then frozen.
constexpr double kZ99 = 2.5758293035489;
constexpr double kZ95 = 1.9599639845400536;
constexpr double kZ90 = 1.6448536269514715;
constexpr double kWilsonHalf21of30 = 0.1983553120644338;
constexpr double kNormalMargin15Pairs = 0.18197808746200364;

const fixtures::Shape kSigma1 = {{"A"}, {"B", "C"}, {"D", "F"}, {"G"}};

double sample_sd(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

BehavioralModel build(const std::string& name, const EventLog& log) {
  return BehavioralModel::build(*ModelSpec::parse(name), log);
}

}  // namespace

TEST(ZValue, StandardLevels) {
  EXPECT_NEAR(z_value(0.99), kZ99, 1e-12);
  EXPECT_NEAR(z_value(0.95), kZ95, 1e-12);
  EXPECT_NEAR(z_value(0.90), kZ90, 1e-12);
  EXPECT_THROW(z_value(1.0), Error);
  EXPECT_THROW(z_value(0.0), Error);
}

TEST(Wilson, TwentyOneOfThirty) {
  EXPECT_NEAR(wilson_margin(21, 30, 0.99), kWilsonHalf21of30, 1e-12);
  const Interval ci = wilson_interval(21, 30, 0.99);
  EXPECT_NEAR(ci.high - ci.low, 2 * kWilsonHalf21of30, 1e-12);
}

TEST(Wilson, Boundaries) {
  const Interval zero = wilson_interval(0, 25, 0.99);
  EXPECT_NEAR(zero.low, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(wilson_margin(0, 25, 0.99), zero.high);
  const Interval all = wilson_interval(25, 25, 0.99);
  EXPECT_NEAR(all.high, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(wilson_margin(25, 25, 0.99), 1.0 - all.low);
  // closed form at k = n: lower bound n / (n + z²)
  EXPECT_NEAR(all.low, 25.0 / (25.0 + kZ99 * kZ99), 1e-12);
}

TEST(Wilson, ShrinksWithN) {
  const double m30 = wilson_margin(21, 30, 0.99);
  const double m300 = wilson_margin(210, 300, 0.99);
  const double m3000 = wilson_margin(2100, 3000, 0.99);
  EXPECT_GT(m30, m300);
  EXPECT_GT(m300, m3000);
  EXPECT_GT(m3000, 0.0);
}

TEST(NormalMargin, Examples) {
  EXPECT_DOUBLE_EQ(normal_margin(std::vector<double>(20, 1.0), 0.99), 0.0);
  std::vector<double> pairs;
  for (int i = 0; i < 15; ++i) {
    pairs.push_back(0.0);
    pairs.push_back(1.0);
  }
  EXPECT_NEAR(normal_margin(pairs, 0.95), kNormalMargin15Pairs, 1e-12);
  EXPECT_THROW(normal_margin(std::vector<double>(19, 1.0), 0.95), SampleTooSmall);
}

TEST(NormalMargin, DoublingNShrinksBySqrtTwo) {
  std::vector<double> a = {0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> sample, doubled;
  for (int i = 0; i < 4; ++i) sample.insert(sample.end(), a.begin(), a.end());
  for (int i = 0; i < 8; ++i) doubled.insert(doubled.end(), a.begin(), a.end());
  const double m1 = normal_margin(sample, 0.99);
  const double m2 = normal_margin(doubled, 0.99);
  // the margin is z·sd/√n; factor out the tiny change in the sample sd
  EXPECT_NEAR(m2 / m1, (sample_sd(doubled) / sample_sd(sample)) / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(m1, kZ99 * sample_sd(sample) / std::sqrt(20.0), 1e-12);
}

TEST(ExpectedConformance, WorkedExample) {
  // 30 checks, 21 conforming: μ = 0.70; p̄ = 0.80 and known part 0.60
  const double mu = 21.0 / 30.0;
  EXPECT_NEAR(mu, 0.70, 1e-15);
  EXPECT_NEAR((1.0 - 0.80) * mu, 0.14, 1e-15);
  EXPECT_NEAR(expected_conformance(0.60, 0.80, mu), 0.74, 1e-15);
}

TEST(ExactConformance, RunningExample) {
  const PetriNet net = fixtures::example_net();
  const EventLog log = fixtures::example_log();
  Aligner aligner(net);
  const auto r = exact_conformance(log.traces()[0], aligner, build("bl1", log),
                                   ConformanceFunction::Binary);
  EXPECT_DOUBLE_EQ(r.expected, 0.25);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.margin, 0.0);
  EXPECT_EQ(r.sampled, 4u);

  // fitness: mean of the four resolutions' fitness under the uniform model
  double mean = 0.0;
  for (const Resolution& res : enumerate_all(log.traces()[0])) mean += conf_fit(net, res.word) / 4;
  const auto f = exact_conformance(log.traces()[0], aligner, build("bl1", log),
                                   ConformanceFunction::Fitness);
  EXPECT_NEAR(f.expected, mean, 1e-12);
}

TEST(ExactConformance, TraceEquivalenceModel) {
  const PetriNet net = fixtures::example_net();
  const Word pi4 = {"A", "B", "C", "D", "F", "G"}, pi5 = {"A", "C", "B", "D", "F", "G"};
  auto shape = [](const Word& w) {
    fixtures::Shape s;
    for (const auto& a : w) s.push_back({a});
    return s;
  };
  const EventLog log = fixtures::log_of({kSigma1, shape(pi4), shape(pi4), shape(pi4), shape(pi5)});
  Aligner aligner(net);
  const auto model = build("te", log);
  EXPECT_NEAR(exact_conformance(log.traces()[0], aligner, model, ConformanceFunction::Binary).expected,
              0.75, 1e-15);
  EXPECT_DOUBLE_EQ(
      exact_conformance(log.traces()[1], aligner, model, ConformanceFunction::Binary).expected, 1.0);
  EXPECT_DOUBLE_EQ(
      exact_conformance(log.traces()[1], aligner, model, ConformanceFunction::Fitness).expected, 1.0);
}

TEST(ApproximateConformance, SmallTraceIsExact) {
  const PetriNet net = fixtures::example_net();
  const EventLog log = fixtures::example_log();
  Aligner aligner(net);
  const auto r = approximate_conformance(log.traces()[0], aligner, build("bl1", log),
                                         ConformanceFunction::Binary);
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.expected, 0.25);
  EXPECT_EQ(r.margin, 0.0);
}

TEST(ApproximateConformance, EquiprobableAllConforming) {
  const Word labels = {"a", "b", "c", "d", "e"};
  const PetriNet net = fixtures::parallel_net(labels);
  const EventLog log = fixtures::log_of({fixtures::Shape{labels}});  // one set of five: 120 resolutions
  Aligner aligner(net);
  const auto model = build("bl1", log);
  for (auto fn : {ConformanceFunction::Binary, ConformanceFunction::Fitness}) {
    const auto exact = exact_conformance(log.traces()[0], aligner, model, fn);
    const auto approx = approximate_conformance(log.traces()[0], aligner, model, fn);
    EXPECT_NEAR(exact.expected, 1.0, 1e-12);
    EXPECT_NEAR(approx.expected, 1.0, 1e-12);
    EXPECT_GE(approx.sampled, 20u);
    EXPECT_LT(approx.sampled, 120u);
    EXPECT_FALSE(approx.exact);
    EXPECT_LE(approx.ci_low, 1.0);
    EXPECT_GE(approx.ci_high, 1.0 - 1e-12);
    EXPECT_NEAR(approx.p_bar, approx.sampled / 120.0, 1e-12);
  }
  // binary: stops at the first n where (1 - n/120)·(1 - n/(n + z²)) <= 0.1
  std::size_t n = 20;
  while ((1.0 - n / 120.0) * (1.0 - n / (n + kZ99 * kZ99)) > 0.10) ++n;
  EXPECT_EQ(approximate_conformance(log.traces()[0], aligner, model, ConformanceFunction::Binary)
                .sampled,
            n);
}

TEST(ApproximateConformance, DecompositionAndDeterminism) {
  std::mt19937_64 rng(83);
  NetGeneratorOptions gen;
  gen.min_activities = 4;
  gen.max_activities = 7;
  for (int round = 0; round < 10; ++round) {
    const PetriNet net = random_block_net(gen, rng);
    SimulationOptions sim;
    sim.traces = 60;
    sim.mean_gap_seconds = 20.0;
    sim.max_events = 20;
    const EventLog coarse = coarsen(simulate(net, sim, rng), Precision::Minute);
    Aligner aligner(net);
    ApproxOptions opts;
    opts.keep_samples = true;
    for (const char* kind : {"2g", "wo", "bl1"}) {
      const auto model = build(kind, coarse);
      for (const Trace& t : coarse.traces()) {
        if (resolution_count(t) > 20'000) continue;
        for (auto fn : {ConformanceFunction::Binary, ConformanceFunction::Fitness}) {
          const auto r = approximate_conformance(t, aligner, model, fn, opts);
          // small traces are scored exhaustively in enumeration order
          const bool ranked = resolution_count(t) > opts.min_samples;
          double known = 0.0, mu = 0.0, p_bar = 0.0, last = 1.0;
          for (const auto& s : r.samples) {
            known += s.probability * s.conformance;
            mu += s.conformance;
            p_bar += s.probability;
            if (ranked) EXPECT_LE(s.probability, last + 1e-12);
            last = s.probability;
          }
          mu /= static_cast<double>(r.samples.size());
          EXPECT_LE(r.p_bar, 1.0 + 1e-9);
          EXPECT_NEAR(r.p_bar, p_bar, 1e-12);
          if (!r.exact) EXPECT_NEAR(r.expected, known + (1.0 - p_bar) * mu, 1e-12);
          EXPECT_GE(r.expected, r.ci_low);
          EXPECT_LE(r.expected, r.ci_high);
          const auto again = approximate_conformance(t, aligner, model, fn, opts);
          EXPECT_EQ(again.expected, r.expected);
          EXPECT_EQ(again.sampled, r.sampled);
        }
      }
    }
  }
}

TEST(SkipMass, MatchesPerResolutionAlignments) {
  const PetriNet net = fixtures::example_net();
  const EventLog log = fixtures::example_log();
  Aligner aligner(net);
  ApproxOptions opts;
  opts.skip_mass = true;
  const auto r = exact_conformance(log.traces()[0], aligner, build("bl1", log),
                                   ConformanceFunction::Fitness, opts);
  ASSERT_FALSE(r.skip_mass.empty());
  for (const SkipMass& s : r.skip_mass) {
    double want = 0.0;
    for (const Resolution& res : enumerate_all(log.traces()[0])) {
      const Alignment a = optimal_alignment(net, res.word);
      bool has = false;
      for (const Move& m : a.moves) has |= m.kind == s.kind && m.activity == s.activity;
      want += has ? 0.25 : 0.0;
    }
    EXPECT_NEAR(s.mass, want, 1e-12) << s.activity;
    EXPECT_LE(s.mass, 0.75 + 1e-12);  // π4 conforms and contributes no skip
  }
}
