#include "porc/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <boost/math/distributions/normal.hpp>

#include "porc/errors.hpp"

namespace porc {

double z_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("confidence level must lie in (0, 1)");
  const boost::math::normal standard;
  return boost::math::quantile(standard, 1.0 - (1.0 - alpha) / 2.0);
}

Interval wilson_interval(std::size_t successes, std::size_t n, double alpha) {
  if (n == 0) return Interval{0.0, 1.0};
  const double z = z_value(alpha);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return Interval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

double wilson_margin(std::size_t successes, std::size_t n, double alpha) {
  if (n == 0) return 1.0;
  const Interval ci = wilson_interval(successes, n, alpha);
  if (successes == 0) return ci.high;
  if (successes == n) return 1.0 - ci.low;
  return (ci.high - ci.low) / 2.0;
}

namespace {

// z * s / sqrt(n) from the sum of squared deviations
double normal_margin_from_moments(double n, double squared_deviations, double alpha) {
  return z_value(alpha) * std::sqrt(squared_deviations / (n - 1.0)) / std::sqrt(n);
}

}  // namespace

double normal_margin(std::span<const double> sample, double alpha, std::size_t min_size) {
  if (sample.size() < std::max<std::size_t>(min_size, 2))
    throw SampleTooSmall(sample.size(), std::max<std::size_t>(min_size, 2));
  const double n = static_cast<double>(sample.size());
  const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : sample) ss += (x - mean) * (x - mean);
  return normal_margin_from_moments(n, ss, alpha);
}

double expected_conformance(double known, double p_bar, double mu) {
  return known + std::max(0.0, 1.0 - p_bar) * mu;
}

namespace {

void finish(ApproxResult& r) {
  r.expected = std::clamp(r.expected, 0.0, 1.0);
  r.ci_low = std::max(0.0, r.expected - r.margin);
  r.ci_high = std::min(1.0, r.expected + r.margin);
}

void add_skip_mass(ApproxResult& r, const Alignment& alignment, double probability) {
  std::vector<std::pair<MoveKind, std::string>> seen;
  for (const Move& m : alignment.moves) {
    if (m.kind == MoveKind::Synchronous || m.silent()) continue;
    std::pair<MoveKind, std::string> key{m.kind, m.activity};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    auto it = std::find_if(r.skip_mass.begin(), r.skip_mass.end(), [&](const SkipMass& s) {
      return s.kind == key.first && s.activity == key.second;
    });
    if (it == r.skip_mass.end()) {
      r.skip_mass.push_back(SkipMass{key.first, key.second, probability});
    } else {
      it->mass += probability;
    }
  }
}

void sort_skip_mass(ApproxResult& r) {
  std::sort(r.skip_mass.begin(), r.skip_mass.end(), [](const SkipMass& a, const SkipMass& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.activity < b.activity;
  });
}

/// Resolutions in sampling order: non-increasing
/// probability, ties by word.
class SelectionStream {
 public:
  // The normalizer is a DP, so resolutions are ranked lazily and never
  // enumerated up front.
  SelectionStream(const Trace& trace, const BehavioralModel& model, std::size_t cap)
      : ranked_(trace, model, 50 * cap) {
    log_norm_ = model.log_normalizer(trace, cap);
    fallback_ = log_norm_ == -std::numeric_limits<double>::infinity();
    for (const EventSet& set : trace.event_sets())
      log_count_ += std::lgamma(static_cast<double>(set.size()) + 1.0);
  }

  std::optional<ScoredResolution> next() {
    auto r = ranked_.next();
    if (r)
      r->probability = fallback_ ? std::exp(-log_count_) : std::exp(r->log_score - log_norm_);
    return r;
  }

  bool fallback() const { return fallback_; }

 private:
  RankedResolutions ranked_;
  double log_norm_ = 0.0;
  double log_count_ = 0.0;
  bool fallback_ = false;
};

}  // namespace

ApproxResult exact_conformance(const Trace& trace, Aligner& aligner, const BehavioralModel& model,
                               ConformanceFunction fn, const ApproxOptions& options) {
  const ScoredDistribution d = distribution(model, trace, options.cap);
  ApproxResult r;
  r.exact = true;
  r.fallback_used = d.fallback_used;
  std::vector<const ScoredResolution*> checked;
  std::vector<Word> words;
  for (const ScoredResolution& s : d.entries) {
    if (s.probability <= 0.0) continue;
    checked.push_back(&s);
    words.push_back(s.resolution.word);
  }
  // skip mass needs the alignments themselves, not just their costs
  const std::vector<double> conf =
      options.skip_mass ? std::vector<double>{} : aligner.conformance_all(words, fn);
  std::size_t positive = 0;
  double conf_sum = 0.0;
  for (std::size_t i = 0; i < checked.size(); ++i) {
    const ScoredResolution& s = *checked[i];
    const double c = options.skip_mass ? aligner.conformance(s.resolution.word, fn) : conf[i];
    r.known += s.probability * c;
    r.p_bar += s.probability;
    conf_sum += c;
    ++positive;
    if (options.skip_mass) add_skip_mass(r, *aligner.align(s.resolution.word), s.probability);
    if (options.keep_samples) r.samples.push_back(SampleRecord{s.resolution.word, s.probability, c});
  }
  r.sampled = positive;
  r.mu = positive ? conf_sum / static_cast<double>(positive) : 0.0;
  r.expected = r.known;
  r.margin = 0.0;
  sort_skip_mass(r);
  finish(r);
  return r;
}

ApproxResult approximate_conformance(const Trace& trace, Aligner& aligner,
                                     const BehavioralModel& model, ConformanceFunction fn,
                                     const ApproxOptions& options) {
  std::uint64_t count = std::numeric_limits<std::uint64_t>::max();
  try {
    count = resolution_count(trace);
  } catch (const CountOverflow&) {
  }
  if (count <= options.min_samples) return exact_conformance(trace, aligner, model, fn, options);

  SelectionStream stream(trace, model, options.cap);
  PrefixAligner prefixes(aligner);
  ApproxResult r;
  r.fallback_used = stream.fallback();
  std::size_t n = 0;
  std::size_t successes = 0;
  double mean = 0.0;
  double squared_deviations = 0.0;  // Welford
  for (;;) {
    auto next = stream.next();
    if (!next || next->probability <= 0.0) {
      // Every resolution with positive probability has been checked.
      r.exact = true;
      r.expected = r.known;
      r.margin = 0.0;
      r.m_alpha = 0.0;
      break;
    }
    const double c = options.skip_mass ? aligner.conformance(next->resolution.word, fn)
                                       : prefixes.conformance(next->resolution.word, fn);
    ++n;
    if (c >= 1.0) ++successes;
    const double delta = c - mean;
    mean += delta / static_cast<double>(n);
    squared_deviations += delta * (c - mean);
    r.known += next->probability * c;
    r.p_bar += next->probability;
    if (options.skip_mass) add_skip_mass(r, *aligner.align(next->resolution.word), next->probability);
    if (options.keep_samples)
      r.samples.push_back(SampleRecord{next->resolution.word, next->probability, c});

    r.mu = mean;
    r.expected = expected_conformance(r.known, r.p_bar, r.mu);
    if (n < std::max<std::size_t>(options.min_samples, 2)) continue;

    r.m_alpha = fn == ConformanceFunction::Binary
                    ? wilson_margin(successes, n, options.alpha)
                    : normal_margin_from_moments(static_cast<double>(n), squared_deviations,
                                                 options.alpha);
    r.margin = std::max(0.0, 1.0 - r.p_bar) * r.m_alpha;
    const bool done = r.expected > 0.0 ? r.margin / r.expected <= options.delta
                                       : r.margin <= options.delta;
    if (done) break;
  }
  r.sampled = n;
  sort_skip_mass(r);
  finish(r);
  return r;
}

}  // namespace porc
