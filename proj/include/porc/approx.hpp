#ifndef PORC_APPROX_HPP
#define PORC_APPROX_HPP

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "porc/alignment.hpp"
#include "porc/behavioral.hpp"
#include "porc/log_model.hpp"
#include "porc/resolution.hpp"

namespace porc {

/// Two-sided standard normal quantile for confidence level `alpha`.
/// Throws Error outside (0, 1).
double z_value(double alpha);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for `successes` out of `n`.
Interval wilson_interval(std::size_t successes, std::size_t n, double alpha);

/// Distance from the observed ratio k/n to the Wilson bounds used as a
/// symmetric margin. Inside (0, n) this is the interval half-width; at k = 0
/// or k = n the interval lies on one side of the ratio and the margin is the
/// distance to the far bound.
double wilson_margin(std::size_t successes, std::size_t n, double alpha);

/// z * sample sd (n - 1 denominator) / sqrt(n). Throws SampleTooSmall below `min_size`.
double normal_margin(std::span<const double> sample, double alpha, std::size_t min_size = 20);

/// known + (1 - p_bar) * mu, with the weight clamped at 0.
double expected_conformance(double known, double p_bar, double mu);

/// One checked resolution.
struct SampleRecord {
  Word word;
  double probability = 0.0;
  double conformance = 0.0;
};

/// Probability mass of resolutions whose optimal alignment contains a skip.
struct SkipMass {
  MoveKind kind = MoveKind::LogSkip;
  std::string activity;
  double mass = 0.0;
};

struct ApproxResult {
  double expected = 0.0;
  double margin = 0.0;  // (1 - p_bar) * m_alpha
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t sampled = 0;
  double p_bar = 0.0;
  bool exact = false;

  double known = 0.0;    // Σ P(φ) conf(φ) over the sample
  double mu = 0.0;       // fitted mean conformance of the sample
  double m_alpha = 0.0;  // margin of error before weighting
  bool fallback_used = false;
  std::vector<SampleRecord> samples;
  std::vector<SkipMass> skip_mass;  // filled only when requested
};

struct ApproxOptions {
  double alpha = 0.99;
  double delta = 0.10;
  std::size_t min_samples = 20;
  std::size_t cap = kDefaultEnumerationCap;
  bool keep_samples = false;
  bool skip_mass = false;
};

/// Σ P(φ) conf(φ) over every resolution with P(φ) > 0.
/// Throws EnumerationCapExceeded above `options.cap` resolutions.
ApproxResult exact_conformance(const Trace& trace, Aligner& aligner, const BehavioralModel& model,
                               ConformanceFunction fn, const ApproxOptions& options = {});

/// Checks resolutions in non-increasing probability until the weighted margin
/// relative to the estimate drops to `delta`, never before `min_samples`
/// checks. Traces with at most `min_samples` resolutions are computed exactly.
ApproxResult approximate_conformance(const Trace& trace, Aligner& aligner,
                                     const BehavioralModel& model, ConformanceFunction fn,
                                     const ApproxOptions& options = {});

}  // namespace porc

#endif  // PORC_APPROX_HPP
