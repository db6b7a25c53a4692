#include "porc/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "porc/errors.hpp"
#include "porc/parallel.hpp"

namespace porc {

GoldLog make_gold_log(const EventLog& original, Precision unit) {
  GoldLog gold{coarsen(original, unit), {}};
  for (const Trace& t : original.traces()) {
    if (!t.certain()) throw Error("gold log requires certain traces; case '" + t.case_id() + "'");
    gold.gold_orders.emplace(t.case_id(), t.canonical_word());
  }
  return gold;
}

std::vector<double> gold_fitness(const GoldLog& gold, Aligner& aligner) {
  std::vector<double> out;
  out.reserve(gold.coarse.size());
  for (const Trace& t : gold.coarse.traces()) {
    auto it = gold.gold_orders.find(t.case_id());
    if (it == gold.gold_orders.end()) throw MissingGoldOrder(t.case_id());
    out.push_back(aligner.fitness(it->second));
  }
  return out;
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void score_against_gold(ModelEvaluation& e, const GoldLog& gold, const std::vector<double>& fit) {
  double squares = 0.0;
  std::size_t uncertain = 0;
  const auto& traces = gold.coarse.traces();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (traces[i].certain()) continue;
    const double d = fit[i] - e.trace_fitness[i];
    squares += d * d;
    ++uncertain;
  }
  e.uncertain_traces = uncertain;
  e.rmse_defined = uncertain > 0;
  e.rmse = uncertain ? std::sqrt(squares / static_cast<double>(uncertain)) : 0.0;
  e.estimated_log_fitness = mean(e.trace_fitness);
  e.log_error = std::abs(mean(fit) - e.estimated_log_fitness);
}

}  // namespace

ModelEvaluation evaluate_model(const GoldLog& gold, Aligner& aligner, const ModelSpec& spec,
                               const EvalOptions& options) {
  const std::vector<double> fit = gold_fitness(gold, aligner);
  const auto started = std::chrono::steady_clock::now();
  ModelEvaluation e;
  e.model = spec.name();
  const auto& traces = gold.coarse.traces();
  e.trace_fitness.assign(traces.size(), 0.0);
  std::vector<char> fallback(traces.size(), 0);

  std::optional<BehavioralModel> shared;
  if (!options.leave_one_out) shared.emplace(BehavioralModel::build(spec, gold.coarse));

  parallel_for(traces.size(), options.jobs, [&](std::size_t i) {
    const Trace& t = traces[i];
    if (t.certain()) {
      e.trace_fitness[i] = aligner.fitness(t.canonical_word());
      return;
    }
    std::optional<BehavioralModel> own;
    if (!shared) own.emplace(BehavioralModel::build(spec, gold.coarse, t.case_id()));
    const BehavioralModel& model = shared ? *shared : *own;
    ApproxResult r;
    bool small = true;
    try {
      small = resolution_count(t) <= options.approx.cap;
    } catch (const CountOverflow&) {
      small = false;
    }
    if (options.approximate || !small) {
      r = approximate_conformance(t, aligner, model, ConformanceFunction::Fitness, options.approx);
    } else {
      r = exact_conformance(t, aligner, model, ConformanceFunction::Fitness, options.approx);
    }
    e.trace_fitness[i] = r.expected;
    fallback[i] = r.fallback_used ? 1 : 0;
  });
  e.fallback_count = static_cast<std::size_t>(std::count(fallback.begin(), fallback.end(), 1));
  e.runtime_ms = elapsed_ms(started);
  score_against_gold(e, gold, fit);
  return e;
}

double trace_rmse(const GoldLog& gold, Aligner& aligner, const ModelSpec& spec,
                  const EvalOptions& options) {
  return evaluate_model(gold, aligner, spec, options).rmse;
}

double log_error(const GoldLog& gold, Aligner& aligner, const ModelSpec& spec,
                 const EvalOptions& options) {
  return evaluate_model(gold, aligner, spec, options).log_error;
}

ModelEvaluation evaluate_discard_uncertain(const GoldLog& gold, Aligner& aligner) {
  const std::vector<double> fit = gold_fitness(gold, aligner);
  const auto started = std::chrono::steady_clock::now();
  ModelEvaluation e;
  e.model = "bl2";
  std::vector<double> certain;
  for (const Trace& t : gold.coarse.traces()) {
    if (t.certain()) {
      certain.push_back(aligner.fitness(t.canonical_word()));
    } else {
      ++e.uncertain_traces;
    }
  }
  e.estimate_defined = !certain.empty();
  e.estimated_log_fitness = e.estimate_defined ? mean(certain) : 0.0;
  e.log_error = e.estimate_defined ? std::abs(mean(fit) - e.estimated_log_fitness) : 0.0;
  e.rmse_defined = false;
  e.runtime_ms = elapsed_ms(started);
  return e;
}

EvalReport run_benchmark(const GoldLog& gold, const PetriNet& net,
                         const std::vector<std::string>& kinds, const EvalOptions& options) {
  Aligner aligner(net);
  EvalReport report;
  const std::vector<double> fit = gold_fitness(gold, aligner);
  report.true_log_fitness = mean(fit);
  report.traces = gold.coarse.size();
  report.uncertain_traces = gold.coarse.uncertain_count();

  for (const std::string& kind : kinds) {
    BenchmarkEntry entry;
    if (kind == "bl2") {
      entry.exact = evaluate_discard_uncertain(gold, aligner);
      report.per_model.push_back(std::move(entry));
      continue;
    }
    auto spec = ModelSpec::parse(kind);
    if (!spec) throw Error("unknown behavioral model '" + kind + "'");
    spec->start_marker = options.start_marker;
    // Runtimes include conformance checks, so each run starts from a cold cache.
    auto reset = [&] {
      if (!options.cold_cache) return;
      aligner.clear_cache();
      gold_fitness(gold, aligner);
    };
    EvalOptions exact = options;
    exact.approximate = false;
    reset();
    entry.exact = evaluate_model(gold, aligner, *spec, exact);
    if (options.approximate) {
      reset();
      entry.approximate = evaluate_model(gold, aligner, *spec, options);
      entry.time_saved = entry.exact.runtime_ms > 0
                             ? 1.0 - entry.approximate->runtime_ms / entry.exact.runtime_ms
                             : 0.0;
      entry.additional_rmse = entry.approximate->rmse - entry.exact.rmse;
      entry.additional_error = entry.approximate->log_error - entry.exact.log_error;
    }
    report.per_model.push_back(std::move(entry));
  }
  return report;
}

// ---- synthetic data -----------------------------------------------------------

EventLog simulate(const PetriNet& net, const SimulationOptions& options, std::mt19937_64& rng) {
  std::exponential_distribution<double> gap(1.0 / (options.mean_gap_seconds * 1000.0));
  std::vector<Event> events;
  std::int64_t clock = options.start_millis;
  constexpr std::size_t kMaxAttempts = 1000;
  for (std::size_t c = 0; c < options.traces; ++c) {
    const std::string case_id = options.case_prefix + std::to_string(c + 1);
    std::vector<std::string> labels;
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt == kMaxAttempts) throw Error("simulation cannot reach the final marking");
      labels.clear();
      Marking m = net.initial_marking();
      bool ok = false;
      for (std::size_t step = 0; step < 4 * options.max_events + 16; ++step) {
        if (m == net.final_marking()) {
          ok = true;
          break;
        }
        const auto live = enabled(net, m);
        if (live.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
        const TransitionIndex t = live[pick(rng)];
        m = fire(net, m, t);
        if (!net.transitions()[t].silent()) labels.push_back(net.transitions()[t].label);
        if (labels.size() > options.max_events) break;
      }
      if (ok && !labels.empty()) break;
    }
    clock += 3'600'000;  // cases start an hour apart
    for (std::size_t i = 0; i < labels.size(); ++i) {
      clock += std::max<std::int64_t>(1, std::llround(gap(rng)));
      events.push_back(Event{case_id + "-" + std::to_string(i + 1), labels[i], Timestamp{clock},
                             case_id});
    }
  }
  return make_log(std::move(events), Precision::Millisecond);
}

EventLog add_noise(const EventLog& log, double fraction, const std::vector<NoiseKind>& kinds,
                   std::mt19937_64& rng) {
  if (kinds.empty() || fraction <= 0.0) return log;
  const std::vector<std::string> universe(log.activity_universe().begin(),
                                          log.activity_universe().end());
  std::vector<std::size_t> order(log.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto noisy_count = static_cast<std::size_t>(
      std::llround(std::clamp(fraction, 0.0, 1.0) * static_cast<double>(log.size())));
  std::vector<char> noisy(log.size(), 0);
  for (std::size_t i = 0; i < noisy_count; ++i) noisy[order[i]] = 1;

  std::vector<Trace> traces;
  for (std::size_t ti = 0; ti < log.size(); ++ti) {
    const Trace& t = log.traces()[ti];
    if (!noisy[ti]) {
      traces.push_back(t);
      continue;
    }
    std::vector<Event> events = t.events();
    std::uniform_int_distribution<std::size_t> kind_pick(0, kinds.size() - 1);
    NoiseKind kind = kinds[kind_pick(rng)];
    if (kind == NoiseKind::Remove && events.size() < 2) kind = NoiseKind::Insert;
    if (kind == NoiseKind::Swap && events.size() < 2) kind = NoiseKind::Insert;
    switch (kind) {
      case NoiseKind::Insert: {
        std::uniform_int_distribution<std::size_t> where(0, events.size());
        std::uniform_int_distribution<std::size_t> what(0, universe.size() - 1);
        const std::size_t pos = where(rng);
        // Timestamp strictly between the neighbours; shift later events when
        // they are adjacent milliseconds.
        const std::int64_t before = pos == 0 ? events.front().timestamp.millis - 2
                                             : events[pos - 1].timestamp.millis;
        std::int64_t at = pos == events.size() ? before + 1000
                                               : (before + events[pos].timestamp.millis) / 2;
        if (at <= before) at = before + 1;
        for (std::size_t j = pos; j < events.size(); ++j) {
          const std::int64_t floor = (j == pos ? at : events[j - 1].timestamp.millis) + 1;
          if (events[j].timestamp.millis < floor) events[j].timestamp.millis = floor;
        }
        events.insert(events.begin() + static_cast<std::ptrdiff_t>(pos),
                      Event{t.case_id() + "-n", universe[what(rng)], Timestamp{at}, t.case_id()});
        break;
      }
      case NoiseKind::Swap: {
        std::uniform_int_distribution<std::size_t> where(0, events.size() - 1);
        std::size_t a = where(rng), b = where(rng);
        while (b == a) b = where(rng);
        std::swap(events[a].activity, events[b].activity);
        std::swap(events[a].id, events[b].id);
        break;
      }
      case NoiseKind::Remove: {
        std::uniform_int_distribution<std::size_t> where(0, events.size() - 1);
        events.erase(events.begin() + static_cast<std::ptrdiff_t>(where(rng)));
        break;
      }
    }
    traces.push_back(group_events(t.case_id(), std::move(events)));
  }
  return EventLog(std::move(traces), log.precision());
}

namespace {

struct NetBuilder {
  std::vector<std::string> places;
  std::vector<PetriNet::TransitionSpec> transitions;
  std::vector<PetriNet::ArcSpec> arcs;

  std::string place() {
    places.push_back("p" + std::to_string(places.size()));
    return places.back();
  }
  void transition(const std::string& label, const std::vector<std::string>& in,
                  const std::vector<std::string>& out) {
    const std::string id = "t" + std::to_string(transitions.size());
    transitions.push_back({id, label});
    for (const auto& p : in) arcs.push_back({id + "-in-" + p, p, id, 1});
    for (const auto& p : out) arcs.push_back({id + "-out-" + p, id, p, 1});
  }
};

enum class Block { Activity, Sequence, Choice, Parallel, Loop };

/// Emits a block over `labels` between places `in` and `out`.
void emit(NetBuilder& b, std::vector<std::string> labels, const std::string& in,
          const std::string& out, const NetGeneratorOptions& options, std::mt19937_64& rng) {
  if (labels.size() == 1) {
    b.transition(labels.front(), {in}, {out});
    return;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Block kind;
  const double r = u(rng);
  if (labels.size() >= 2 && r < options.loop_probability) {
    kind = Block::Loop;
  } else {
    const double s = u(rng);
    kind = s < 0.5 ? Block::Sequence : (s < 0.75 ? Block::Choice : Block::Parallel);
  }
  // Split labels into 2 or 3 non-empty groups.
  std::uniform_int_distribution<std::size_t> parts_pick(2, std::min<std::size_t>(3, labels.size()));
  const std::size_t parts = kind == Block::Loop ? 2 : parts_pick(rng);
  std::vector<std::size_t> cuts;
  {
    std::vector<std::size_t> positions(labels.size() - 1);
    std::iota(positions.begin(), positions.end(), 1);
    std::shuffle(positions.begin(), positions.end(), rng);
    cuts.assign(positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(parts - 1));
    std::sort(cuts.begin(), cuts.end());
  }
  std::vector<std::vector<std::string>> groups;
  std::size_t prev = 0;
  for (std::size_t c : cuts) {
    groups.emplace_back(labels.begin() + static_cast<std::ptrdiff_t>(prev),
                        labels.begin() + static_cast<std::ptrdiff_t>(c));
    prev = c;
  }
  groups.emplace_back(labels.begin() + static_cast<std::ptrdiff_t>(prev), labels.end());

  switch (kind) {
    case Block::Activity:
      break;
    case Block::Sequence: {
      std::string from = in;
      for (std::size_t i = 0; i < groups.size(); ++i) {
        const std::string to = i + 1 == groups.size() ? out : b.place();
        emit(b, groups[i], from, to, options, rng);
        from = to;
      }
      break;
    }
    case Block::Choice: {
      // Children own their boundary places so no branch can leak into another.
      for (auto& g : groups) {
        const std::string cin = b.place(), cout = b.place();
        b.transition("", {in}, {cin});
        emit(b, g, cin, cout, options, rng);
        b.transition("", {cout}, {out});
      }
      break;
    }
    case Block::Parallel: {
      std::vector<std::string> ins, outs;
      for (auto& g : groups) {
        ins.push_back(b.place());
        outs.push_back(b.place());
        emit(b, g, ins.back(), outs.back(), options, rng);
      }
      b.transition("", {in}, ins);
      b.transition("", outs, {out});
      break;
    }
    case Block::Loop: {
      const std::string body_in = b.place(), body_out = b.place();
      b.transition("", {in}, {body_in});
      emit(b, groups[0], body_in, body_out, options, rng);
      emit(b, groups[1], body_out, body_in, options, rng);
      b.transition("", {body_out}, {out});
      break;
    }
  }
}

std::string activity_name(std::size_t i) {
  std::string name(1, static_cast<char>('A' + i % 26));
  if (i >= 26) name += std::to_string(i / 26);
  return name;
}

}  // namespace

PetriNet random_block_net(const NetGeneratorOptions& options, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> count(options.min_activities,
                                                   std::max(options.min_activities,
                                                            options.max_activities));
  const std::size_t n = std::max<std::size_t>(1, count(rng));
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(activity_name(i));
  NetBuilder b;
  const std::string source = b.place();
  const std::string sink = b.place();
  emit(b, labels, source, sink, options, rng);
  return PetriNet(b.places, b.transitions, b.arcs, {{source, 1}}, {{sink, 1}});
}

}  // namespace porc
