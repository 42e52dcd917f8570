#include "megabike/experiments/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "megabike/error.hpp"
#include "megabike/rng.hpp"
#include "megabike/rules/binding.hpp"
#include "megabike/sim/game_loop.hpp"

namespace megabike::experiments {

namespace {

using rules::ActionKind;

std::vector<rules::InputBinding> null_inputs(ActionKind action) {
  switch (action) {
    case ActionKind::TargetSelection: return rules::bindings({"distance", "payoff", "const"});
    case ActionKind::MovementDirective:
      return rules::bindings({"occupancy", "target_distance", "const"});
    default: return rules::bindings({"energy", "contribution", "const"});
  }
}

std::vector<bool> arm_values(Arms arms) {
  switch (arms) {
    case Arms::On: return {true};
    case Arms::Off: return {false};
    case Arms::Both: break;
  }
  return {true, false};
}

}  // namespace

Stats summarize(const std::vector<double>& values) {
  Stats s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.n - 1));
  }
  return s;
}

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& task) {
  if (jobs == 0) jobs = std::max(1U, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<rules::Rule> null_ruleset(std::size_t size) {
  std::vector<rules::Rule> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const auto action = rules::kAllActionKinds[i % rules::kActionKindCount];
    out.push_back(rules::null_rule(action, null_inputs(action), fmt::format("null-{}", i)));
  }
  return out;
}

Arms parse_arms(const std::string& text) {
  if (text == "on") return Arms::On;
  if (text == "off") return Arms::Off;
  if (text == "both") return Arms::Both;
  throw Error(Errc::ConfigInvalid, fmt::format("expected on, off or both, got '{}'", text));
}

BenchResult bench_stratification(const BenchGrid& grid, std::uint64_t seed, std::size_t jobs) {
  for (auto s : grid.ruleset_sizes) {
    if (s < 1) throw Error(Errc::ConfigInvalid, "ruleset sizes must be at least 1");
  }
  if (grid.repetitions < 1) throw Error(Errc::ConfigInvalid, "repetitions must be at least 1");

  const auto arms = arm_values(grid.stratified);
  std::vector<std::vector<rules::Rule>> rulesets;
  for (auto size : grid.ruleset_sizes) rulesets.push_back(null_ruleset(size));

  struct Task {
    std::size_t size_index, agents, rep;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < grid.ruleset_sizes.size(); ++s) {
    for (auto agents : grid.agent_counts) {
      for (std::size_t rep = 0; rep < grid.repetitions; ++rep) tasks.push_back({s, agents, rep});
    }
  }

  // results[task][arm]
  std::vector<std::vector<BenchRecord>> results(tasks.size());
  std::vector<std::string> mismatch(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const auto& task = tasks[t];
    const std::size_t size = grid.ruleset_sizes[task.size_index];
    sim::SimConfig config = grid.base;
    config.agent_count = task.agents;
    config.base_rules = rulesets[task.size_index];
    config.slack_rule.clear();
    config.record_trace = arms.size() > 1;
    // Both arms share the seed, so any divergence is the evaluator's doing.
    config.seed = mix_seed(seed, fmt::format("bench/{}/{}", size, task.agents), task.rep);

    std::vector<std::vector<sim::DecisionEvent>> traces;
    for (bool stratified : arms) {
      config.stratified = stratified;
      auto metrics = sim::run_game(config);
      results[t].push_back({size, task.agents, stratified, task.rep,
                            metrics.summary.runtime_per_iteration_nanos,
                            metrics.summary.rules_evaluated});
      traces.push_back(std::move(metrics.decisions));
    }
    if (traces.size() == 2 && traces[0] != traces[1]) {
      mismatch[t] = fmt::format("{}/{}/{}", size, task.agents, task.rep);
    }
  });

  BenchResult result;
  for (std::size_t s = 0; s < grid.ruleset_sizes.size(); ++s) {
    for (auto agents : grid.agent_counts) {
      for (std::size_t a = 0; a < arms.size(); ++a) {
        BenchCell cell{grid.ruleset_sizes[s], agents, arms[a], {}, {}};
        std::vector<double> runtime, evaluated;
        for (std::size_t t = 0; t < tasks.size(); ++t) {
          if (tasks[t].size_index != s || tasks[t].agents != agents) continue;
          const auto& rec = results[t][a];
          result.records.push_back(rec);
          runtime.push_back(rec.iter_runtime_nanos);
          evaluated.push_back(static_cast<double>(rec.rules_evaluated));
        }
        cell.runtime = summarize(runtime);
        cell.rules_evaluated = summarize(evaluated);
        result.cells.push_back(cell);
      }
    }
  }
  for (auto& m : mismatch) {
    if (!m.empty()) result.trace_mismatches.push_back(std::move(m));
  }
  return result;
}

CsvTable bench_table(const BenchResult& result) {
  CsvTable table;
  table.header = {"experiment", "rulesetSize",      "agents",        "arm",
                  "rep",        "iterRuntimeNanos", "rulesEvaluated"};
  for (const auto& r : result.records) {
    table.rows.push_back({"stratification", std::to_string(r.ruleset_size),
                          std::to_string(r.agents), r.stratified ? "stratified" : "unstratified",
                          std::to_string(r.rep), format_real(r.iter_runtime_nanos),
                          std::to_string(r.rules_evaluated)});
  }
  return table;
}

CsvTable bench_summary_table(const BenchResult& result) {
  CsvTable table;
  table.header = {"rulesetSize",         "agents",       "arm", "n", "meanIterRuntimeNanos",
                  "sdIterRuntimeNanos", "meanRulesEvaluated", "sdRulesEvaluated"};
  for (const auto& c : result.cells) {
    table.rows.push_back({std::to_string(c.ruleset_size), std::to_string(c.agents),
                          c.stratified ? "stratified" : "unstratified", std::to_string(c.runtime.n),
                          format_real(c.runtime.mean), format_real(c.runtime.stddev),
                          format_real(c.rules_evaluated.mean),
                          format_real(c.rules_evaluated.stddev)});
  }
  return table;
}

ScarcityGrid::ScarcityGrid() {
  base.agent_count = 100;
  base.max_rounds = 100;
  base.max_iterations = 1;
  sim::apply_scarcity_physics(base);
}

ScarcityResult run_scarcity(const ScarcityGrid& grid, std::uint64_t seed, std::size_t jobs) {
  for (double r : grid.ratios) {
    if (!(r >= 0.0)) throw Error(Errc::ConfigInvalid, "ratios must be non-negative");
  }
  if (grid.repetitions < 1) throw Error(Errc::ConfigInvalid, "repetitions must be at least 1");
  const auto arms = arm_values(grid.mutable_arm);

  struct Task {
    std::size_t ratio_index, arm_index, rep;
  };
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < grid.ratios.size(); ++r) {
    for (std::size_t a = 0; a < arms.size(); ++a) {
      for (std::size_t rep = 0; rep < grid.repetitions; ++rep) tasks.push_back({r, a, rep});
    }
  }

  std::vector<ScarcityRecord> records(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const auto& task = tasks[t];
    sim::SimConfig config = grid.base;
    config.lootbox_ratio = grid.ratios[task.ratio_index];
    config.is_mutable = arms[task.arm_index];
    // Paired design: the two arms of a (ratio, rep) cell see the same world.
    config.seed = mix_seed(seed, "scarcity", task.ratio_index * 1'000'000 + task.rep);
    const auto metrics = sim::run_game(config);
    records[t] = {config.lootbox_ratio, config.is_mutable, task.rep,
                  metrics.summary.avg_survival_rounds, metrics.summary.total_loot,
                  metrics.summary.final_radius_bound};
  });

  ScarcityResult result;
  result.records = records;
  for (std::size_t r = 0; r < grid.ratios.size(); ++r) {
    for (std::size_t a = 0; a < arms.size(); ++a) {
      std::vector<double> survival, radius;
      for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (tasks[t].ratio_index != r || tasks[t].arm_index != a) continue;
        survival.push_back(records[t].mean_survival_rounds);
        radius.push_back(records[t].final_radius_bound);
      }
      result.cells.push_back({grid.ratios[r], arms[a], summarize(survival), summarize(radius)});
    }
  }
  return result;
}

CsvTable scarcity_table(const ScarcityResult& result) {
  CsvTable table;
  table.header = {"ratio",     "arm",      "rep", "meanSurvivalRounds",
                  "totalLoot", "finalRadiusBound"};
  for (const auto& r : result.records) {
    table.rows.push_back({format_real(r.ratio), r.is_mutable ? "mutable" : "immutable",
                          std::to_string(r.rep), format_real(r.mean_survival_rounds),
                          format_real(r.total_loot), format_real(r.final_radius_bound)});
  }
  return table;
}

CsvTable scarcity_summary_table(const ScarcityResult& result) {
  CsvTable table;
  table.header = {"ratio",        "arm",         "n", "meanSurvivalRounds", "sdSurvivalRounds",
                  "meanFinalRadiusBound", "sdFinalRadiusBound"};
  for (const auto& c : result.cells) {
    table.rows.push_back({format_real(c.ratio), c.is_mutable ? "mutable" : "immutable",
                          std::to_string(c.survival.n), format_real(c.survival.mean),
                          format_real(c.survival.stddev), format_real(c.radius.mean),
                          format_real(c.radius.stddev)});
  }
  return table;
}

std::string bench_gnuplot_script(const std::string& summary_csv, const std::string& output_png) {
  return fmt::format(
      R"(set datafile separator ','
set terminal pngcairo size 1000,600
set output '{1}'
set key autotitle columnhead
set logscale y
set xlabel 'agents'
set ylabel 'runtime per iteration (ns)'
set title 'Rule stratification'
sizes = system("awk -F, 'NR>1 {{print $1}}' {0} | sort -n -u")
plot for [s in sizes] for [arm in "stratified unstratified"] \
  '{0}' using (strcol(1) eq s && strcol(3) eq arm ? $2 : 1/0):5:6 \
  with yerrorlines title sprintf('%s rules, %s', s, arm)
)",
      summary_csv, output_png);
}

std::string scarcity_gnuplot_script(const std::string& summary_csv,
                                    const std::string& output_png) {
  return fmt::format(
      R"(set datafile separator ','
set terminal pngcairo size 800,600
set output '{1}'
set xlabel 'lootbox to agent ratio'
set ylabel 'mean survival (rounds)'
set title 'Survivability under scarcity'
set key left top
plot '{0}' using (strcol(2) eq 'mutable' ? $1 : 1/0):4:5 with yerrorlines title 'mutable', \
     '{0}' using (strcol(2) eq 'immutable' ? $1 : 1/0):4:5 with yerrorlines title 'immutable'
)",
      summary_csv, output_png);
}

std::string timer_metadata_json() {
  using Clock = std::chrono::steady_clock;
  // Smallest observable tick over a few samples.
  std::int64_t resolution = std::numeric_limits<std::int64_t>::max();
  for (int i = 0; i < 64; ++i) {
    const auto a = Clock::now();
    auto b = Clock::now();
    while (b == a) b = Clock::now();
    resolution = std::min<std::int64_t>(
        resolution, std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count());
  }
  nlohmann::json doc;
  doc["clock"] = "steady_clock";
  doc["steady"] = Clock::is_steady;
  doc["periodNanos"] = 1e9 * static_cast<double>(Clock::period::num) /
                       static_cast<double>(Clock::period::den);
  doc["observedResolutionNanos"] = resolution;
  doc["timing"] = "wall clock per iteration, excluding setup and output";
  return doc.dump(2);
}

}  // namespace megabike::experiments
