#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "megabike/experiments/csv.hpp"
#include "megabike/sim/config.hpp"

namespace megabike::experiments {

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1); 0 for n < 2
  std::size_t n = 0;
};

Stats summarize(const std::vector<double>& values);

/// Runs task(i) for i in [0, count) on up to `jobs` threads (0 = hardware
/// concurrency). Results land by index, so output order never depends on
/// scheduling. The first exception is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task);

/// `size` null rules, rule i bound to action i % 5 with inputs that are
/// defined on that action's candidates.
std::vector<rules::Rule> null_ruleset(std::size_t size);

enum class Arms { On, Off, Both };
Arms parse_arms(const std::string& text);  // "on" | "off" | "both"; ConfigInvalid otherwise

struct BenchGrid {
  std::vector<std::size_t> ruleset_sizes{1, 10, 100, 1000};
  std::vector<std::size_t> agent_counts{1, 8, 16, 32};
  std::size_t repetitions = 30;
  Arms stratified = Arms::Both;
  sim::SimConfig base;  // iterations, rounds, world and agent blocks
};

struct BenchRecord {
  std::size_t ruleset_size = 0;
  std::size_t agents = 0;
  bool stratified = true;
  std::size_t rep = 0;
  double iter_runtime_nanos = 0.0;
  std::uint64_t rules_evaluated = 0;
};

struct BenchCell {
  std::size_t ruleset_size = 0;
  std::size_t agents = 0;
  bool stratified = true;
  Stats runtime;
  Stats rules_evaluated;
};

struct BenchResult {
  std::vector<BenchRecord> records;
  std::vector<BenchCell> cells;
  // Repetitions (as "size/agents/rep") whose two arms decided differently.
  std::vector<std::string> trace_mismatches;
};

BenchResult bench_stratification(const BenchGrid& grid, std::uint64_t seed, std::size_t jobs = 1);

/// experiment,rulesetSize,agents,arm,rep,iterRuntimeNanos,rulesEvaluated
CsvTable bench_table(const BenchResult& result);
CsvTable bench_summary_table(const BenchResult& result);

struct ScarcityGrid {
  std::vector<double> ratios{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  Arms mutable_arm = Arms::Both;
  std::size_t repetitions = 30;
  sim::SimConfig base;  // agentCount, rounds, iterations, physics

  ScarcityGrid();
};

struct ScarcityRecord {
  double ratio = 0.0;
  bool is_mutable = true;
  std::size_t rep = 0;
  double mean_survival_rounds = 0.0;
  double total_loot = 0.0;
  double final_radius_bound = 0.0;
};

struct ScarcityCell {
  double ratio = 0.0;
  bool is_mutable = true;
  Stats survival;
  Stats radius;
};

struct ScarcityResult {
  std::vector<ScarcityRecord> records;
  std::vector<ScarcityCell> cells;
};

ScarcityResult run_scarcity(const ScarcityGrid& grid, std::uint64_t seed, std::size_t jobs = 1);

/// ratio,arm,rep,meanSurvivalRounds,totalLoot,finalRadiusBound
CsvTable scarcity_table(const ScarcityResult& result);
CsvTable scarcity_summary_table(const ScarcityResult& result);

/// gnuplot scripts that plot the summary CSVs.
std::string bench_gnuplot_script(const std::string& summary_csv, const std::string& output_png);
std::string scarcity_gnuplot_script(const std::string& summary_csv, const std::string& output_png);

/// JSON describing the clock used for timing columns.
std::string timer_metadata_json();

}  // namespace megabike::experiments
