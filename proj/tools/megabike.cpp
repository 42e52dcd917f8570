#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "megabike/error.hpp"
#include "megabike/experiments/csv.hpp"
#include "megabike/experiments/harness.hpp"
#include "megabike/rules/ruleset_io.hpp"
#include "megabike/sim/config.hpp"
#include "megabike/sim/game_loop.hpp"

namespace fs = std::filesystem;
using namespace megabike;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IOError, "cannot open " + path.string() + " for writing");
  out << text;
}

void write_table(const std::optional<fs::path>& path, const experiments::CsvTable& table) {
  if (!path) {
    experiments::write_csv(std::cout, table);
    return;
  }
  experiments::emit_csv(*path, table);
  write_text(fs::path(path->string() + ".meta.json"), experiments::timer_metadata_json() + "\n");
}

struct RunOptions {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out;
};

int cmd_run(const RunOptions& o) {
  sim::SimConfig config = o.config ? sim::load_config(*o.config) : sim::SimConfig{};
  if (o.seed) config.seed = *o.seed;
  const auto metrics = sim::run_game(config);
  write_table(o.out, experiments::round_records_table(metrics));

  const auto& s = metrics.summary;
  fmt::print(stderr,
             "iterations {}  avgSurvivalRounds {:.6g}  totalLoot {:.6g}  finalRadiusBound {:.6g}\n"
             "runtimePerIteration {:.6g} ns  rulesEvaluated {}  deliberation sessions avoided {}{}\n",
             s.iterations, s.avg_survival_rounds, s.total_loot, s.final_radius_bound,
             s.runtime_per_iteration_nanos, s.rules_evaluated,
             sim::count_deliberation_avoided(metrics), s.deadlocked ? "  (stopped on deadlock)" : "");
  return 0;
}

struct GridOutputs {
  std::optional<fs::path> out;
  std::optional<fs::path> summary;
  std::optional<fs::path> gnuplot;
};

struct BenchOptions {
  std::vector<std::size_t> sizes{1, 10, 100, 1000};
  std::vector<std::size_t> agents{1, 8, 16, 32};
  std::size_t reps = 30;
  std::string strata = "both";
  std::size_t iterations = 100;
  std::size_t rounds = 100;
  double ratio = 1.0;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  GridOutputs outputs;
};

int cmd_bench(const BenchOptions& o) {
  experiments::BenchGrid grid;
  grid.ruleset_sizes = o.sizes;
  grid.agent_counts = o.agents;
  grid.repetitions = o.reps;
  grid.stratified = experiments::parse_arms(o.strata);
  grid.base.max_iterations = o.iterations;
  grid.base.max_rounds = o.rounds;
  grid.base.lootbox_ratio = o.ratio;

  const auto result = experiments::bench_stratification(grid, o.seed, o.jobs);
  write_table(o.outputs.out, experiments::bench_table(result));
  const auto summary = experiments::bench_summary_table(result);
  if (o.outputs.summary) {
    experiments::emit_csv(*o.outputs.summary, summary);
  } else {
    experiments::write_csv(std::cerr, summary);
  }
  if (o.outputs.gnuplot) {
    const auto csv = o.outputs.summary ? o.outputs.summary->string() : "bench_summary.csv";
    write_text(*o.outputs.gnuplot, experiments::bench_gnuplot_script(csv, "bench.png"));
  }
  for (const auto& m : result.trace_mismatches) {
    fmt::print(stderr, "decision traces differ between arms at {}\n", m);
  }
  return result.trace_mismatches.empty() ? 0 : 2;
}

struct ScarcityOptions {
  std::vector<double> ratios{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  std::string mutable_arm = "both";
  std::size_t reps = 30;
  std::optional<fs::path> config;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  GridOutputs outputs;
};

int cmd_scarcity(const ScarcityOptions& o) {
  experiments::ScarcityGrid grid;
  grid.ratios = o.ratios;
  grid.mutable_arm = experiments::parse_arms(o.mutable_arm);
  grid.repetitions = o.reps;
  if (o.config) grid.base = sim::load_config(*o.config);

  const auto result = experiments::run_scarcity(grid, o.seed, o.jobs);
  write_table(o.outputs.out, experiments::scarcity_table(result));
  const auto summary = experiments::scarcity_summary_table(result);
  if (o.outputs.summary) {
    experiments::emit_csv(*o.outputs.summary, summary);
  } else {
    experiments::write_csv(std::cerr, summary);
  }
  if (o.outputs.gnuplot) {
    const auto csv = o.outputs.summary ? o.outputs.summary->string() : "scarcity_summary.csv";
    write_text(*o.outputs.gnuplot, experiments::scarcity_gnuplot_script(csv, "scarcity.png"));
  }
  return 0;
}

int cmd_validate(const fs::path& path) {
  const auto rules = rules::load_ruleset_file(path);
  rules::RuleCache cache;
  for (const auto& rule : rules) cache.add(rule);

  std::map<std::string, std::size_t> per_action;
  for (auto kind : rules::kAllActionKinds) {
    per_action[std::string(rules::to_string(kind))] = cache.rules_for_action(kind).size();
  }
  fmt::print("{}: {} rules\n", path.string(), rules.size());
  for (const auto& [action, count] : per_action) fmt::print("  {:<18} {}\n", action, count);
  return 0;
}

void add_outputs(CLI::App* cmd, GridOutputs& outputs) {
  cmd->add_option("--out", outputs.out, "per-repetition CSV (default: stdout)");
  cmd->add_option("--summary", outputs.summary, "per-cell mean/stddev CSV (default: stderr)");
  cmd->add_option("--gnuplot", outputs.gnuplot, "write a gnuplot script for the summary");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Megabike social-contract simulator"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "run one simulation and emit per-round metrics");
  run_cmd->add_option("--config", run.config, "JSON config")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", run.seed, "override the config seed");
  run_cmd->add_option("--out", run.out, "metrics CSV (default: stdout)");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "stratified vs unstratified rule evaluation");
  bench_cmd->add_option("--sizes", bench.sizes, "ruleset sizes")->delimiter(',');
  bench_cmd->add_option("--agents", bench.agents, "agent counts")->delimiter(',');
  bench_cmd->add_option("--reps", bench.reps, "repetitions per cell")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--strata", bench.strata, "on | off | both")
      ->check(CLI::IsMember({"on", "off", "both"}));
  bench_cmd->add_option("--iterations", bench.iterations, "iterations per run");
  bench_cmd->add_option("--rounds", bench.rounds, "rounds per iteration");
  bench_cmd->add_option("--ratio", bench.ratio, "lootbox to agent ratio");
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--jobs", bench.jobs, "worker threads (0 = all cores)");
  add_outputs(bench_cmd, bench.outputs);

  ScarcityOptions scarcity;
  auto* scarcity_cmd = app.add_subcommand("scarcity", "survivability across lootbox ratios");
  scarcity_cmd->add_option("--ratios", scarcity.ratios, "lootbox to agent ratios")->delimiter(',');
  scarcity_cmd->add_option("--mutable", scarcity.mutable_arm, "on | off | both")
      ->check(CLI::IsMember({"on", "off", "both"}));
  scarcity_cmd->add_option("--reps", scarcity.reps, "repetitions per cell")
      ->check(CLI::PositiveNumber);
  scarcity_cmd->add_option("--config", scarcity.config, "base config (default: scarcity preset)")
      ->check(CLI::ExistingFile);
  scarcity_cmd->add_option("--seed", scarcity.seed);
  scarcity_cmd->add_option("--jobs", scarcity.jobs, "worker threads (0 = all cores)");
  add_outputs(scarcity_cmd, scarcity.outputs);

  fs::path ruleset;
  auto* validate_cmd = app.add_subcommand("validate-ruleset", "parse and check a ruleset file");
  validate_cmd->add_option("ruleset", ruleset)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*bench_cmd) return cmd_bench(bench);
    if (*scarcity_cmd) return cmd_scarcity(scarcity);
    if (*validate_cmd) return cmd_validate(ruleset);
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
