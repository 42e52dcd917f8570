#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

#include "expect_error.hpp"
#include "megabike/experiments/harness.hpp"

namespace mx = megabike::experiments;
namespace ms = megabike::sim;
using megabike::Errc;

TEST(Csv, FormatReal) {
  EXPECT_EQ(mx::format_real(0.5), "0.5");
  EXPECT_EQ(mx::format_real(20.0), "20");
  EXPECT_EQ(mx::format_real(123456789.0), "1.23457e+08");
  EXPECT_EQ(mx::format_real(-0.25), "-0.25");
}

TEST(Csv, EmptyTableIsHeaderOnly) {
  const auto table = mx::round_records_table(ms::RunMetrics{});
  EXPECT_EQ(mx::to_csv(table),
            "iteration,round,bikeID,aliveAgents,energyTotal,lootAcquired,radiusBound,rulesEvaluated,"
            "wallClockNanos\n");
}

TEST(Csv, OneRecordTwoLines) {
  ms::RunMetrics m;
  m.rounds.push_back({1, 2, 3, 8, 750.5, 40, 1000, 12, 999});
  EXPECT_EQ(mx::to_csv(mx::round_records_table(m)),
            "iteration,round,bikeID,aliveAgents,energyTotal,lootAcquired,radiusBound,rulesEvaluated,"
            "wallClockNanos\n1,2,3,8,750.5,40,1000,12,999\n");
}

TEST(Csv, DropColumns) {
  const mx::CsvTable t{{"a", "b", "c"}, {{"1", "2", "3"}}};
  EXPECT_EQ(mx::to_csv(mx::drop_columns(t, {"b"})), "a,c\n1,3\n");
  EXPECT_EQ(mx::to_csv(mx::drop_columns(t, {"zzz"})), mx::to_csv(t));
}

TEST(Csv, UnwritablePath) {
  EXPECT_ERRC(mx::emit_csv("/nonexistent-dir/x.csv", mx::CsvTable{{"a"}, {}}), Errc::IOError);
}

TEST(Csv, RunsAreByteIdenticalModuloTiming) {
  ms::SimConfig c;
  c.max_iterations = 2;
  c.max_rounds = 20;
  c.agent_count = 20;
  c.seed = 99;
  const auto a = mx::drop_columns(mx::round_records_table(ms::run_game(c)), {"wallClockNanos"});
  const auto b = mx::drop_columns(mx::round_records_table(ms::run_game(c)), {"wallClockNanos"});
  EXPECT_EQ(mx::to_csv(a), mx::to_csv(b));
  EXPECT_GT(a.rows.size(), 1u);
}

TEST(Stats, Summarize) {
  const auto s = mx::summarize({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stddev, 1.2909944487358056, 1e-12);
  EXPECT_EQ(s.n, 4u);
  EXPECT_EQ(mx::summarize({7}).stddev, 0.0);
  EXPECT_EQ(mx::summarize({}).n, 0u);
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(257);
  mx::parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsFirstFailure) {
  EXPECT_THROW(mx::parallel_for(10, 3,
                                [](std::size_t i) {
                                  if (i == 6) throw std::runtime_error("boom");
                                }),
               std::runtime_error);
}

TEST(NullRuleset, RoundRobinOverActions) {
  const auto rules = mx::null_ruleset(10);
  ASSERT_EQ(rules.size(), 10u);
  std::array<int, megabike::rules::kActionKindCount> per{};
  for (const auto& r : rules) ++per[static_cast<std::size_t>(r.action())];
  for (int n : per) EXPECT_EQ(n, 2);
  EXPECT_EQ(rules[3].name(), "null-3");
}

TEST(Arms, Parse) {
  EXPECT_EQ(mx::parse_arms("on"), mx::Arms::On);
  EXPECT_EQ(mx::parse_arms("both"), mx::Arms::Both);
  EXPECT_ERRC(mx::parse_arms("maybe"), Errc::ConfigInvalid);
}

TEST(Bench, UnstratifiedDoesFiveTimesTheWork) {
  mx::BenchGrid grid;
  grid.ruleset_sizes = {10, 50};
  grid.agent_counts = {8};
  grid.repetitions = 2;
  grid.base.max_iterations = 2;
  grid.base.max_rounds = 5;
  const auto result = mx::bench_stratification(grid, 3);
  EXPECT_TRUE(result.trace_mismatches.empty());
  ASSERT_EQ(result.records.size(), 2u * 2u * 2u);
  for (const auto& on : result.records) {
    if (!on.stratified) continue;
    for (const auto& off : result.records) {
      if (off.stratified || off.ruleset_size != on.ruleset_size || off.rep != on.rep) continue;
      EXPECT_GT(on.rules_evaluated, 0u);
      EXPECT_EQ(off.rules_evaluated, 5 * on.rules_evaluated);
    }
  }
  const auto table = mx::bench_table(result);
  EXPECT_EQ(table.header.front(), "experiment");
  EXPECT_EQ(table.rows.size(), result.records.size());
}

TEST(Scarcity, SmallGridShapesAndDeterminism) {
  mx::ScarcityGrid grid;
  grid.ratios = {0.0, 1.0};
  grid.repetitions = 2;
  grid.base.agent_count = 16;
  grid.base.max_rounds = 30;
  const auto a = mx::run_scarcity(grid, 5);
  const auto b = mx::run_scarcity(grid, 5, 2);
  ASSERT_EQ(a.records.size(), 2u * 2u * 2u);
  EXPECT_EQ(mx::to_csv(mx::scarcity_table(a)), mx::to_csv(mx::scarcity_table(b)));
  EXPECT_EQ(a.cells.size(), 4u);
  for (const auto& r : a.records) {
    if (!r.is_mutable) {
      EXPECT_EQ(r.final_radius_bound, 1000.0);
    }
  }
}
