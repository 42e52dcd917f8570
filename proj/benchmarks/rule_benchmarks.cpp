#include <benchmark/benchmark.h>

#include <vector>

#include "megabike/experiments/harness.hpp"
#include "megabike/rules/rule_cache.hpp"
#include "megabike/rules/stacking.hpp"

namespace mr = megabike::rules;

namespace {

std::vector<mr::Entity> lootboxes(std::size_t n) {
  std::vector<mr::Entity> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(mr::LootboxView{i, static_cast<double>(i * 37 % 1500), static_cast<double>(10 + i % 40)});
  }
  return out;
}

mr::Rule lootbox_rule() {
  return mr::build_rule("lootbox-100", mr::ActionKind::TargetSelection, true,
                        mr::bindings({"distance", "payoff", "const"}),
                        mr::Matrix::from_rows({{1, 0, -100}, {1.5, -1, 0}}),
                        {mr::Comparator::LEQ, mr::Comparator::LEQ});
}

void BM_Evaluate(benchmark::State& state) {
  const auto rule = lootbox_rule();
  const auto boxes = lootboxes(64);
  for (auto _ : state) {
    for (const auto& b : boxes) benchmark::DoNotOptimize(mr::evaluate(rule, b).passed);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(boxes.size()));
}
BENCHMARK(BM_Evaluate);

void BM_PruneStratified(benchmark::State& state) {
  const mr::RuleCache cache(megabike::experiments::null_ruleset(static_cast<std::size_t>(state.range(0))));
  const auto boxes = lootboxes(32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mr::prune_indices(boxes, cache, mr::ActionKind::TargetSelection));
  }
}
BENCHMARK(BM_PruneStratified)->Arg(10)->Arg(100)->Arg(1000);

void BM_PruneUnstratified(benchmark::State& state) {
  const mr::RuleCache cache(megabike::experiments::null_ruleset(static_cast<std::size_t>(state.range(0))));
  const auto boxes = lootboxes(32);
  for (auto _ : state) benchmark::DoNotOptimize(mr::prune_indices_unstratified(boxes, cache));
}
BENCHMARK(BM_PruneUnstratified)->Arg(10)->Arg(100)->Arg(1000);

void BM_EvaluateStacked(benchmark::State& state) {
  std::vector<mr::Rule> rules(static_cast<std::size_t>(state.range(0)), lootbox_rule());
  const auto sys = mr::stack(rules);
  const auto boxes = lootboxes(rules.size());
  const auto joint = mr::joint_inputs(sys, boxes);
  for (auto _ : state) benchmark::DoNotOptimize(mr::evaluate_stacked(sys, joint));
}
BENCHMARK(BM_EvaluateStacked)->Arg(2)->Arg(16)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
