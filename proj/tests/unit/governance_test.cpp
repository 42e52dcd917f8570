#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "expect_error.hpp"
#include "generators.hpp"
#include "megabike/governance/megabike.hpp"

namespace mg = megabike::governance;
namespace ma = megabike::agents;
namespace mr = megabike::rules;
namespace mw = megabike::world;
using megabike::Errc;
using megabike::Rng;

namespace {

std::vector<ma::Agent> make_agents(std::size_t n) {
  std::vector<ma::Agent> agents;
  for (std::size_t i = 0; i < n; ++i) agents.push_back(ma::make_agent(i, {}));
  return agents;
}

mr::Rule radius_rule(double r = 1000) {
  return mr::build_rule("radius", mr::ActionKind::TargetSelection, true,
                        mr::bindings({"distance", "const"}), mr::Matrix::from_rows({{1, -r}}),
                        {mr::Comparator::LEQ});
}

mg::Megabike bike_with(std::vector<ma::AgentId> occupants, std::vector<ma::Agent>& agents,
                       std::size_t seats = 8) {
  mg::Megabike bike;
  bike.seats = seats;
  bike.occupants = std::move(occupants);
  for (auto id : bike.occupants) agents[id].bike = bike.id;
  return bike;
}

double sum(const std::map<ma::AgentId, double>& shares) {
  double total = 0.0;
  for (const auto& [id, v] : shares) total += v;
  return total;
}

const mg::RuleEvaluation kStratified{true, nullptr};

}  // namespace

TEST(FormBikes, CeilingPartition) {
  auto agents = make_agents(100);
  Rng rng(1);
  const auto bikes = mg::form_bikes(agents, 8, {}, mg::AllocationPolicy::Equal, rng);
  ASSERT_EQ(bikes.size(), 13u);
  std::set<ma::AgentId> seen;
  for (std::size_t b = 0; b < bikes.size(); ++b) {
    EXPECT_EQ(bikes[b].occupants.size(), b < 12 ? 8u : 4u);
    for (auto id : bikes[b].occupants) {
      EXPECT_TRUE(seen.insert(id).second);
      EXPECT_EQ(agents[id].bike, bikes[b].id);
    }
  }
  EXPECT_EQ(seen.size(), 100u);

  auto eight = make_agents(8);
  EXPECT_EQ(mg::form_bikes(eight, 8, {}, mg::AllocationPolicy::Equal, rng).size(), 1u);
}

TEST(FormBikes, DeterministicAndIndependentContracts) {
  auto a = make_agents(30), b = make_agents(30);
  mr::RuleCache base;
  base.add(radius_rule());
  Rng r1(9), r2(9);
  auto x = mg::form_bikes(a, 8, base, mg::AllocationPolicy::Equal, r1);
  const auto y = mg::form_bikes(b, 8, base, mg::AllocationPolicy::Equal, r2);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].occupants, y[i].occupants);

  const auto id = base.rules_for_action(mr::ActionKind::TargetSelection)[0].id();
  x[0].ruleset.replace(mr::apply_slack(*x[0].ruleset.find(id), 0, 0.05));
  EXPECT_EQ(x[1].ruleset.find(id)->matrix()(0, 1), -1000);
  EXPECT_EQ(base.find(id)->matrix()(0, 1), -1000);
}

TEST(ElectLeader, PluralityWithLowestIdTies) {
  auto agents = make_agents(4);
  auto bike = bike_with({1, 2, 3}, agents);
  const std::vector<ma::Ballot> ballots{{1, 2}, {2, 2}, {3, 1}};
  EXPECT_EQ(mg::elect_leader(bike, ballots), 2u);
  EXPECT_EQ(bike.leader, 2u);

  const std::vector<ma::Ballot> tie{{1, 3}, {2, 2}, {3, 1}};
  EXPECT_EQ(mg::elect_leader(bike, tie), 1u);

  mg::Megabike empty;
  EXPECT_ERRC(mg::elect_leader(empty, ballots), Errc::NoOccupants);
}

TEST(SelectTarget, SingleSurvivorSkipsVote) {
  auto agents = make_agents(3);
  auto bike = bike_with({0, 1, 2}, agents);
  bike.ruleset.add(radius_rule(100));
  const std::vector<mw::Lootbox> boxes{{0, {50, 0}, 20, false}, {1, {500, 0}, 50, false}};
  const auto d = mg::select_target(bike, boxes, agents, kStratified);
  EXPECT_EQ(d.lootbox, 0u);
  EXPECT_EQ(d.candidates, 1u);
  EXPECT_EQ(d.ballots_cast, 0u);
}

TEST(SelectTarget, NothingSurvives) {
  auto agents = make_agents(2);
  auto bike = bike_with({0, 1}, agents);
  bike.ruleset.add(radius_rule(10));
  const std::vector<mw::Lootbox> boxes{{0, {50, 0}, 20, false}};
  EXPECT_FALSE(mg::select_target(bike, boxes, agents, kStratified).lootbox);
  const std::vector<mw::Lootbox> consumed{{0, {1, 0}, 20, true}};
  EXPECT_FALSE(mg::select_target(bike, consumed, agents, kStratified).lootbox);
}

TEST(SelectTarget, VoteOverSurvivors) {
  auto agents = make_agents(3);
  auto bike = bike_with({0, 1, 2}, agents);
  // Every agent scores 60/11 above 80/51, so the vote is 3-0 for box 1.
  const std::vector<mw::Lootbox> boxes{{0, {50, 0}, 80, false}, {1, {0, 10}, 60, false}};
  const auto d = mg::select_target(bike, boxes, agents, kStratified);
  EXPECT_EQ(d.lootbox, 1u);
  EXPECT_EQ(d.ballots_cast, 3u);
}

TEST(SplitExact, EqualAndProportional) {
  const std::vector<ma::AgentId> eight{0, 1, 2, 3, 4, 5, 6, 7};
  const auto equal = mg::split_exact(40, eight, std::vector<double>(8, 0.0));
  for (const auto& [id, v] : equal) EXPECT_EQ(v, 5.0);

  const std::vector<ma::AgentId> three{0, 1, 2};
  const auto thirds = mg::split_exact(10, three, std::vector<double>(3, 1.0));
  EXPECT_EQ(sum(thirds), 10.0);
  for (const auto& [id, v] : thirds) EXPECT_NEAR(v, 10.0 / 3.0, 1e-12);

  const std::vector<double> contrib{10, 20, 30};
  const auto prop = mg::split_exact(30, three, contrib);
  EXPECT_DOUBLE_EQ(prop.at(0), 5);
  EXPECT_DOUBLE_EQ(prop.at(1), 10);
  EXPECT_DOUBLE_EQ(prop.at(2), 15);
}

TEST(SplitExactProperty, SumIsExact) {
  megabike::testing::Gen gen(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = gen.size(1, 12);
    std::vector<ma::AgentId> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<double> weights(n);
    for (auto& w : weights) w = gen.coin(0.2) ? 0.0 : gen.real(0, 50);
    const double amount = gen.real(0, 500);
    const auto shares = mg::split_exact(amount, ids, weights);
    ASSERT_EQ(shares.size(), n);
    ASSERT_EQ(sum(shares), amount) << "trial " << trial;
    for (const auto& [id, v] : shares) ASSERT_GE(v, 0.0) << "trial " << trial;
  }
}

TEST(AllocateLoot, MarksConsumedAndSkipsTheDead) {
  auto agents = make_agents(4);
  agents[3].alive = false;
  auto bike = bike_with({0, 1, 2, 3}, agents);
  mw::Lootbox box{0, {0, 0}, 30, false};
  const auto shares = mg::allocate_loot(bike, box, agents, {}, kStratified);
  EXPECT_TRUE(box.consumed);
  EXPECT_EQ(shares.size(), 3u);
  EXPECT_EQ(sum(shares), 30.0);
  EXPECT_ERRC(mg::allocate_loot(bike, box, agents, {}, kStratified), Errc::AlreadyConsumed);
}

TEST(AllocateLoot, ContributionPolicyAndAllocationRules) {
  auto agents = make_agents(3);
  agents[0].contribution = 10;
  agents[1].contribution = 20;
  agents[2].contribution = 30;
  auto bike = bike_with({0, 1, 2}, agents);
  bike.allocation = mg::AllocationPolicy::Contribution;
  mw::Lootbox box{0, {0, 0}, 30, false};
  const auto shares = mg::allocate_loot(bike, box, agents, {}, kStratified);
  EXPECT_DOUBLE_EQ(shares.at(0), 5);
  EXPECT_DOUBLE_EQ(shares.at(2), 15);

  // Only agents with contribution >= 15 are entitled.
  bike.ruleset.add(mr::build_rule("workers", mr::ActionKind::Allocation, false,
                                  mr::bindings({"contribution", "const"}),
                                  mr::Matrix::from_rows({{-1, 15}}), {mr::Comparator::LEQ}));
  mw::Lootbox second{1, {0, 0}, 50, false};
  const auto gated = mg::allocate_loot(bike, second, agents, {}, kStratified);
  EXPECT_EQ(gated.count(0), 0u);
  EXPECT_DOUBLE_EQ(gated.at(1), 20);
  EXPECT_DOUBLE_EQ(gated.at(2), 30);
}

TEST(ResolveMutations, MajorityEnactsOnce) {
  auto agents = make_agents(8);
  auto bike = bike_with({0, 1, 2, 3, 4, 5, 6, 7}, agents);
  const auto rule = radius_rule();
  bike.ruleset.add(rule);
  std::vector<mg::MutationProposal> proposals;
  for (ma::AgentId id = 0; id < 5; ++id) proposals.push_back({id, rule.id(), 0, 0.05});
  for (ma::AgentId id = 5; id < 8; ++id) proposals.push_back({id, rule.id(), 0, -0.05});
  const auto outcome = mg::resolve_mutations(bike, proposals, agents);
  EXPECT_EQ(outcome.enacted, 1u);
  EXPECT_DOUBLE_EQ(bike.ruleset.find(rule.id())->matrix()(0, 1), -1050);
}

TEST(ResolveMutations, SplitVoteChangesNothing) {
  auto agents = make_agents(8);
  auto bike = bike_with({0, 1, 2, 3, 4, 5, 6, 7}, agents);
  const auto rule = radius_rule();
  bike.ruleset.add(rule);
  std::vector<mg::MutationProposal> proposals;
  for (ma::AgentId id = 0; id < 8; ++id) proposals.push_back({id, rule.id(), 0, id < 4 ? 0.05 : -0.05});
  EXPECT_EQ(mg::resolve_mutations(bike, proposals, agents).enacted, 0u);
  EXPECT_EQ(*bike.ruleset.find(rule.id()), rule);
}

TEST(ResolveMutations, ImmutableAndForeignProposalsDropped) {
  auto agents = make_agents(4);
  auto bike = bike_with({0, 1, 2}, agents);
  const auto frozen = radius_rule().with_mutability(false);
  bike.ruleset.add(frozen);
  std::vector<mg::MutationProposal> proposals{{0, frozen.id(), 0, 0.05},
                                              {1, frozen.id(), 0, 0.05},
                                              {3, frozen.id(), 0, 0.05}};
  const auto outcome = mg::resolve_mutations(bike, proposals, agents);
  EXPECT_EQ(outcome.enacted, 0u);
  EXPECT_EQ(outcome.dropped, 3u);
}

TEST(ResolveMutations, CompoundsGeometrically) {
  auto agents = make_agents(3);
  auto bike = bike_with({0, 1, 2}, agents);
  const auto rule = radius_rule();
  bike.ruleset.add(rule);
  for (int k = 0; k < 3; ++k) {
    std::vector<mg::MutationProposal> all{{0, rule.id(), 0, 0.05}, {1, rule.id(), 0, 0.05},
                                          {2, rule.id(), 0, 0.05}};
    mg::resolve_mutations(bike, all, agents);
  }
  EXPECT_EQ(bike.ruleset.find(rule.id())->matrix()(0, 1), -1000 * 1.05 * 1.05 * 1.05);
}

TEST(Exclusion, MajorityRemovesAndDeadLeave) {
  auto agents = make_agents(8);
  auto bike = bike_with({0, 1, 2, 3, 4, 5, 6, 7}, agents);
  bike.leader = 4;
  std::vector<ma::Ballot> votes;
  for (ma::AgentId v : {0, 1, 2, 3, 5}) votes.push_back({v, 4});
  const auto excluded = mg::apply_exclusions(bike, votes, agents);
  EXPECT_EQ(excluded, std::vector<ma::AgentId>{4});
  EXPECT_EQ(bike.occupants.size(), 7u);
  EXPECT_FALSE(agents[4].bike);
  EXPECT_FALSE(bike.leader);

  agents[0].alive = false;
  mg::apply_exclusions(bike, {}, agents);
  EXPECT_EQ(bike.occupants.size(), 6u);

  const auto before = bike.occupants;
  mg::apply_exclusions(bike, {}, agents);
  EXPECT_EQ(bike.occupants, before);
}

TEST(Exclusion, EmptyBikeTerminates) {
  auto agents = make_agents(1);
  auto bike = bike_with({0}, agents);
  agents[0].alive = false;
  mg::apply_exclusions(bike, {}, agents);
  EXPECT_TRUE(bike.terminated);
}

TEST(Admission, LowestIdIntoLowestBike) {
  auto agents = make_agents(6);
  std::vector<mg::Megabike> bikes(2);
  bikes[0] = bike_with({0, 1}, agents, 3);
  bikes[1] = bike_with({2}, agents, 3);
  bikes[1].id = 1;
  agents[2].bike = 1;
  // Agents 3, 4 and 5 are unseated.
  const auto admitted = mg::admit_unseated(bikes, agents, {}, kStratified);
  EXPECT_EQ(admitted, 3u);
  EXPECT_EQ(bikes[0].occupants, (std::vector<ma::AgentId>{0, 1, 3}));
  EXPECT_EQ(bikes[1].occupants, (std::vector<ma::AgentId>{2, 4, 5}));
  EXPECT_EQ(agents[5].bike, 1u);
}

TEST(Admission, RulesCanRefuse) {
  auto agents = make_agents(3);
  agents[2].energy = 10;
  std::vector<mg::Megabike> bikes(1);
  bikes[0] = bike_with({0}, agents, 4);
  bikes[0].ruleset.add(mr::build_rule("healthy", mr::ActionKind::Admission, false,
                                      mr::bindings({"energy", "const"}),
                                      mr::Matrix::from_rows({{-1, 50}}), {mr::Comparator::LEQ}));
  EXPECT_EQ(mg::admit_unseated(bikes, agents, {}, kStratified), 1u);
  EXPECT_EQ(bikes[0].occupants, (std::vector<ma::AgentId>{0, 1}));
  EXPECT_FALSE(agents[2].bike);
}
