#include "megabike/sim/config.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "megabike/error.hpp"
#include "megabike/rules/binding.hpp"
#include "megabike/rules/ruleset_io.hpp"

namespace megabike::sim {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::ConfigInvalid, what); }

template <typename T>
void read(const json& doc, const char* key, T& out) {
  auto it = doc.find(key);
  if (it == doc.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    invalid(fmt::format("field '{}': {}", key, e.what()));
  }
}

void read_world(const json& doc, world::WorldParams& w) {
  if (!doc.is_object()) invalid("'world' must be an object");
  read(doc, "worldSide", w.world_side);
  read(doc, "threatSpeed", w.threat_speed);
  read(doc, "captureRadius", w.capture_radius);
  read(doc, "acquisitionRadius", w.acquisition_radius);
  read(doc, "K", w.force_to_displacement);
  read(doc, "threatSpawnGap", w.threat_spawn_gap);
  read(doc, "bikeSpawnSide", w.bike_spawn_side);
  read(doc, "threatPerBike", w.threat_per_bike);
  if (auto it = doc.find("payoffRange"); it != doc.end()) {
    std::vector<double> range;
    read(doc, "payoffRange", range);
    if (range.size() != 2) invalid("'payoffRange' must be [min, max]");
    w.payoff_min = range[0];
    w.payoff_max = range[1];
  }
}

void read_agent(const json& doc, agents::AgentParams& a) {
  if (!doc.is_object()) invalid("'agent' must be an object");
  read(doc, "maxEnergy", a.max_energy);
  read(doc, "initialEnergy", a.initial_energy);
  read(doc, "pedalCost", a.pedal_cost);
  read(doc, "restCost", a.rest_cost);
  read(doc, "defectProbability", a.defect_probability);
  read(doc, "slackThreshold", a.slack_threshold);
  read(doc, "slackStep", a.slack_step);
}

}  // namespace

void validate(const SimConfig& c) {
  if (c.max_iterations < 1) invalid("maxIterations must be at least 1");
  if (c.max_rounds < 1) invalid("maxRounds must be at least 1");
  if (c.agent_count < 1) invalid("agentCount must be at least 1");
  if (c.seats < 1) invalid("seats must be at least 1");
  if (!(c.lootbox_ratio >= 0.0)) invalid("lootboxRatio must be non-negative");
  if (c.deadlock_rounds < 1) invalid("deadlockRounds must be at least 1");

  const auto& w = c.world;
  if (!(w.world_side > 0.0)) invalid("worldSide must be positive");
  if (!(w.threat_speed >= 0.0)) invalid("threatSpeed must be non-negative");
  if (!(w.capture_radius >= 0.0)) invalid("captureRadius must be non-negative");
  if (!(w.acquisition_radius >= 0.0)) invalid("acquisitionRadius must be non-negative");
  if (!(w.payoff_min >= 0.0 && w.payoff_max >= w.payoff_min)) invalid("bad payoffRange");
  if (!(w.force_to_displacement > 0.0)) invalid("K must be positive");
  if (!(w.bike_spawn_side >= 0.0)) invalid("bikeSpawnSide must be non-negative");

  const auto& a = c.agent;
  if (!(a.max_energy > 0.0)) invalid("maxEnergy must be positive");
  if (!(a.initial_energy > 0.0 && a.initial_energy <= a.max_energy)) {
    invalid("initialEnergy must be in (0, maxEnergy]");
  }
  if (!(a.pedal_cost >= 0.0 && a.rest_cost >= 0.0)) invalid("energy costs must be non-negative");
  if (!(a.defect_probability >= 0.0 && a.defect_probability <= 1.0)) {
    invalid("defectProbability must be in [0, 1]");
  }
}

SimConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    invalid(e.what());
  }
  if (!doc.is_object()) invalid("config must be a JSON object");

  SimConfig c;
  read(doc, "maxIterations", c.max_iterations);
  read(doc, "maxRounds", c.max_rounds);
  read(doc, "agentCount", c.agent_count);
  read(doc, "seats", c.seats);
  read(doc, "lootboxRatio", c.lootbox_ratio);
  read(doc, "mutable", c.is_mutable);
  read(doc, "stratified", c.stratified);
  read(doc, "seed", c.seed);
  read(doc, "deadlockRounds", c.deadlock_rounds);
  read(doc, "slackRule", c.slack_rule);
  read(doc, "slackRow", c.slack_row);
  read(doc, "trace", c.record_trace);
  if (auto it = doc.find("rulesetPath"); it != doc.end() && !it->is_null()) {
    std::string path;
    read(doc, "rulesetPath", path);
    std::filesystem::path p(path);
    c.ruleset_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  if (auto it = doc.find("allocation"); it != doc.end()) {
    std::string text;
    read(doc, "allocation", text);
    auto policy = governance::parse_allocation_policy(text);
    if (!policy) invalid(fmt::format("unknown allocation policy '{}'", text));
    c.allocation = *policy;
  }
  if (auto it = doc.find("world"); it != doc.end()) read_world(*it, c.world);
  if (auto it = doc.find("agent"); it != doc.end()) read_agent(*it, c.agent);

  validate(c);
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IOError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

std::string config_to_json(const SimConfig& c) {
  json doc;
  doc["maxIterations"] = c.max_iterations;
  doc["maxRounds"] = c.max_rounds;
  doc["agentCount"] = c.agent_count;
  doc["seats"] = c.seats;
  doc["lootboxRatio"] = c.lootbox_ratio;
  doc["rulesetPath"] = c.ruleset_path ? json(c.ruleset_path->string()) : json(nullptr);
  doc["mutable"] = c.is_mutable;
  doc["stratified"] = c.stratified;
  doc["seed"] = c.seed;
  doc["allocation"] = std::string(governance::to_string(c.allocation));
  doc["deadlockRounds"] = c.deadlock_rounds;
  doc["slackRule"] = c.slack_rule;
  doc["slackRow"] = c.slack_row;
  doc["trace"] = c.record_trace;
  doc["world"] = {{"worldSide", c.world.world_side},
                  {"threatSpeed", c.world.threat_speed},
                  {"captureRadius", c.world.capture_radius},
                  {"acquisitionRadius", c.world.acquisition_radius},
                  {"payoffRange", {c.world.payoff_min, c.world.payoff_max}},
                  {"K", c.world.force_to_displacement},
                  {"threatSpawnGap", c.world.threat_spawn_gap},
                  {"bikeSpawnSide", c.world.bike_spawn_side},
                  {"threatPerBike", c.world.threat_per_bike}};
  doc["agent"] = {{"maxEnergy", c.agent.max_energy},
                  {"initialEnergy", c.agent.initial_energy},
                  {"pedalCost", c.agent.pedal_cost},
                  {"restCost", c.agent.rest_cost},
                  {"defectProbability", c.agent.defect_probability},
                  {"slackThreshold", c.agent.slack_threshold},
                  {"slackStep", c.agent.slack_step}};
  return doc.dump(2);
}

rules::Rule radius_rule(double radius, bool is_mutable, std::string name) {
  return rules::build_rule(std::move(name), rules::ActionKind::TargetSelection, is_mutable,
                           rules::bindings({"distance", "const"}),
                           rules::Matrix::from_rows({{1.0, -radius}}),
                           {rules::Comparator::LEQ});
}

std::vector<rules::Rule> resolve_base_rules(const SimConfig& config) {
  std::vector<rules::Rule> base;
  if (config.base_rules) {
    base = *config.base_rules;
  } else if (config.ruleset_path) {
    base = rules::load_ruleset_file(*config.ruleset_path);
  } else {
    base.push_back(radius_rule());
  }
  if (!config.is_mutable) {
    for (auto& rule : base) rule = rule.with_mutability(false);
  }
  return base;
}

void apply_scarcity_physics(SimConfig& config) {
  config.world.world_side = 1500.0;
  config.world.force_to_displacement = 4.0;
  config.world.payoff_min = 15.0;
  config.world.payoff_max = 60.0;
  config.world.bike_spawn_side = config.world.world_side;
  config.world.threat_per_bike = true;
  config.agent.pedal_cost = 1.0;
  config.agent.rest_cost = 1.5;
}

}  // namespace megabike::sim
