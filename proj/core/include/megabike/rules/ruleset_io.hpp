#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "megabike/rules/rule.hpp"
#include "megabike/rules/rule_cache.hpp"

namespace megabike::rules {

// Ruleset files are JSON Lines: one rule document per line.
//
//   {"id":"4f1c...","name":"lootbox-100","action":"TargetSelection","mutable":true,
//    "inputs":["distance","payoff","const"],"matrix":[[1,0,-100],[1.5,-1,0]],
//    "comparators":["<=","<="]}
//
// "id" is optional on input (a fresh one is generated). Blank lines and lines
// starting with '#' are skipped. A file whose first non-blank character is '['
// is read as a single JSON array of rule documents instead. Weights are written
// in shortest round-trip form, so load(save(r)) == r bit for bit.

std::string rule_to_json(const Rule& rule);
/// Errors: RulesetParseError, UnknownBinding, plus build_rule's errors.
Rule rule_from_json(const std::string& document);

void save_ruleset(std::ostream& out, std::span<const Rule> rules);
std::vector<Rule> load_ruleset(std::istream& in);

/// Errors: IOError.
void save_ruleset_file(const std::filesystem::path& path, std::span<const Rule> rules);
std::vector<Rule> load_ruleset_file(const std::filesystem::path& path);

}  // namespace megabike::rules
