#include "megabike/rules/ruleset_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "megabike/error.hpp"

namespace megabike::rules {

namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(Errc::RulesetParseError, what);
}

json to_document(const Rule& rule) {
  json inputs = json::array();
  for (const auto& input : rule.inputs()) inputs.push_back(input.name());
  json comparators = json::array();
  for (auto cmp : rule.comparators()) comparators.push_back(std::string(to_token(cmp)));

  json doc;
  doc["id"] = rule.id().to_string();
  doc["name"] = rule.name();
  doc["action"] = std::string(to_string(rule.action()));
  doc["mutable"] = rule.is_mutable();
  doc["inputs"] = std::move(inputs);
  doc["matrix"] = rule.matrix().to_rows();
  doc["comparators"] = std::move(comparators);
  return doc;
}

template <typename T>
T required(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) parse_error(fmt::format("missing field '{}'", key));
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    parse_error(fmt::format("field '{}': {}", key, e.what()));
  }
}

Rule from_document(const json& doc) {
  if (!doc.is_object()) parse_error("rule document must be a JSON object");

  std::optional<RuleId> id;
  if (auto it = doc.find("id"); it != doc.end()) {
    if (!it->is_string()) parse_error("field 'id' must be a string");
    id = RuleId::parse(it->get<std::string>());
    if (!id) parse_error("field 'id' is not a UUID: " + it->get<std::string>());
  }

  const auto name = required<std::string>(doc, "name");
  const auto action_text = required<std::string>(doc, "action");
  const auto action = parse_action_kind(action_text);
  if (!action) parse_error(fmt::format("rule '{}': unknown action '{}'", name, action_text));
  const bool is_mutable = required<bool>(doc, "mutable");

  std::vector<InputBinding> inputs;
  for (const auto& input_name : required<std::vector<std::string>>(doc, "inputs")) {
    inputs.push_back(binding(input_name));
  }

  std::vector<Comparator> comparators;
  for (const auto& token : required<std::vector<std::string>>(doc, "comparators")) {
    auto cmp = parse_comparator(token);
    if (!cmp) parse_error(fmt::format("rule '{}': unknown comparator '{}'", name, token));
    comparators.push_back(*cmp);
  }

  const auto rows = required<std::vector<std::vector<double>>>(doc, "matrix");
  return build_rule(name, *action, is_mutable, std::move(inputs), Matrix::from_rows(rows),
                    std::move(comparators), id);
}

json parse_json(const std::string& text, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_error(fmt::format("line {}: {}", line, e.what()));
  }
}

}  // namespace

std::string rule_to_json(const Rule& rule) { return to_document(rule).dump(); }

Rule rule_from_json(const std::string& document) { return from_document(parse_json(document, 1)); }

void save_ruleset(std::ostream& out, std::span<const Rule> rules) {
  for (const Rule& rule : rules) out << rule_to_json(rule) << '\n';
}

std::vector<Rule> load_ruleset(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<Rule> rules;
  if (first == std::string::npos) return rules;

  if (text[first] == '[') {
    const json array = parse_json(text, 1);
    for (const auto& doc : array) rules.push_back(from_document(doc));
    return rules;
  }

  std::istringstream lines(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    rules.push_back(from_document(parse_json(line, number)));
  }
  return rules;
}

void save_ruleset_file(const std::filesystem::path& path, std::span<const Rule> rules) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IOError, "cannot open " + path.string() + " for writing");
  save_ruleset(out, rules);
  if (!out) throw Error(Errc::IOError, "failed writing " + path.string());
}

std::vector<Rule> load_ruleset_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IOError, "cannot open " + path.string());
  return load_ruleset(in);
}

}  // namespace megabike::rules
