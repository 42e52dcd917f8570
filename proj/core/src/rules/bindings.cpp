#include <array>
#include <string>

#include "megabike/error.hpp"
#include "megabike/rules/binding.hpp"

namespace megabike::rules {

namespace {

template <typename View, auto Member>
InputBinding::Getter field_getter() {
  return [](const Entity& entity) -> std::optional<double> {
    if (const auto* view = std::get_if<View>(&entity)) return view->*Member;
    return std::nullopt;
  };
}

InputBinding::Getter feature_getter(std::size_t index) {
  return [index](const Entity& entity) -> std::optional<double> {
    const auto* view = std::get_if<FeatureView>(&entity);
    if (view == nullptr || index >= view->values.size()) return std::nullopt;
    return view->values[index];
  };
}

constexpr std::array<std::string_view, 29> kVocabulary = {
    "distance",  "payoff",       "energy",          "energy_fraction", "contribution",
    "occupancy", "free_seats",   "threat_distance", "target_distance", "round",
    "alive_agents", "lootboxes_remaining", "const", "f0", "f1", "f2", "f3", "f4", "f5",
    "f6",        "f7",           "f8",              "f9",              "f10", "f11", "f12",
    "f13",       "f14",          "f15",
};

}  // namespace

InputBinding::InputBinding(std::string name, Getter getter)
    : impl_(std::make_shared<const Impl>(Impl{std::move(name), std::move(getter), false})) {}

InputBinding InputBinding::constant() {
  static const auto impl = std::make_shared<const Impl>(
      Impl{std::string(kConstantBindingName),
           [](const Entity&) -> std::optional<double> { return 1.0; }, true});
  return InputBinding(impl);
}

std::optional<InputBinding> find_binding(std::string_view name) {
  if (name == kConstantBindingName) return InputBinding::constant();
  if (name == "distance") return InputBinding("distance", field_getter<LootboxView, &LootboxView::distance>());
  if (name == "payoff") return InputBinding("payoff", field_getter<LootboxView, &LootboxView::payoff>());
  if (name == "energy") return InputBinding("energy", field_getter<AgentView, &AgentView::energy>());
  if (name == "energy_fraction")
    return InputBinding("energy_fraction", field_getter<AgentView, &AgentView::energy_fraction>());
  if (name == "contribution")
    return InputBinding("contribution", field_getter<AgentView, &AgentView::contribution>());
  if (name == "occupancy") return InputBinding("occupancy", field_getter<BikeView, &BikeView::occupancy>());
  if (name == "free_seats") return InputBinding("free_seats", field_getter<BikeView, &BikeView::free_seats>());
  if (name == "threat_distance")
    return InputBinding("threat_distance", field_getter<BikeView, &BikeView::threat_distance>());
  if (name == "target_distance")
    return InputBinding("target_distance", field_getter<BikeView, &BikeView::target_distance>());
  if (name == "round") return InputBinding("round", field_getter<EnvironmentView, &EnvironmentView::round>());
  if (name == "alive_agents")
    return InputBinding("alive_agents", field_getter<EnvironmentView, &EnvironmentView::alive_agents>());
  if (name == "lootboxes_remaining")
    return InputBinding("lootboxes_remaining",
                        field_getter<EnvironmentView, &EnvironmentView::lootboxes_remaining>());
  if (name.size() >= 2 && name.size() <= 3 && name[0] == 'f') {
    std::size_t index = 0;
    for (char c : name.substr(1)) {
      if (c < '0' || c > '9') return std::nullopt;
      index = index * 10 + static_cast<std::size_t>(c - '0');
    }
    if (name.size() == 3 && name[1] == '0') return std::nullopt;
    if (index < kFeatureBindingCount) return InputBinding(std::string(name), feature_getter(index));
  }
  return std::nullopt;
}

InputBinding binding(std::string_view name) {
  if (auto found = find_binding(name)) return *std::move(found);
  throw Error(Errc::UnknownBinding, "no input binding named '" + std::string(name) + "'");
}

std::vector<InputBinding> bindings(std::initializer_list<std::string_view> names) {
  std::vector<InputBinding> out;
  out.reserve(names.size());
  for (auto name : names) out.push_back(binding(name));
  return out;
}

std::span<const std::string_view> binding_vocabulary() noexcept {
  return kVocabulary;
}

}  // namespace megabike::rules
