#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "megabike/rules/entity.hpp"

namespace megabike::rules {

/// Named getter turning an entity into one real-valued rule input.
/// The getter yields nullopt when it does not apply to the entity's kind.
/// Copies share the underlying getter, so bindings are cheap to pass around.
class InputBinding {
 public:
  using Getter = std::function<std::optional<double>(const Entity&)>;

  InputBinding(std::string name, Getter getter);

  const std::string& name() const noexcept { return impl_->name; }
  std::optional<double> read(const Entity& entity) const { return impl_->getter(entity); }
  bool is_constant() const noexcept { return impl_->constant; }

  /// The homogeneous coordinate every rule ends with.
  static InputBinding constant();

  friend bool operator==(const InputBinding& a, const InputBinding& b) noexcept {
    return a.name() == b.name();
  }

 private:
  struct Impl {
    std::string name;
    Getter getter;
    bool constant = false;
  };
  explicit InputBinding(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

inline constexpr std::string_view kConstantBindingName = "const";
inline constexpr std::size_t kFeatureBindingCount = 16;

/// Looks up a binding from the fixed vocabulary used by ruleset files:
///   lootbox:     distance, payoff
///   agent:       energy, energy_fraction, contribution
///   bike:        occupancy, free_seats, threat_distance, target_distance
///   environment: round, alive_agents, lootboxes_remaining
///   feature:     f0 .. f15
///   any:         const
std::optional<InputBinding> find_binding(std::string_view name);

/// Throws Error(UnknownBinding) for names outside the vocabulary.
InputBinding binding(std::string_view name);

/// Convenience: binding(name) for each name.
std::vector<InputBinding> bindings(std::initializer_list<std::string_view> names);

std::span<const std::string_view> binding_vocabulary() noexcept;

}  // namespace megabike::rules
