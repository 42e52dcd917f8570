#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace megabike {

enum class Errc {
  DimensionMismatch,
  MissingConstantColumn,
  InvalidValue,
  GetterUndefined,
  EmptyRuleList,
  ImmutableRule,
  IndexOutOfRange,
  DuplicateRuleId,
  UnknownBinding,
  RulesetParseError,
  EmptyCandidates,
  NoOccupants,
  AlreadyConsumed,
  ConfigInvalid,
  IOError,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace megabike
