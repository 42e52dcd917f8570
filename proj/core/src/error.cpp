#include "megabike/error.hpp"

namespace megabike {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::MissingConstantColumn: return "MissingConstantColumn";
    case Errc::InvalidValue: return "InvalidValue";
    case Errc::GetterUndefined: return "GetterUndefined";
    case Errc::EmptyRuleList: return "EmptyRuleList";
    case Errc::ImmutableRule: return "ImmutableRule";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DuplicateRuleId: return "DuplicateRuleId";
    case Errc::UnknownBinding: return "UnknownBinding";
    case Errc::RulesetParseError: return "RulesetParseError";
    case Errc::EmptyCandidates: return "EmptyCandidates";
    case Errc::NoOccupants: return "NoOccupants";
    case Errc::AlreadyConsumed: return "AlreadyConsumed";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::IOError: return "IOError";
  }
  return "Unknown";
}

}  // namespace megabike
