#pragma once

#include <stdexcept>
#include <string>

namespace darts {

// Caller handed us something outside an operation's stated domain.
struct InvalidInput : std::invalid_argument {
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// An internal precondition between modules was broken (e.g. committing an
// infeasible super-arm). Indicates a bug in the caller, not bad user data.
struct ContractViolation : std::logic_error {
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace darts
