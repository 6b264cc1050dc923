#pragma once

#include "mockingbird/contract/schema.hpp"

namespace mockingbird::contract {

/// Validates `args` against the parameter schema and re-emits it with keys in
/// declaration order (recursively). Absent optional members stay absent.
/// Throws ContractViolation naming the first offending path.
Json render_arguments(const FunctionContract& contract, const Json& args);

/// Reorders an already-valid value so object keys follow `spec` declaration order.
Json canonicalize_value(const ValueSpec& spec, const Json& value);

}  // namespace mockingbird::contract
