#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctms/ast.hpp"

namespace ctms {

// Values for the symbolic constants declared with `param`; all ≥ 0.
using ParamBinding = std::map<Ident, Int>;

struct BindError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Substitutes every param leaf with its literal value. All declared params
// must be bound, all bound names declared, and all values nonnegative.
CmdPtr bind_params(const CmdPtr& cmd, const ParamBinding& binding);
Program bind_params(const Program& p, const ParamBinding& binding);

// Parses "NAME=VALUE" pairs (CLI syntax, e.g. "B=1").
ParamBinding parse_bindings(const std::vector<std::string>& pairs);

}  // namespace ctms
