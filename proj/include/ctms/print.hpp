#pragma once

#include <string>

#include "ctms/ast.hpp"

namespace ctms {

// Canonical text forms; parse(pretty_print(p)) is structurally equal to p.
std::string to_string(const IntExpr& e);
std::string to_string(const BoolExpr& e);
std::string to_string(CmpOp op);
std::string pretty_print(const Program& p);

}  // namespace ctms
