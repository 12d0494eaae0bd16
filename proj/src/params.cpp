#include "ctms/params.hpp"

namespace ctms {

namespace {

IntExprPtr subst(const IntExprPtr& e, const ParamBinding& b) {
  return std::visit(
      [&](const auto& x) -> IntExprPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntExpr::Param>) {
          auto it = b.find(x.name);
          if (it == b.end()) throw BindError("unbound param " + x.name.name);
          return int_lit(it->second, e->loc);
        } else if constexpr (std::is_same_v<T, IntExpr::Read>) {
          return int_read(x.array, subst(x.index, b), e->loc);
        } else if constexpr (std::is_same_v<T, IntExpr::Bin>) {
          return int_bin(x.op, subst(x.lhs, b), subst(x.rhs, b), e->loc);
        } else {
          return e;
        }
      },
      e->node);
}

BoolExprPtr subst(const BoolExprPtr& e, const ParamBinding& b) {
  return std::visit(
      [&](const auto& x) -> BoolExprPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
          return bool_cmp(x.op, subst(x.lhs, b), subst(x.rhs, b), e->loc);
        } else if constexpr (std::is_same_v<T, BoolExpr::And>) {
          return bool_and(subst(x.lhs, b), subst(x.rhs, b), e->loc);
        } else if constexpr (std::is_same_v<T, BoolExpr::Or>) {
          return bool_or(subst(x.lhs, b), subst(x.rhs, b), e->loc);
        } else if constexpr (std::is_same_v<T, BoolExpr::Not>) {
          return bool_not(subst(x.arg, b), e->loc);
        } else {
          return e;
        }
      },
      e->node);
}

}  // namespace

CmdPtr bind_params(const CmdPtr& cmd, const ParamBinding& b) {
  return std::visit(
      [&](const auto& x) -> CmdPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmd::Assign>) {
          return cmd_assign(x.target, subst(x.value, b), cmd->loc);
        } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
          return cmd_array_write(x.array, subst(x.index, b), subst(x.value, b), cmd->loc);
        } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
          return cmd_expr(subst(x.expr, b), cmd->loc);
        } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
          std::vector<CmdPtr> cmds;
          cmds.reserve(x.cmds.size());
          for (const auto& k : x.cmds) cmds.push_back(bind_params(k, b));
          return cmd_seq(std::move(cmds), cmd->loc);
        } else if constexpr (std::is_same_v<T, Cmd::If>) {
          return cmd_if(subst(x.guard, b), bind_params(x.then_branch, b),
                        bind_params(x.else_branch, b), cmd->loc);
        } else if constexpr (std::is_same_v<T, Cmd::For>) {
          return cmd_for(x.iter, subst(x.lower, b), subst(x.upper, b),
                         bind_params(x.body, b), cmd->loc);
        } else if constexpr (std::is_same_v<T, Cmd::While>) {
          return cmd_while(subst(x.guard, b), bind_params(x.body, b), cmd->loc);
        } else {
          return cmd;  // skip, opaque
        }
      },
      cmd->node);
}

Program bind_params(const Program& p, const ParamBinding& binding) {
  for (const auto& [name, value] : binding) {
    if (!p.has_param(name)) throw BindError("unknown param " + name.name);
    if (value < 0) throw BindError("negative value for param " + name.name);
  }
  for (const auto& q : p.params)
    if (!binding.count(q)) throw BindError("unbound param " + q.name);
  Program out;
  out.body = bind_params(p.body, binding);
  out.spec = p.spec;
  out.params = {};
  return out;
}

ParamBinding parse_bindings(const std::vector<std::string>& pairs) {
  ParamBinding b;
  for (const auto& s : pairs) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw BindError("malformed binding '" + s + "' (expected NAME=VALUE)");
    std::string name = s.substr(0, eq);
    std::string val = s.substr(eq + 1);
    try {
      std::size_t used = 0;
      Int v = std::stoll(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
      if (b.count(Ident{name})) throw BindError("duplicate binding for " + name);
      b[Ident{name}] = v;
    } catch (const std::invalid_argument&) {
      throw BindError("malformed value in binding '" + s + "'");
    } catch (const std::out_of_range&) {
      throw BindError("value out of range in binding '" + s + "'");
    }
  }
  return b;
}

}  // namespace ctms
