#include "ctms/ast.hpp"

#include <algorithm>

namespace ctms {

IntExprPtr int_lit(Int v, SourceLoc loc) {
  return std::make_shared<const IntExpr>(IntExpr{IntExpr::Lit{v}, loc});
}
IntExprPtr int_var(Ident name, SourceLoc loc) {
  return std::make_shared<const IntExpr>(IntExpr{IntExpr::Var{std::move(name)}, loc});
}
IntExprPtr int_param(Ident name, SourceLoc loc) {
  return std::make_shared<const IntExpr>(IntExpr{IntExpr::Param{std::move(name)}, loc});
}
IntExprPtr int_read(Ident array, IntExprPtr index, SourceLoc loc) {
  return std::make_shared<const IntExpr>(
      IntExpr{IntExpr::Read{std::move(array), std::move(index)}, loc});
}
IntExprPtr int_bin(IntBinOp op, IntExprPtr lhs, IntExprPtr rhs, SourceLoc loc) {
  return std::make_shared<const IntExpr>(
      IntExpr{IntExpr::Bin{op, std::move(lhs), std::move(rhs)}, loc});
}

BoolExprPtr bool_lit(bool v, SourceLoc loc) {
  return std::make_shared<const BoolExpr>(BoolExpr{BoolExpr::Lit{v}, loc});
}
BoolExprPtr bool_cmp(CmpOp op, IntExprPtr lhs, IntExprPtr rhs, SourceLoc loc) {
  return std::make_shared<const BoolExpr>(
      BoolExpr{BoolExpr::Cmp{op, std::move(lhs), std::move(rhs)}, loc});
}
BoolExprPtr bool_and(BoolExprPtr lhs, BoolExprPtr rhs, SourceLoc loc) {
  return std::make_shared<const BoolExpr>(
      BoolExpr{BoolExpr::And{std::move(lhs), std::move(rhs)}, loc});
}
BoolExprPtr bool_or(BoolExprPtr lhs, BoolExprPtr rhs, SourceLoc loc) {
  return std::make_shared<const BoolExpr>(
      BoolExpr{BoolExpr::Or{std::move(lhs), std::move(rhs)}, loc});
}
BoolExprPtr bool_not(BoolExprPtr arg, SourceLoc loc) {
  return std::make_shared<const BoolExpr>(BoolExpr{BoolExpr::Not{std::move(arg)}, loc});
}

CmdPtr cmd_skip(SourceLoc loc) {
  return std::make_shared<const Cmd>(Cmd{Cmd::Skip{}, loc});
}
CmdPtr cmd_assign(Ident target, IntExprPtr value, SourceLoc loc) {
  return std::make_shared<const Cmd>(
      Cmd{Cmd::Assign{std::move(target), std::move(value)}, loc});
}
CmdPtr cmd_array_write(Ident array, IntExprPtr index, IntExprPtr value, SourceLoc loc) {
  return std::make_shared<const Cmd>(
      Cmd{Cmd::ArrayWrite{std::move(array), std::move(index), std::move(value)}, loc});
}
CmdPtr cmd_expr(IntExprPtr expr, SourceLoc loc) {
  return std::make_shared<const Cmd>(Cmd{Cmd::ExprStmt{std::move(expr)}, loc});
}

CmdPtr cmd_seq(std::vector<CmdPtr> cmds, SourceLoc loc) {
  std::vector<CmdPtr> flat;
  for (auto& c : cmds) {
    if (!c || is_skip(*c)) continue;
    if (const auto* s = std::get_if<Cmd::Seq>(&c->node)) {
      flat.insert(flat.end(), s->cmds.begin(), s->cmds.end());
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (flat.empty()) return cmd_skip(loc);
  if (flat.size() == 1) return flat.front();
  return std::make_shared<const Cmd>(Cmd{Cmd::Seq{std::move(flat)}, loc});
}

CmdPtr cmd_if(BoolExprPtr guard, CmdPtr then_branch, CmdPtr else_branch, SourceLoc loc) {
  if (!else_branch) else_branch = cmd_skip();
  return std::make_shared<const Cmd>(
      Cmd{Cmd::If{std::move(guard), std::move(then_branch), std::move(else_branch)}, loc});
}
CmdPtr cmd_for(Ident iter, IntExprPtr lower, IntExprPtr upper, CmdPtr body, SourceLoc loc) {
  return std::make_shared<const Cmd>(
      Cmd{Cmd::For{std::move(iter), std::move(lower), std::move(upper), std::move(body)}, loc});
}
CmdPtr cmd_while(BoolExprPtr guard, CmdPtr body, SourceLoc loc) {
  return std::make_shared<const Cmd>(Cmd{Cmd::While{std::move(guard), std::move(body)}, loc});
}
CmdPtr cmd_opaque(Ident label, std::vector<Ident> reads, std::vector<Ident> writes,
                  std::vector<Ident> frames, SourceLoc loc) {
  auto norm = [](std::vector<Ident>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  norm(reads);
  norm(writes);
  norm(frames);
  return std::make_shared<const Cmd>(Cmd{
      Cmd::Opaque{std::move(label), std::move(reads), std::move(writes), std::move(frames)},
      loc});
}

// ---- structural equality ----------------------------------------------------

bool ast_equal(const IntExpr& a, const IntExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, IntExpr::Lit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, IntExpr::Var>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, IntExpr::Param>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, IntExpr::Read>) {
          return x.array == y.array && ast_equal(*x.index, *y.index);
        } else {
          return x.op == y.op && ast_equal(*x.lhs, *y.lhs) && ast_equal(*x.rhs, *y.rhs);
        }
      },
      a.node);
}

bool ast_equal(const BoolExpr& a, const BoolExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, BoolExpr::Lit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
          return x.op == y.op && ast_equal(*x.lhs, *y.lhs) && ast_equal(*x.rhs, *y.rhs);
        } else if constexpr (std::is_same_v<T, BoolExpr::And>) {
          return ast_equal(*x.lhs, *y.lhs) && ast_equal(*x.rhs, *y.rhs);
        } else if constexpr (std::is_same_v<T, BoolExpr::Or>) {
          return ast_equal(*x.lhs, *y.lhs) && ast_equal(*x.rhs, *y.rhs);
        } else {
          return ast_equal(*x.arg, *y.arg);
        }
      },
      a.node);
}

bool ast_equal(const Cmd& a, const Cmd& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Cmd::Skip>) {
          return true;
        } else if constexpr (std::is_same_v<T, Cmd::Assign>) {
          return x.target == y.target && ast_equal(*x.value, *y.value);
        } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
          return x.array == y.array && ast_equal(*x.index, *y.index) &&
                 ast_equal(*x.value, *y.value);
        } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
          return ast_equal(*x.expr, *y.expr);
        } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
          if (x.cmds.size() != y.cmds.size()) return false;
          for (std::size_t i = 0; i < x.cmds.size(); ++i)
            if (!ast_equal(*x.cmds[i], *y.cmds[i])) return false;
          return true;
        } else if constexpr (std::is_same_v<T, Cmd::If>) {
          return ast_equal(*x.guard, *y.guard) && ast_equal(*x.then_branch, *y.then_branch) &&
                 ast_equal(*x.else_branch, *y.else_branch);
        } else if constexpr (std::is_same_v<T, Cmd::For>) {
          return x.iter == y.iter && ast_equal(*x.lower, *y.lower) &&
                 ast_equal(*x.upper, *y.upper) && ast_equal(*x.body, *y.body);
        } else if constexpr (std::is_same_v<T, Cmd::While>) {
          return ast_equal(*x.guard, *y.guard) && ast_equal(*x.body, *y.body);
        } else {
          return x.label == y.label && x.reads == y.reads && x.writes == y.writes &&
                 x.frames == y.frames;
        }
      },
      a.node);
}

bool ast_equal(const CmdPtr& a, const CmdPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return ast_equal(*a, *b);
}

bool spec_equal(const SafetySpec& a, const SafetySpec& b) {
  if (a.arrays.size() != b.arrays.size() || a.frames != b.frames) return false;
  for (std::size_t i = 0; i < a.arrays.size(); ++i)
    if (a.arrays[i].array != b.arrays[i].array || a.arrays[i].size != b.arrays[i].size)
      return false;
  return true;
}

bool program_equal(const Program& a, const Program& b) {
  return a.params == b.params && spec_equal(a.spec, b.spec) && ast_equal(a.body, b.body);
}

// ---- traversal --------------------------------------------------------------

std::size_t node_count(const Cmd& c) {
  return std::visit(
      [&](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmd::Seq>) {
          std::size_t n = 1;
          for (const auto& k : x.cmds) n += node_count(*k);
          return n;
        } else if constexpr (std::is_same_v<T, Cmd::If>) {
          return 1 + node_count(*x.then_branch) + node_count(*x.else_branch);
        } else if constexpr (std::is_same_v<T, Cmd::For>) {
          return 1 + node_count(*x.body);
        } else if constexpr (std::is_same_v<T, Cmd::While>) {
          return 1 + node_count(*x.body);
        } else {
          return 1;
        }
      },
      c.node);
}

bool is_skip(const Cmd& c) { return std::holds_alternative<Cmd::Skip>(c.node); }

static void collect_params_int(const IntExpr& e, std::set<Ident>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntExpr::Param>) {
          out.insert(x.name);
        } else if constexpr (std::is_same_v<T, IntExpr::Read>) {
          collect_params_int(*x.index, out);
        } else if constexpr (std::is_same_v<T, IntExpr::Bin>) {
          collect_params_int(*x.lhs, out);
          collect_params_int(*x.rhs, out);
        }
      },
      e.node);
}

static void collect_params_bool(const BoolExpr& e, std::set<Ident>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
          collect_params_int(*x.lhs, out);
          collect_params_int(*x.rhs, out);
        } else if constexpr (std::is_same_v<T, BoolExpr::And> ||
                             std::is_same_v<T, BoolExpr::Or>) {
          collect_params_bool(*x.lhs, out);
          collect_params_bool(*x.rhs, out);
        } else if constexpr (std::is_same_v<T, BoolExpr::Not>) {
          collect_params_bool(*x.arg, out);
        }
      },
      e.node);
}

std::set<Ident> collect_params(const IntExpr& e) {
  std::set<Ident> out;
  collect_params_int(e, out);
  return out;
}

std::set<Ident> collect_params(const Cmd& c) {
  std::set<Ident> out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmd::Assign>) {
          collect_params_int(*x.value, out);
        } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
          collect_params_int(*x.index, out);
          collect_params_int(*x.value, out);
        } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
          collect_params_int(*x.expr, out);
        } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
          for (const auto& k : x.cmds) {
            auto sub = collect_params(*k);
            out.insert(sub.begin(), sub.end());
          }
        } else if constexpr (std::is_same_v<T, Cmd::If>) {
          collect_params_bool(*x.guard, out);
          auto t = collect_params(*x.then_branch);
          auto e = collect_params(*x.else_branch);
          out.insert(t.begin(), t.end());
          out.insert(e.begin(), e.end());
        } else if constexpr (std::is_same_v<T, Cmd::For>) {
          collect_params_int(*x.lower, out);
          collect_params_int(*x.upper, out);
          auto b = collect_params(*x.body);
          out.insert(b.begin(), b.end());
        } else if constexpr (std::is_same_v<T, Cmd::While>) {
          collect_params_bool(*x.guard, out);
          auto b = collect_params(*x.body);
          out.insert(b.begin(), b.end());
        }
      },
      c.node);
  return out;
}

void collect_vars(const IntExpr& e, std::set<Ident>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntExpr::Var>) {
          out.insert(x.name);
        } else if constexpr (std::is_same_v<T, IntExpr::Read>) {
          collect_vars(*x.index, out);
        } else if constexpr (std::is_same_v<T, IntExpr::Bin>) {
          collect_vars(*x.lhs, out);
          collect_vars(*x.rhs, out);
        }
      },
      e.node);
}

void collect_vars(const BoolExpr& e, std::set<Ident>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
          collect_vars(*x.lhs, out);
          collect_vars(*x.rhs, out);
        } else if constexpr (std::is_same_v<T, BoolExpr::And> ||
                             std::is_same_v<T, BoolExpr::Or>) {
          collect_vars(*x.lhs, out);
          collect_vars(*x.rhs, out);
        } else if constexpr (std::is_same_v<T, BoolExpr::Not>) {
          collect_vars(*x.arg, out);
        }
      },
      e.node);
}

void collect_arrays_read(const IntExpr& e, std::set<Ident>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntExpr::Read>) {
          out.insert(x.array);
          collect_arrays_read(*x.index, out);
        } else if constexpr (std::is_same_v<T, IntExpr::Bin>) {
          collect_arrays_read(*x.lhs, out);
          collect_arrays_read(*x.rhs, out);
        }
      },
      e.node);
}

void collect_arrays_read(const BoolExpr& e, std::set<Ident>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
          collect_arrays_read(*x.lhs, out);
          collect_arrays_read(*x.rhs, out);
        } else if constexpr (std::is_same_v<T, BoolExpr::And> ||
                             std::is_same_v<T, BoolExpr::Or>) {
          collect_arrays_read(*x.lhs, out);
          collect_arrays_read(*x.rhs, out);
        } else if constexpr (std::is_same_v<T, BoolExpr::Not>) {
          collect_arrays_read(*x.arg, out);
        }
      },
      e.node);
}

void for_each_cmd(const CmdPtr& c, const std::function<void(const CmdPtr&)>& fn) {
  if (!c) return;
  fn(c);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmd::Seq>) {
          for (const auto& k : x.cmds) for_each_cmd(k, fn);
        } else if constexpr (std::is_same_v<T, Cmd::If>) {
          for_each_cmd(x.then_branch, fn);
          for_each_cmd(x.else_branch, fn);
        } else if constexpr (std::is_same_v<T, Cmd::For>) {
          for_each_cmd(x.body, fn);
        } else if constexpr (std::is_same_v<T, Cmd::While>) {
          for_each_cmd(x.body, fn);
        }
      },
      c->node);
}

}  // namespace ctms
