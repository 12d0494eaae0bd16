#include "ctms/slice.hpp"

#include <set>
#include <stdexcept>
#include <vector>

namespace ctms {

namespace {

// Dependence atoms: scalar variables, plus one "content" pseudo-variable per
// array standing for the joint value of its cells.
struct Atom {
  bool content = false;
  Ident name;
  auto operator<=>(const Atom&) const = default;
};

Atom scalar(Ident n) { return {false, std::move(n)}; }
Atom content(Ident n) { return {true, std::move(n)}; }

void expr_atoms(const IntExpr& e, std::set<Atom>& out) {
  std::set<Ident> vars, reads;
  collect_vars(e, vars);
  collect_arrays_read(e, reads);
  for (auto& v : vars) out.insert(scalar(v));
  for (auto& a : reads) out.insert(content(a));
}

void expr_atoms(const BoolExpr& e, std::set<Atom>& out) {
  std::set<Ident> vars, reads;
  collect_vars(e, vars);
  collect_arrays_read(e, reads);
  for (auto& v : vars) out.insert(scalar(v));
  for (auto& a : reads) out.insert(content(a));
}

bool reads_array(const IntExpr& e, const Ident& target) {
  std::set<Ident> reads;
  collect_arrays_read(e, reads);
  return reads.count(target) != 0;
}

bool reads_array(const BoolExpr& e, const Ident& target) {
  std::set<Ident> reads;
  collect_arrays_read(e, reads);
  return reads.count(target) != 0;
}

// One def/use record per defining statement, with the control context under
// which the definition runs. Flow-insensitive.
struct DepRec {
  std::set<Atom> defs, uses, ctrl;
};

void collect_deps(const CmdPtr& c, const std::set<Atom>& ctrl, std::vector<DepRec>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmd::Assign>) {
          DepRec r;
          r.defs.insert(scalar(x.target));
          expr_atoms(*x.value, r.uses);
          r.ctrl = ctrl;
          out.push_back(std::move(r));
        } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
          DepRec r;
          r.defs.insert(content(x.array));
          expr_atoms(*x.index, r.uses);
          expr_atoms(*x.value, r.uses);
          r.ctrl = ctrl;
          out.push_back(std::move(r));
        } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
          for (const auto& k : x.cmds) collect_deps(k, ctrl, out);
        } else if constexpr (std::is_same_v<T, Cmd::If>) {
          std::set<Atom> inner = ctrl;
          expr_atoms(*x.guard, inner);
          collect_deps(x.then_branch, inner, out);
          collect_deps(x.else_branch, inner, out);
        } else if constexpr (std::is_same_v<T, Cmd::For>) {
          DepRec r;
          r.defs.insert(scalar(x.iter));
          expr_atoms(*x.lower, r.uses);
          expr_atoms(*x.upper, r.uses);
          r.ctrl = ctrl;
          out.push_back(std::move(r));
          std::set<Atom> inner = ctrl;
          expr_atoms(*x.lower, inner);
          expr_atoms(*x.upper, inner);
          collect_deps(x.body, inner, out);
        } else if constexpr (std::is_same_v<T, Cmd::While>) {
          std::set<Atom> inner = ctrl;
          expr_atoms(*x.guard, inner);
          collect_deps(x.body, inner, out);
        } else if constexpr (std::is_same_v<T, Cmd::Opaque>) {
          DepRec r;
          for (auto& w : x.writes) r.defs.insert(scalar(w));
          for (auto& rd : x.reads) r.uses.insert(scalar(rd));
          r.ctrl = ctrl;
          if (!r.defs.empty()) out.push_back(std::move(r));
        }
        // Skip, ExprStmt: define nothing.
      },
      c->node);
}

// Seed the closure with everything a statement containing a target access
// evaluates (its whole expressions stay in the slice, so every variable they
// read must stay bound) plus the statement's control context.
void collect_seeds(const CmdPtr& c, const std::set<Atom>& ctrl, const Ident& target,
                   std::set<Atom>& R) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmd::Assign>) {
          if (reads_array(*x.value, target)) {
            expr_atoms(*x.value, R);
            R.insert(ctrl.begin(), ctrl.end());
          }
        } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
          if (x.array == target || reads_array(*x.index, target) ||
              reads_array(*x.value, target)) {
            expr_atoms(*x.index, R);
            expr_atoms(*x.value, R);
            R.insert(ctrl.begin(), ctrl.end());
          }
        } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
          if (reads_array(*x.expr, target)) {
            expr_atoms(*x.expr, R);
            R.insert(ctrl.begin(), ctrl.end());
          }
        } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
          for (const auto& k : x.cmds) collect_seeds(k, ctrl, target, R);
        } else if constexpr (std::is_same_v<T, Cmd::If>) {
          if (reads_array(*x.guard, target)) {
            expr_atoms(*x.guard, R);
            R.insert(ctrl.begin(), ctrl.end());
          }
          std::set<Atom> inner = ctrl;
          expr_atoms(*x.guard, inner);
          collect_seeds(x.then_branch, inner, target, R);
          collect_seeds(x.else_branch, inner, target, R);
        } else if constexpr (std::is_same_v<T, Cmd::For>) {
          if (reads_array(*x.lower, target) || reads_array(*x.upper, target)) {
            expr_atoms(*x.lower, R);
            expr_atoms(*x.upper, R);
            R.insert(ctrl.begin(), ctrl.end());
          }
          std::set<Atom> inner = ctrl;
          expr_atoms(*x.lower, inner);
          expr_atoms(*x.upper, inner);
          collect_seeds(x.body, inner, target, R);
        } else if constexpr (std::is_same_v<T, Cmd::While>) {
          if (reads_array(*x.guard, target)) {
            expr_atoms(*x.guard, R);
            R.insert(ctrl.begin(), ctrl.end());
          }
          std::set<Atom> inner = ctrl;
          expr_atoms(*x.guard, inner);
          collect_seeds(x.body, inner, target, R);
        }
        // Skip, Opaque: no expressions to seed from.
      },
      c->node);
}

bool stmt_has_target_access(const Cmd& c, const Ident& target) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmd::Assign>) {
          return reads_array(*x.value, target);
        } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
          return x.array == target || reads_array(*x.index, target) ||
                 reads_array(*x.value, target);
        } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
          return reads_array(*x.expr, target);
        } else {
          return false;
        }
      },
      c.node);
}

// nullptr means "dropped".
CmdPtr rebuild(const CmdPtr& c, const Ident& target, const std::set<Atom>& R) {
  return std::visit(
      [&](const auto& x) -> CmdPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmd::Skip>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, Cmd::Assign>) {
          if (R.count(scalar(x.target))) return c;
          if (reads_array(*x.value, target)) return cmd_expr(x.value, c->loc);
          return nullptr;
        } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
          if (stmt_has_target_access(*c, target) || R.count(content(x.array))) return c;
          return nullptr;
        } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
          return reads_array(*x.expr, target) ? c : nullptr;
        } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
          std::vector<CmdPtr> kept;
          for (const auto& k : x.cmds) {
            auto r = rebuild(k, target, R);
            if (r) kept.push_back(std::move(r));
          }
          if (kept.empty()) return nullptr;
          return cmd_seq(std::move(kept), c->loc);
        } else if constexpr (std::is_same_v<T, Cmd::If>) {
          auto tb = rebuild(x.then_branch, target, R);
          auto eb = rebuild(x.else_branch, target, R);
          bool guardAcc = reads_array(*x.guard, target);
          if (!tb && !eb && !guardAcc) return nullptr;
          return cmd_if(x.guard, tb ? tb : cmd_skip(), eb ? eb : cmd_skip(), c->loc);
        } else if constexpr (std::is_same_v<T, Cmd::For>) {
          auto body = rebuild(x.body, target, R);
          bool boundsAcc =
              reads_array(*x.lower, target) || reads_array(*x.upper, target);
          bool iterLive = R.count(scalar(x.iter)) != 0;
          if (!body && !boundsAcc && !iterLive) return nullptr;
          return cmd_for(x.iter, x.lower, x.upper, body ? body : cmd_skip(), c->loc);
        } else if constexpr (std::is_same_v<T, Cmd::While>) {
          auto body = rebuild(x.body, target, R);
          bool guardAcc = reads_array(*x.guard, target);
          if (!body && !guardAcc) return nullptr;
          return cmd_while(x.guard, body ? body : cmd_skip(), c->loc);
        } else {
          for (auto& w : x.writes)
            if (R.count(scalar(w))) return c;
          return nullptr;
        }
      },
      c->node);
}

// ---- while-loop collapse ----------------------------------------------------

// Scalars an opaque statement anywhere in the command may overwrite; guards
// mentioning them count as data-dependent.
std::set<Ident> opaque_written(const CmdPtr& cmd) {
  std::set<Ident> out;
  for_each_cmd(cmd, [&](const CmdPtr& c) {
    if (auto* op = std::get_if<Cmd::Opaque>(&c->node))
      out.insert(op->writes.begin(), op->writes.end());
  });
  return out;
}

bool guard_data_dependent(const BoolExpr& g, const std::set<Ident>& havocked) {
  std::set<Ident> reads, vars;
  collect_arrays_read(g, reads);
  if (!reads.empty()) return true;
  collect_vars(g, vars);
  for (auto& v : vars)
    if (havocked.count(v)) return true;
  return false;
}

// vars(e) within `allowed` and no array reads: the expression's value is
// fixed by the size, params, and the listed iterators.
bool expr_static(const IntExpr& e, const std::set<Ident>& allowed) {
  std::set<Ident> reads, vars;
  collect_arrays_read(e, reads);
  if (!reads.empty()) return false;
  collect_vars(e, vars);
  for (auto& v : vars)
    if (!allowed.count(v)) return false;
  return true;
}

bool expr_static(const BoolExpr& e, const std::set<Ident>& allowed) {
  std::set<Ident> reads, vars;
  collect_arrays_read(e, reads);
  if (!reads.empty()) return false;
  collect_vars(e, vars);
  for (auto& v : vars)
    if (!allowed.count(v)) return false;
  return true;
}

// Condition (b): no access index or data-independent guard inside the body
// can change across iterations of the enclosing while loop.
bool indices_static(const IntExpr& e, const std::set<Ident>& allowed);

void walk_index_exprs(const IntExpr& e, const std::set<Ident>& allowed, bool& ok) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntExpr::Read>) {
          if (!expr_static(*x.index, allowed)) ok = false;
          walk_index_exprs(*x.index, allowed, ok);
        } else if constexpr (std::is_same_v<T, IntExpr::Bin>) {
          walk_index_exprs(*x.lhs, allowed, ok);
          walk_index_exprs(*x.rhs, allowed, ok);
        }
      },
      e.node);
}

void walk_index_exprs(const BoolExpr& e, const std::set<Ident>& allowed, bool& ok) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
          walk_index_exprs(*x.lhs, allowed, ok);
          walk_index_exprs(*x.rhs, allowed, ok);
        } else if constexpr (std::is_same_v<T, BoolExpr::And> ||
                             std::is_same_v<T, BoolExpr::Or>) {
          walk_index_exprs(*x.lhs, allowed, ok);
          walk_index_exprs(*x.rhs, allowed, ok);
        } else if constexpr (std::is_same_v<T, BoolExpr::Not>) {
          walk_index_exprs(*x.arg, allowed, ok);
        }
      },
      e.node);
}

void check_body_static(const CmdPtr& c, std::set<Ident> allowed,
                       const std::set<Ident>& havocked, bool& ok) {
  if (!ok) return;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmd::Assign>) {
          walk_index_exprs(*x.value, allowed, ok);
        } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
          if (!expr_static(*x.index, allowed)) ok = false;
          walk_index_exprs(*x.index, allowed, ok);
          walk_index_exprs(*x.value, allowed, ok);
        } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
          walk_index_exprs(*x.expr, allowed, ok);
        } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
          for (const auto& k : x.cmds) check_body_static(k, allowed, havocked, ok);
        } else if constexpr (std::is_same_v<T, Cmd::If>) {
          if (!guard_data_dependent(*x.guard, havocked) &&
              !expr_static(*x.guard, allowed))
            ok = false;
          walk_index_exprs(*x.guard, allowed, ok);
          check_body_static(x.then_branch, allowed, havocked, ok);
          check_body_static(x.else_branch, allowed, havocked, ok);
        } else if constexpr (std::is_same_v<T, Cmd::For>) {
          bool boundsStatic =
              expr_static(*x.lower, allowed) && expr_static(*x.upper, allowed);
          walk_index_exprs(*x.lower, allowed, ok);
          walk_index_exprs(*x.upper, allowed, ok);
          std::set<Ident> inner = allowed;
          // An iterator is only as static as its bounds.
          if (boundsStatic) inner.insert(x.iter);
          check_body_static(x.body, inner, havocked, ok);
        } else if constexpr (std::is_same_v<T, Cmd::While>) {
          if (!guard_data_dependent(*x.guard, havocked) &&
              !expr_static(*x.guard, allowed))
            ok = false;
          walk_index_exprs(*x.guard, allowed, ok);
          check_body_static(x.body, allowed, havocked, ok);
        }
        // Skip, Opaque: nothing to check; havocked scalars are excluded from
        // `allowed` to begin with.
      },
      c->node);
}

// Iterators whose for-loop bounds mention the size variable; a while guard
// mentioning one of these is (indirectly) size-dependent.
void size_bound_iters(const CmdPtr& c, const Ident& size, std::set<Ident>& sizeIters) {
  for_each_cmd(c, [&](const CmdPtr& k) {
    if (auto* f = std::get_if<Cmd::For>(&k->node)) {
      std::set<Ident> vars;
      collect_vars(*f->lower, vars);
      collect_vars(*f->upper, vars);
      if (vars.count(size)) sizeIters.insert(f->iter);
    }
  });
}

CmdPtr collapse_rec(const CmdPtr& c, const SliceTargets& t,
                    const std::set<Ident>& havocked, const std::set<Ident>& sizeIters) {
  return std::visit(
      [&](const auto& x) -> CmdPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmd::Seq>) {
          std::vector<CmdPtr> out;
          bool changed = false;
          for (const auto& k : x.cmds) {
            auto r = collapse_rec(k, t, havocked, sizeIters);
            changed = changed || r != k;
            out.push_back(std::move(r));
          }
          return changed ? cmd_seq(std::move(out), c->loc) : c;
        } else if constexpr (std::is_same_v<T, Cmd::If>) {
          auto tb = collapse_rec(x.then_branch, t, havocked, sizeIters);
          auto eb = collapse_rec(x.else_branch, t, havocked, sizeIters);
          if (tb == x.then_branch && eb == x.else_branch) return c;
          return cmd_if(x.guard, std::move(tb), std::move(eb), c->loc);
        } else if constexpr (std::is_same_v<T, Cmd::For>) {
          auto body = collapse_rec(x.body, t, havocked, sizeIters);
          if (body == x.body) return c;
          return cmd_for(x.iter, x.lower, x.upper, std::move(body), c->loc);
        } else if constexpr (std::is_same_v<T, Cmd::While>) {
          auto body = collapse_rec(x.body, t, havocked, sizeIters);
          // (a) the guard must not read the size variable, directly or via an
          // iterator ranged by it.
          std::set<Ident> gvars;
          collect_vars(*x.guard, gvars);
          bool guardOk = !gvars.count(t.size);
          for (auto& v : gvars)
            if (sizeIters.count(v)) guardOk = false;
          // (b) iterating the body must not change access reachability or
          // index values.
          bool bodyOk = true;
          check_body_static(body, {t.size}, havocked, bodyOk);
          if (guardOk && bodyOk) return body;  // keep the body once
          if (body == x.body) return c;
          return cmd_while(x.guard, std::move(body), c->loc);
        } else {
          return c;
        }
      },
      c->node);
}

}  // namespace

CmdPtr dependency_slice(const CmdPtr& cmd, const SliceTargets& targets) {
  std::set<Atom> R;
  collect_seeds(cmd, {}, targets.array, R);

  std::vector<DepRec> recs;
  collect_deps(cmd, {}, recs);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : recs) {
      bool live = false;
      for (const auto& d : r.defs)
        if (R.count(d)) {
          live = true;
          break;
        }
      if (!live) continue;
      for (const auto& u : r.uses) changed = R.insert(u).second || changed;
      for (const auto& u : r.ctrl) changed = R.insert(u).second || changed;
    }
  }

  auto out = rebuild(cmd, targets.array, R);
  return out ? out : cmd_skip();
}

CmdPtr collapse_data_independent_loops(const CmdPtr& cmd, const SliceTargets& targets) {
  std::set<Ident> havocked = opaque_written(cmd);
  std::set<Ident> sizeIters;
  size_bound_iters(cmd, targets.size, sizeIters);
  return collapse_rec(cmd, targets, havocked, sizeIters);
}

CmdPtr reduce(const CmdPtr& cmd, const SliceTargets& targets) {
  CmdPtr cur = cmd;
  while (true) {
    auto next = collapse_data_independent_loops(dependency_slice(cur, targets), targets);
    if (ast_equal(next, cur)) return next;
    cur = std::move(next);
  }
}

Program reduce_program(const Program& p, const SliceTargets& targets) {
  const auto* decl = p.spec.find_array(targets.array);
  if (!decl || !(decl->size == targets.size))
    throw std::invalid_argument("array/size pair " + targets.array.name + "/" +
                                targets.size.name + " is not declared in the layout");

  Program out;
  out.params = p.params;
  out.body = reduce(p.body, targets);

  // Everything the reduced body still mentions.
  std::set<Ident> accessed, varsUsed, framesUsed;
  for_each_cmd(out.body, [&](const CmdPtr& c) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          auto grab = [&](const IntExprPtr& e) {
            collect_arrays_read(*e, accessed);
            collect_vars(*e, varsUsed);
          };
          if constexpr (std::is_same_v<T, Cmd::Assign>) {
            grab(x.value);
          } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
            accessed.insert(x.array);
            grab(x.index);
            grab(x.value);
          } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
            grab(x.expr);
          } else if constexpr (std::is_same_v<T, Cmd::If>) {
            collect_arrays_read(*x.guard, accessed);
            collect_vars(*x.guard, varsUsed);
          } else if constexpr (std::is_same_v<T, Cmd::For>) {
            grab(x.lower);
            grab(x.upper);
          } else if constexpr (std::is_same_v<T, Cmd::While>) {
            collect_arrays_read(*x.guard, accessed);
            collect_vars(*x.guard, varsUsed);
          } else if constexpr (std::is_same_v<T, Cmd::Opaque>) {
            framesUsed.insert(x.frames.begin(), x.frames.end());
          }
        },
        c->node);
  });

  for (const auto& d : p.spec.arrays)
    if (d.array == targets.array || accessed.count(d.array) || varsUsed.count(d.size))
      out.spec.arrays.push_back(d);
  for (const auto& f : p.spec.frames)
    if (framesUsed.count(f)) out.spec.frames.push_back(f);
  return out;
}

}  // namespace ctms
