#include "ctms/semantics.hpp"

#include <sstream>

#include "ctms/print.hpp"

namespace ctms {

std::string to_string(FaultKind k) {
  return k == FaultKind::ReadOutOfBounds ? "readOutOfBounds" : "writeOutOfBounds";
}

std::string to_string(SizeVerdict::Kind k) {
  switch (k) {
    case SizeVerdict::Kind::Safe: return "safe";
    case SizeVerdict::Kind::Bug: return "bug";
    case SizeVerdict::Kind::Inconclusive: return "inconclusive";
  }
  return "?";
}

SizeVerdict SizeVerdict::safe(std::map<Ident, Int> sizes, unsigned long long explored) {
  SizeVerdict v;
  v.kind = Kind::Safe;
  v.sizes = std::move(sizes);
  v.executionsExplored = explored;
  return v;
}

SizeVerdict SizeVerdict::bug(std::map<Ident, Int> sizes, Trace trace) {
  SizeVerdict v;
  v.kind = Kind::Bug;
  v.sizes = std::move(sizes);
  v.trace = std::move(trace);
  return v;
}

SizeVerdict SizeVerdict::inconclusive(std::map<Ident, Int> sizes, std::string reason) {
  SizeVerdict v;
  v.kind = Kind::Inconclusive;
  v.sizes = std::move(sizes);
  v.reason = std::move(reason);
  return v;
}

std::vector<HavocSlot> havoc_slots(const CmdPtr& cmd) {
  std::vector<HavocSlot> slots;
  for_each_cmd(cmd, [&](const CmdPtr& c) {
    if (const auto* op = std::get_if<Cmd::Opaque>(&c->node)) {
      for (const auto& w : op->writes) slots.push_back({c.get(), op->label, w});
    }
  });
  return slots;
}

namespace {

struct Interp {
  const RunOptions& opts;
  Store store;
  unsigned long long steps = 0;
  std::optional<Fault> fault;
  bool budget_hit = false;
  // Slot indices are positional over the whole command, matching havoc_slots.
  std::map<const Cmd*, std::size_t> slot_base;

  Interp(const CmdPtr& cmd, Store s, const RunOptions& o) : opts(o), store(std::move(s)) {
    auto slots = havoc_slots(cmd);
    for (std::size_t i = 0; i < slots.size(); ++i)
      slot_base.emplace(slots[i].site, i);  // first write of each opaque wins
  }

  void record(SourceLoc loc, std::string event) {
    if (!opts.trace) return;
    Trace& t = *opts.trace;
    if (t.steps.size() >= opts.traceCap) {
      t.steps.erase(t.steps.begin());
      ++t.droppedSteps;
    }
    t.steps.push_back({loc, std::move(event)});
  }

  // One unit of work per executed statement / guard evaluation.
  bool count() {
    if (++steps > opts.stepBudget) {
      budget_hit = true;
      return false;
    }
    return true;
  }

  Int read_scalar(const Ident& x, SourceLoc loc) {
    auto it = store.scalars.find(x);
    if (it != store.scalars.end()) return it->second;
    auto sz = store.sizes.find(x);
    if (sz != store.sizes.end()) return sz->second;
    throw EvalError(loc.str() + ": unbound variable " + x.name);
  }

  // nullopt signals a fault already recorded.
  std::optional<Int> eval(const IntExpr& e) {
    if (fault) return std::nullopt;
    return std::visit(
        [&](const auto& x) -> std::optional<Int> {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, IntExpr::Lit>) {
            return x.value;
          } else if constexpr (std::is_same_v<T, IntExpr::Var>) {
            return read_scalar(x.name, e.loc);
          } else if constexpr (std::is_same_v<T, IntExpr::Param>) {
            throw EvalError(e.loc.str() + ": unbound param " + x.name.name);
          } else if constexpr (std::is_same_v<T, IntExpr::Read>) {
            auto idx = eval(*x.index);
            if (!idx) return std::nullopt;
            auto arr = store.arrays.find(x.array);
            if (arr == store.arrays.end())
              throw EvalError(e.loc.str() + ": unbound array " + x.array.name);
            Int size = static_cast<Int>(arr->second.size());
            if (*idx < 0 || *idx >= size) {
              fault = Fault{e.loc, x.array, *idx, size, FaultKind::ReadOutOfBounds};
              record(e.loc, "read " + x.array.name + "[" + std::to_string(*idx) +
                                "]: out of bounds (size " + std::to_string(size) + ")");
              return std::nullopt;
            }
            return arr->second[static_cast<std::size_t>(*idx)];
          } else {
            auto l = eval(*x.lhs);
            if (!l) return std::nullopt;
            auto r = eval(*x.rhs);
            if (!r) return std::nullopt;
            switch (x.op) {
              case IntBinOp::Add: return *l + *r;
              case IntBinOp::Sub: return *l - *r;
              case IntBinOp::Mul: return *l * *r;
            }
            return std::nullopt;
          }
        },
        e.node);
  }

  std::optional<bool> eval(const BoolExpr& e) {
    if (fault) return std::nullopt;
    return std::visit(
        [&](const auto& x) -> std::optional<bool> {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, BoolExpr::Lit>) {
            return x.value;
          } else if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
            auto l = eval(*x.lhs);
            if (!l) return std::nullopt;
            auto r = eval(*x.rhs);
            if (!r) return std::nullopt;
            switch (x.op) {
              case CmpOp::Lt: return *l < *r;
              case CmpOp::Le: return *l <= *r;
              case CmpOp::Gt: return *l > *r;
              case CmpOp::Ge: return *l >= *r;
              case CmpOp::Eq: return *l == *r;
              case CmpOp::Ne: return *l != *r;
            }
            return std::nullopt;
          } else if constexpr (std::is_same_v<T, BoolExpr::And>) {
            auto l = eval(*x.lhs);
            if (!l) return std::nullopt;
            if (!*l) return false;  // short-circuit
            return eval(*x.rhs);
          } else if constexpr (std::is_same_v<T, BoolExpr::Or>) {
            auto l = eval(*x.lhs);
            if (!l) return std::nullopt;
            if (*l) return true;  // short-circuit
            return eval(*x.rhs);
          } else {
            auto a = eval(*x.arg);
            if (!a) return std::nullopt;
            return !*a;
          }
        },
        e.node);
  }

  // Returns false when execution must stop (fault or budget).
  bool exec(const Cmd& c) {
    if (fault || budget_hit) return false;
    return std::visit(
        [&](const auto& x) -> bool {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Cmd::Skip>) {
            if (!count()) return false;
            record(c.loc, "skip");
            return true;
          } else if constexpr (std::is_same_v<T, Cmd::Assign>) {
            if (!count()) return false;
            auto v = eval(*x.value);
            if (!v) return false;
            store.scalars[x.target] = *v;
            record(c.loc, x.target.name + " := " + std::to_string(*v));
            return true;
          } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
            if (!count()) return false;
            auto idx = eval(*x.index);
            if (!idx) return false;
            auto v = eval(*x.value);
            if (!v) return false;
            auto& cells = store.arrays[x.array];
            Int size = static_cast<Int>(cells.size());
            if (*idx < 0 || *idx >= size) {
              fault = Fault{c.loc, x.array, *idx, size, FaultKind::WriteOutOfBounds};
              record(c.loc, "write " + x.array.name + "[" + std::to_string(*idx) +
                                "]: out of bounds (size " + std::to_string(size) + ")");
              return false;
            }
            cells[static_cast<std::size_t>(*idx)] = *v;
            record(c.loc, x.array.name + "[" + std::to_string(*idx) +
                              "] := " + std::to_string(*v));
            return true;
          } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
            if (!count()) return false;
            auto v = eval(*x.expr);
            if (!v) return false;
            record(c.loc, to_string(*x.expr) + "  (value " + std::to_string(*v) + ")");
            return true;
          } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
            for (const auto& k : x.cmds)
              if (!exec(*k)) return false;
            return true;
          } else if constexpr (std::is_same_v<T, Cmd::If>) {
            if (!count()) return false;
            auto g = eval(*x.guard);
            if (!g) return false;
            record(c.loc, "if " + to_string(*x.guard) + ": " + (*g ? "true" : "false"));
            return exec(*g ? *x.then_branch : *x.else_branch);
          } else if constexpr (std::is_same_v<T, Cmd::For>) {
            if (!count()) return false;
            auto lo = eval(*x.lower);
            if (!lo) return false;
            auto hi = eval(*x.upper);
            if (!hi) return false;
            record(c.loc, "for " + x.iter.name + " in [" + std::to_string(*lo) + " : " +
                              std::to_string(*hi) + "]");
            for (Int i = *lo; i <= *hi; ++i) {
              store.scalars[x.iter] = i;
              if (!exec(*x.body)) return false;
            }
            store.scalars.erase(x.iter);
            return true;
          } else if constexpr (std::is_same_v<T, Cmd::While>) {
            while (true) {
              if (!count()) return false;
              auto g = eval(*x.guard);
              if (!g) return false;
              if (!*g) {
                record(c.loc, "while " + to_string(*x.guard) + ": false");
                return true;
              }
              if (!exec(*x.body)) return false;
            }
          } else {
            if (!count()) return false;
            std::ostringstream ev;
            ev << "opaque " << x.label.name;
            if (!x.writes.empty()) {
              std::size_t base = slot_base.at(&c);
              for (std::size_t i = 0; i < x.writes.size(); ++i) {
                Int v = opts.havoc ? opts.havoc(base + i) : 0;
                store.scalars[x.writes[i]] = v;
                ev << ' ' << x.writes[i].name << " := " << v;
              }
            }
            record(c.loc, ev.str());
            return true;
          }
        },
        c.node);
  }
};

}  // namespace

RunResult run_concrete(const CmdPtr& cmd, Store store, const RunOptions& opts) {
  Interp in(cmd, std::move(store), opts);
  in.exec(*cmd);
  RunResult r;
  r.store = std::move(in.store);
  r.steps = in.steps;
  if (in.fault) {
    r.terminal = Trace::Terminal::Faulted;
    r.fault = in.fault;
  } else if (in.budget_hit) {
    r.terminal = Trace::Terminal::BudgetExceeded;
  } else {
    r.terminal = Trace::Terminal::Completed;
  }
  if (opts.trace) {
    opts.trace->terminal = r.terminal;
    opts.trace->fault = r.fault;
  }
  return r;
}

}  // namespace ctms
