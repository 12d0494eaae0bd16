// Nondeterministic per-size checking. Array contents and opaque outputs are
// left unknown; every comparison whose outcome depends on an unknown value
// forks the execution, and all paths are explored depth-first (true branch
// first) by replaying with a growing decision tape. A Safe answer covers all
// concrete data because the forks over-approximate it; a Bug can in rare
// cases be spurious, since fork resolutions need not be jointly realizable.

#include <algorithm>
#include <optional>

#include "ctms/print.hpp"
#include "ctms/semantics.hpp"

namespace ctms {

namespace {

// Thrown to abandon the current path once its outcome is decided.
struct PathStop {};

struct NdInterp {
  const NondetOptions& opts;
  unsigned long long loopCap;
  std::map<Ident, Int> sizes;
  std::map<Ident, Int> lengths;  // array name -> cell count
  std::map<Ident, std::optional<Int>> scalars;  // nullopt = unknown value

  std::vector<char>& tape;  // fork decisions, 1 = comparison held
  std::size_t tapePos = 0;

  unsigned long long steps = 0;
  std::optional<Fault> fault;
  std::string stuck;
  Trace trace;

  NdInterp(const NondetOptions& o, unsigned long long cap, std::map<Ident, Int> szs,
           std::map<Ident, Int> lens, std::vector<char>& t)
      : opts(o), loopCap(cap), sizes(std::move(szs)), lengths(std::move(lens)), tape(t) {}

  [[noreturn]] void halt_stuck(std::string reason) {
    stuck = std::move(reason);
    throw PathStop{};
  }

  [[noreturn]] void halt_fault(SourceLoc loc, const Ident& array, Int idx, Int size,
                               FaultKind kind) {
    fault = Fault{loc, array, idx, size, kind};
    trace.steps.push_back(
        {loc, (kind == FaultKind::ReadOutOfBounds ? std::string("read ") : std::string("write ")) +
                  array.name + "[" + std::to_string(idx) + "]: out of bounds (size " +
                  std::to_string(size) + ")"});
    throw PathStop{};
  }

  void count() {
    if (++steps > opts.stepBudget) halt_stuck("step budget exceeded");
  }

  bool decide(const BoolExpr& at) {
    bool taken;
    if (tapePos < tape.size()) {
      taken = tape[tapePos] != 0;
    } else {
      tape.push_back(1);
      taken = true;
    }
    ++tapePos;
    trace.steps.push_back({at.loc, std::string(taken ? "assume " : "assume not ") +
                                       to_string(at)});
    return taken;
  }

  Int require_index(const IntExpr& e) {
    auto v = eval(e);
    if (!v) halt_stuck(e.loc.str() + ": data-dependent index");
    return *v;
  }

  // nullopt = unknown value.
  std::optional<Int> eval(const IntExpr& e) {
    return std::visit(
        [&](const auto& x) -> std::optional<Int> {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, IntExpr::Lit>) {
            return x.value;
          } else if constexpr (std::is_same_v<T, IntExpr::Var>) {
            auto it = scalars.find(x.name);
            if (it != scalars.end()) return it->second;
            auto sz = sizes.find(x.name);
            if (sz != sizes.end()) return sz->second;
            halt_stuck(e.loc.str() + ": unbound variable " + x.name.name);
          } else if constexpr (std::is_same_v<T, IntExpr::Param>) {
            halt_stuck(e.loc.str() + ": unbound param " + x.name.name);
          } else if constexpr (std::is_same_v<T, IntExpr::Read>) {
            Int idx = require_index(*x.index);
            Int len = lengths.at(x.array);
            if (idx < 0 || idx >= len)
              halt_fault(e.loc, x.array, idx, len, FaultKind::ReadOutOfBounds);
            return std::nullopt;  // cell contents are not tracked
          } else {
            auto l = eval(*x.lhs);
            auto r = eval(*x.rhs);
            if (!l || !r) return std::nullopt;
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

  bool eval(const BoolExpr& e) {
    return std::visit(
        [&](const auto& x) -> bool {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, BoolExpr::Lit>) {
            return x.value;
          } else if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
            auto l = eval(*x.lhs);
            auto r = eval(*x.rhs);
            if (!l || !r) return decide(e);
            switch (x.op) {
              case CmpOp::Lt: return *l < *r;
              case CmpOp::Le: return *l <= *r;
              case CmpOp::Gt: return *l > *r;
              case CmpOp::Ge: return *l >= *r;
              case CmpOp::Eq: return *l == *r;
              case CmpOp::Ne: return *l != *r;
            }
            return false;
          } else if constexpr (std::is_same_v<T, BoolExpr::And>) {
            return eval(*x.lhs) && eval(*x.rhs);
          } else if constexpr (std::is_same_v<T, BoolExpr::Or>) {
            return eval(*x.lhs) || eval(*x.rhs);
          } else {
            return !eval(*x.arg);
          }
        },
        e.node);
  }

  void exec(const Cmd& c) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Cmd::Skip>) {
            count();
          } else if constexpr (std::is_same_v<T, Cmd::Assign>) {
            count();
            scalars[x.target] = eval(*x.value);
          } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
            count();
            Int idx = require_index(*x.index);
            eval(*x.value);
            Int len = lengths.at(x.array);
            if (idx < 0 || idx >= len)
              halt_fault(c.loc, x.array, idx, len, FaultKind::WriteOutOfBounds);
            // Cell contents are not tracked; an in-bounds write is a no-op.
          } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
            count();
            eval(*x.expr);
          } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
            for (const auto& k : x.cmds) exec(*k);
          } else if constexpr (std::is_same_v<T, Cmd::If>) {
            count();
            if (eval(*x.guard))
              exec(*x.then_branch);
            else
              exec(*x.else_branch);
          } else if constexpr (std::is_same_v<T, Cmd::For>) {
            count();
            auto lo = eval(*x.lower);
            auto hi = eval(*x.upper);
            if (!lo || !hi) halt_stuck(c.loc.str() + ": data-dependent loop bound");
            for (Int v = *lo; v <= *hi; ++v) {
              scalars[x.iter] = v;
              exec(*x.body);
            }
            scalars.erase(x.iter);
          } else if constexpr (std::is_same_v<T, Cmd::While>) {
            unsigned long long iters = 0;
            while (true) {
              count();
              if (!eval(*x.guard)) break;
              if (++iters > loopCap)
                halt_stuck(c.loc.str() + ": while loop exceeded iteration cap " +
                           std::to_string(loopCap));
              exec(*x.body);
            }
          } else {
            count();
            for (const auto& w : x.writes) scalars[w] = std::nullopt;
          }
        },
        c.node);
  }
};

}  // namespace

SizeVerdict check_size_nondet(const CmdPtr& cmd, const SafetySpec& spec,
                              const std::map<Ident, Int>& sizeAssignment,
                              const NondetOptions& opts) {
  std::map<Ident, Int> szs;
  std::map<Ident, Int> lengths;
  Int maxsize = 0;
  for (const auto& decl : spec.arrays) {
    auto it = sizeAssignment.find(decl.size);
    if (it == sizeAssignment.end())
      throw std::invalid_argument("size variable " + decl.size.name + " not assigned");
    if (it->second < 0)
      throw std::invalid_argument("negative size for " + decl.size.name);
    szs[decl.size] = it->second;
    lengths[decl.array] = it->second;
    maxsize = std::max(maxsize, it->second);
  }
  unsigned long long cap =
      opts.loopCap ? opts.loopCap : 2 * static_cast<unsigned long long>(maxsize) + 4;

  std::vector<char> tape;
  unsigned long long paths = 0;
  std::string firstStuck;

  while (true) {
    if (paths >= opts.pathBudget) {
      auto v = SizeVerdict::inconclusive(szs, "path budget exceeded");
      v.executionsExplored = paths;
      return v;
    }

    NdInterp interp(opts, cap, szs, lengths, tape);
    bool bug = false;
    try {
      interp.exec(*cmd);
      interp.trace.terminal = Trace::Terminal::Completed;
    } catch (const PathStop&) {
      bug = interp.fault.has_value();
    }
    ++paths;

    if (bug) {
      interp.trace.terminal = Trace::Terminal::Faulted;
      interp.trace.fault = interp.fault;
      auto v = SizeVerdict::bug(szs, std::move(interp.trace));
      v.executionsExplored = paths;
      return v;
    }
    if (!interp.stuck.empty() && firstStuck.empty()) firstStuck = interp.stuck;

    // Depth-first backtrack: flip the deepest fork still on its first branch.
    while (!tape.empty() && tape.back() == 0) tape.pop_back();
    if (tape.empty()) break;
    tape.back() = 0;
  }

  if (!firstStuck.empty()) {
    auto v = SizeVerdict::inconclusive(szs, firstStuck);
    v.executionsExplored = paths;
    return v;
  }
  auto v = SizeVerdict::safe(szs, paths);
  return v;
}

}  // namespace ctms
