// Exhaustive per-size checking. All |domain|^(cells + havoc slots) initial
// valuations execute in lockstep: each valuation is one bit lane, program
// state holds one symbolic value per variable/cell, and guards produce lane
// masks. For {0,1} domains and programs that only move and compare data
// (fig1's sort), every operation stays a handful of word-wide bit ops, so a
// size-25 run costs seconds instead of the days a one-at-a-time interpreter
// would need. The valuation space is partitioned into chunks (leading digits
// fixed, at most 2^18 lanes live at once) processed in lexicographic order,
// so the reported witness is exactly the one literal enumeration would find.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <set>

#include "ctms/print.hpp"
#include "ctms/semantics.hpp"

namespace ctms {

namespace {

struct Mask {
  enum class Rep : std::uint8_t { Zero, One, Dense };
  Rep rep = Rep::Zero;
  std::vector<std::uint64_t> w;  // Dense only; bits past the width are clear

  bool zero() const { return rep == Rep::Zero; }
  bool one() const { return rep == Rep::One; }
};

class MaskCtx {
 public:
  std::size_t width = 1;
  std::size_t nwords = 1;
  std::uint64_t last = 1;  // valid bits of the final word

  void init(std::size_t bits) {
    width = bits;
    nwords = (bits + 63) / 64;
    std::size_t rem = bits % 64;
    last = rem ? ((std::uint64_t(1) << rem) - 1) : ~std::uint64_t(0);
  }

  Mask zero() const { return {}; }
  Mask one() const {
    Mask m;
    m.rep = Mask::Rep::One;
    return m;
  }

  std::vector<std::uint64_t> words_of(const Mask& m) const {
    if (m.rep == Mask::Rep::Dense) return m.w;
    if (m.rep == Mask::Rep::Zero) return std::vector<std::uint64_t>(nwords, 0);
    std::vector<std::uint64_t> w(nwords, ~std::uint64_t(0));
    w[nwords - 1] = last;
    return w;
  }

  Mask pack(std::vector<std::uint64_t> w) const {
    w[nwords - 1] &= last;
    std::uint64_t any = 0;
    bool all = w[nwords - 1] == last;
    for (std::size_t i = 0; i + 1 < nwords; ++i) {
      any |= w[i];
      all = all && w[i] == ~std::uint64_t(0);
    }
    any |= w[nwords - 1];
    if (!any) return zero();
    if (all) return one();
    Mask m;
    m.rep = Mask::Rep::Dense;
    m.w = std::move(w);
    return m;
  }

  Mask m_and(const Mask& a, const Mask& b) const {
    if (a.zero() || b.zero()) return zero();
    if (a.one()) return b;
    if (b.one()) return a;
    std::vector<std::uint64_t> w(nwords);
    for (std::size_t i = 0; i < nwords; ++i) w[i] = a.w[i] & b.w[i];
    return pack(std::move(w));
  }

  Mask m_or(const Mask& a, const Mask& b) const {
    if (a.one() || b.one()) return one();
    if (a.zero()) return b;
    if (b.zero()) return a;
    std::vector<std::uint64_t> w(nwords);
    for (std::size_t i = 0; i < nwords; ++i) w[i] = a.w[i] | b.w[i];
    return pack(std::move(w));
  }

  // a & ~b
  Mask m_andnot(const Mask& a, const Mask& b) const {
    if (a.zero() || b.one()) return zero();
    if (b.zero()) return a;
    std::vector<std::uint64_t> w = words_of(a);
    for (std::size_t i = 0; i < nwords; ++i) w[i] &= ~b.w[i];
    return pack(std::move(w));
  }

  Mask m_not(const Mask& a) const {
    if (a.zero()) return one();
    if (a.one()) return zero();
    std::vector<std::uint64_t> w(nwords);
    for (std::size_t i = 0; i < nwords; ++i) w[i] = ~a.w[i];
    return pack(std::move(w));
  }

  // (a & ~sel) | (b & sel)
  Mask m_select(const Mask& a, const Mask& b, const Mask& sel) const {
    if (sel.zero()) return a;
    if (sel.one()) return b;
    std::vector<std::uint64_t> wa = words_of(a);
    std::vector<std::uint64_t> wb = words_of(b);
    std::vector<std::uint64_t> w(nwords);
    for (std::size_t i = 0; i < nwords; ++i)
      w[i] = (wa[i] & ~sel.w[i]) | (wb[i] & sel.w[i]);
    return pack(std::move(w));
  }

  bool m_equal(const Mask& a, const Mask& b) const {
    if (a.rep != b.rep) return false;
    if (a.rep != Mask::Rep::Dense) return true;
    return a.w == b.w;
  }

  long long first(const Mask& m) const {
    if (m.zero()) return -1;
    if (m.one()) return 0;
    for (std::size_t i = 0; i < nwords; ++i)
      if (m.w[i]) return static_cast<long long>(i * 64 + std::countr_zero(m.w[i]));
    return -1;
  }

  bool bit(const Mask& m, std::size_t i) const {
    if (m.zero()) return false;
    if (m.one()) return true;
    return (m.w[i / 64] >> (i % 64)) & 1;
  }
};

// One value per lane, in ascending cost of representation: every lane agrees
// (Conc), lanes split between two values along a selector mask (Pair), or one
// integer per lane (Many).
struct SVal {
  enum class K : std::uint8_t { Conc, Pair, Many };
  K k = K::Conc;
  Int a = 0;  // Conc value, or Pair value where the selector bit is 0
  Int b = 0;  // Pair value where the selector bit is 1
  Mask sel;
  std::shared_ptr<const std::vector<Int>> many;
};

Int apply_op(IntBinOp op, Int x, Int y) {
  switch (op) {
    case IntBinOp::Add: return x + y;
    case IntBinOp::Sub: return x - y;
    case IntBinOp::Mul: return x * y;
  }
  return 0;
}

bool apply_cmp(CmpOp op, Int x, Int y) {
  switch (op) {
    case CmpOp::Lt: return x < y;
    case CmpOp::Le: return x <= y;
    case CmpOp::Gt: return x > y;
    case CmpOp::Ge: return x >= y;
    case CmpOp::Eq: return x == y;
    case CmpOp::Ne: return x != y;
  }
  return false;
}

struct VecEngine {
  MaskCtx mc;
  unsigned long long stepBudget = 0;
  unsigned long long steps = 0;
  bool budget_hit = false;
  bool stop = false;

  std::map<Ident, std::vector<SVal>> arrays;
  std::map<Ident, Int> sizes;
  std::map<Ident, SVal> scalars;
  std::map<Ident, Mask> defined;
  std::vector<SVal> slot_vals;
  std::map<const Cmd*, std::size_t> slot_base;

  Mask faulted, erred;
  long long bug_lane = -1;
  long long err_lane = -1;
  std::string err_reason;

  // ---- SVal constructors ----------------------------------------------------

  SVal conc(Int v) const {
    SVal s;
    s.a = v;
    return s;
  }

  SVal pair(Int va, Int vb, Mask sel) const {
    if (va == vb || sel.zero()) return conc(va);
    if (sel.one()) return conc(vb);
    SVal s;
    s.k = SVal::K::Pair;
    s.a = va;
    s.b = vb;
    s.sel = std::move(sel);
    return s;
  }

  SVal many(std::vector<Int> vals) const {
    SVal s;
    s.k = SVal::K::Many;
    s.many = std::make_shared<const std::vector<Int>>(std::move(vals));
    return s;
  }

  std::vector<Int> mat(const SVal& s) const {
    if (s.k == SVal::K::Many) return *s.many;
    std::vector<Int> v(mc.width, s.a);
    if (s.k == SVal::K::Pair)
      for (std::size_t i = 0; i < mc.width; ++i)
        if (mc.bit(s.sel, i)) v[i] = s.b;
    return v;
  }

  Int get(const SVal& s, std::size_t lane) const {
    switch (s.k) {
      case SVal::K::Conc: return s.a;
      case SVal::K::Pair: return mc.bit(s.sel, lane) ? s.b : s.a;
      case SVal::K::Many: return (*s.many)[lane];
    }
    return 0;
  }

  std::pair<Int, Int> value_bounds(const SVal& s) const {
    switch (s.k) {
      case SVal::K::Conc: return {s.a, s.a};
      case SVal::K::Pair: return {std::min(s.a, s.b), std::max(s.a, s.b)};
      case SVal::K::Many: {
        auto [lo, hi] = std::minmax_element(s.many->begin(), s.many->end());
        return {*lo, *hi};
      }
    }
    return {0, 0};
  }

  // ---- SVal operations ------------------------------------------------------

  SVal sv_bin(IntBinOp op, const SVal& x, const SVal& y) const {
    if (x.k == SVal::K::Conc && y.k == SVal::K::Conc)
      return conc(apply_op(op, x.a, y.a));
    if (x.k == SVal::K::Conc && y.k == SVal::K::Pair)
      return pair(apply_op(op, x.a, y.a), apply_op(op, x.a, y.b), y.sel);
    if (x.k == SVal::K::Pair && y.k == SVal::K::Conc)
      return pair(apply_op(op, x.a, y.a), apply_op(op, x.b, y.a), x.sel);
    if (x.k == SVal::K::Pair && y.k == SVal::K::Pair && mc.m_equal(x.sel, y.sel))
      return pair(apply_op(op, x.a, y.a), apply_op(op, x.b, y.b), x.sel);
    std::vector<Int> vx = mat(x), vy = mat(y);
    for (std::size_t i = 0; i < mc.width; ++i) vx[i] = apply_op(op, vx[i], vy[i]);
    return many(std::move(vx));
  }

  // Mask from two booleans attached to the arms of one selector.
  Mask arm_mask(bool when0, bool when1, const Mask& sel) const {
    if (when0 && when1) return mc.one();
    if (!when0 && !when1) return mc.zero();
    return when1 ? sel : mc.m_not(sel);
  }

  Mask sv_cmp(CmpOp op, const SVal& x, const SVal& y) const {
    if (x.k == SVal::K::Conc && y.k == SVal::K::Conc)
      return apply_cmp(op, x.a, y.a) ? mc.one() : mc.zero();
    if (x.k == SVal::K::Conc && y.k == SVal::K::Pair)
      return arm_mask(apply_cmp(op, x.a, y.a), apply_cmp(op, x.a, y.b), y.sel);
    if (x.k == SVal::K::Pair && y.k == SVal::K::Conc)
      return arm_mask(apply_cmp(op, x.a, y.a), apply_cmp(op, x.b, y.a), x.sel);
    if (x.k == SVal::K::Pair && y.k == SVal::K::Pair) {
      if (mc.m_equal(x.sel, y.sel))
        return arm_mask(apply_cmp(op, x.a, y.a), apply_cmp(op, x.b, y.b), x.sel);
      // Four arm combinations over two independent selectors.
      Mask r = mc.zero();
      if (apply_cmp(op, x.a, y.a)) r = mc.m_or(r, mc.m_andnot(mc.m_not(x.sel), y.sel));
      if (apply_cmp(op, x.a, y.b)) r = mc.m_or(r, mc.m_and(mc.m_not(x.sel), y.sel));
      if (apply_cmp(op, x.b, y.a)) r = mc.m_or(r, mc.m_andnot(x.sel, y.sel));
      if (apply_cmp(op, x.b, y.b)) r = mc.m_or(r, mc.m_and(x.sel, y.sel));
      return r;
    }
    std::vector<Int> vx = mat(x), vy = mat(y);
    std::vector<std::uint64_t> w(mc.nwords, 0);
    for (std::size_t i = 0; i < mc.width; ++i)
      if (apply_cmp(op, vx[i], vy[i])) w[i / 64] |= std::uint64_t(1) << (i % 64);
    return mc.pack(std::move(w));
  }

  // Mask of lanes where the SVal's value is exactly `v` (value set must be
  // known to contain at most {a, b}).
  Mask eq_mask(const SVal& s, Int v) const {
    switch (s.k) {
      case SVal::K::Conc: return s.a == v ? mc.one() : mc.zero();
      case SVal::K::Pair:
        if (s.a == v) return mc.m_not(s.sel);
        if (s.b == v) return s.sel;
        return mc.zero();
      case SVal::K::Many: {
        std::vector<std::uint64_t> w(mc.nwords, 0);
        for (std::size_t i = 0; i < mc.width; ++i)
          if ((*s.many)[i] == v) w[i / 64] |= std::uint64_t(1) << (i % 64);
        return mc.pack(std::move(w));
      }
    }
    return mc.zero();
  }

  // Value = x where the selector bit is 0, y where it is 1.
  SVal sv_select(const SVal& x, const SVal& y, const Mask& sel) const {
    if (sel.zero()) return x;
    if (sel.one()) return y;
    if (x.k != SVal::K::Many && y.k != SVal::K::Many) {
      std::set<Int> vals{x.a};
      if (x.k == SVal::K::Pair) vals.insert(x.b);
      vals.insert(y.a);
      if (y.k == SVal::K::Pair) vals.insert(y.b);
      if (vals.size() == 1) return conc(*vals.begin());
      if (vals.size() == 2) {
        Int lo = *vals.begin(), hi = *vals.rbegin();
        Mask m = mc.m_select(eq_mask(x, hi), eq_mask(y, hi), sel);
        return pair(lo, hi, std::move(m));
      }
    }
    std::vector<Int> vx = mat(x), vy = mat(y);
    for (std::size_t i = 0; i < mc.width; ++i)
      if (mc.bit(sel, i)) vx[i] = vy[i];
    return many(std::move(vx));
  }

  Mask sv_in_range(const SVal& s, Int size) const {
    auto in = [&](Int v) { return v >= 0 && v < size; };
    switch (s.k) {
      case SVal::K::Conc: return in(s.a) ? mc.one() : mc.zero();
      case SVal::K::Pair: return arm_mask(in(s.a), in(s.b), s.sel);
      case SVal::K::Many: {
        std::vector<std::uint64_t> w(mc.nwords, 0);
        for (std::size_t i = 0; i < mc.width; ++i)
          if (in((*s.many)[i])) w[i / 64] |= std::uint64_t(1) << (i % 64);
        return mc.pack(std::move(w));
      }
    }
    return mc.zero();
  }

  // ---- events ---------------------------------------------------------------

  void fault(const Mask& hit, Mask& act) {
    Mask f = mc.m_and(hit, act);
    if (f.zero()) return;
    faulted = mc.m_or(faulted, f);
    act = mc.m_andnot(act, f);
    long long lane = mc.first(f);
    if (bug_lane < 0 || lane < bug_lane) bug_lane = lane;
  }

  void evalerr(const Mask& hit, Mask& act, const std::string& reason) {
    Mask f = mc.m_and(hit, act);
    if (f.zero()) return;
    erred = mc.m_or(erred, f);
    act = mc.m_andnot(act, f);
    long long lane = mc.first(f);
    if (err_lane < 0 || lane < err_lane) {
      err_lane = lane;
      err_reason = reason;
    }
  }

  bool count() {
    if (stop) return false;
    if (++steps > stepBudget) {
      budget_hit = true;
      stop = true;
      return false;
    }
    return true;
  }

  // ---- array access ---------------------------------------------------------

  SVal read_cell(const Ident& name, const SVal& idx, Mask& act) {
    auto& cells = arrays[name];
    Int size = static_cast<Int>(cells.size());
    Mask inb = sv_in_range(idx, size);
    fault(mc.m_andnot(act, inb), act);
    act = mc.m_and(act, inb);
    if (act.zero()) return conc(0);
    switch (idx.k) {
      case SVal::K::Conc:
        return cells[static_cast<std::size_t>(idx.a)];
      case SVal::K::Pair: {
        auto arm = [&](Int v) {
          return (v >= 0 && v < size) ? cells[static_cast<std::size_t>(v)] : conc(0);
        };
        return sv_select(arm(idx.a), arm(idx.b), idx.sel);
      }
      case SVal::K::Many: {
        std::vector<Int> out(mc.width, 0);
        for (std::size_t i = 0; i < mc.width; ++i) {
          Int ci = (*idx.many)[i];
          if (ci >= 0 && ci < size) out[i] = get(cells[static_cast<std::size_t>(ci)], i);
        }
        return many(std::move(out));
      }
    }
    return conc(0);
  }

  void write_cell(const Ident& name, const SVal& idx, const SVal& val, Mask& act) {
    auto& cells = arrays[name];
    Int size = static_cast<Int>(cells.size());
    Mask inb = sv_in_range(idx, size);
    fault(mc.m_andnot(act, inb), act);
    act = mc.m_and(act, inb);
    if (act.zero()) return;
    switch (idx.k) {
      case SVal::K::Conc: {
        auto& cell = cells[static_cast<std::size_t>(idx.a)];
        cell = sv_select(cell, val, act);
        break;
      }
      case SVal::K::Pair: {
        auto write_arm = [&](Int v, const Mask& m) {
          if (v < 0 || v >= size) return;
          Mask lanes = mc.m_and(act, m);
          if (lanes.zero()) return;
          auto& cell = cells[static_cast<std::size_t>(v)];
          cell = sv_select(cell, val, lanes);
        };
        write_arm(idx.a, mc.m_not(idx.sel));
        write_arm(idx.b, idx.sel);
        break;
      }
      case SVal::K::Many: {
        std::set<Int> targets(idx.many->begin(), idx.many->end());
        for (Int v : targets) {
          if (v < 0 || v >= size) continue;
          Mask lanes = mc.m_and(act, eq_mask(idx, v));
          if (lanes.zero()) continue;
          auto& cell = cells[static_cast<std::size_t>(v)];
          cell = sv_select(cell, val, lanes);
        }
        break;
      }
    }
  }

  // ---- expression evaluation ------------------------------------------------

  SVal eval_int(const IntExpr& e, Mask& act) {
    if (stop || act.zero()) return conc(0);
    return std::visit(
        [&](const auto& x) -> SVal {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, IntExpr::Lit>) {
            return conc(x.value);
          } else if constexpr (std::is_same_v<T, IntExpr::Var>) {
            auto sz = sizes.find(x.name);
            if (sz != sizes.end()) return conc(sz->second);
            auto dit = defined.find(x.name);
            Mask def = dit == defined.end() ? mc.zero() : dit->second;
            Mask und = mc.m_andnot(act, def);
            if (!und.zero())
              evalerr(und, act, e.loc.str() + ": unbound variable " + x.name.name);
            auto it = scalars.find(x.name);
            return it == scalars.end() ? conc(0) : it->second;
          } else if constexpr (std::is_same_v<T, IntExpr::Param>) {
            evalerr(act, act, e.loc.str() + ": unbound param " + x.name.name);
            return conc(0);
          } else if constexpr (std::is_same_v<T, IntExpr::Read>) {
            SVal idx = eval_int(*x.index, act);
            if (stop || act.zero()) return conc(0);
            return read_cell(x.array, idx, act);
          } else {
            SVal l = eval_int(*x.lhs, act);
            SVal r = eval_int(*x.rhs, act);
            if (stop || act.zero()) return conc(0);
            return sv_bin(x.op, l, r);
          }
        },
        e.node);
  }

  Mask eval_bool(const BoolExpr& e, Mask& act) {
    if (stop || act.zero()) return mc.zero();
    return std::visit(
        [&](const auto& x) -> Mask {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, BoolExpr::Lit>) {
            return x.value ? mc.one() : mc.zero();
          } else if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
            SVal l = eval_int(*x.lhs, act);
            SVal r = eval_int(*x.rhs, act);
            if (stop || act.zero()) return mc.zero();
            return sv_cmp(x.op, l, r);
          } else if constexpr (std::is_same_v<T, BoolExpr::And>) {
            Mask l = eval_bool(*x.lhs, act);
            Mask ra = mc.m_and(act, l);
            Mask r = eval_bool(*x.rhs, ra);
            act = mc.m_or(mc.m_andnot(act, l), ra);
            return mc.m_and(l, r);
          } else if constexpr (std::is_same_v<T, BoolExpr::Or>) {
            Mask l = eval_bool(*x.lhs, act);
            Mask ra = mc.m_andnot(act, l);
            Mask r = eval_bool(*x.rhs, ra);
            act = mc.m_or(mc.m_and(act, l), ra);
            return mc.m_or(l, mc.m_and(r, ra));
          } else {
            return mc.m_not(eval_bool(*x.arg, act));
          }
        },
        e.node);
  }

  // ---- statement execution --------------------------------------------------

  void exec(const Cmd& c, Mask& act) {
    if (stop || act.zero()) return;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Cmd::Skip>) {
            count();
          } else if constexpr (std::is_same_v<T, Cmd::Assign>) {
            if (!count()) return;
            SVal v = eval_int(*x.value, act);
            if (stop || act.zero()) return;
            assign(x.target, v, act);
          } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
            if (!count()) return;
            SVal idx = eval_int(*x.index, act);
            SVal v = eval_int(*x.value, act);
            if (stop || act.zero()) return;
            write_cell(x.array, idx, v, act);
          } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
            if (!count()) return;
            eval_int(*x.expr, act);
          } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
            for (const auto& k : x.cmds) {
              if (stop) return;
              exec(*k, act);
            }
          } else if constexpr (std::is_same_v<T, Cmd::If>) {
            if (!count()) return;
            Mask g = eval_bool(*x.guard, act);
            Mask ta = mc.m_and(act, g);
            Mask ea = mc.m_andnot(act, g);
            exec(*x.then_branch, ta);
            if (stop) return;
            exec(*x.else_branch, ea);
            act = mc.m_or(ta, ea);
          } else if constexpr (std::is_same_v<T, Cmd::For>) {
            if (!count()) return;
            SVal lo = eval_int(*x.lower, act);
            SVal hi = eval_int(*x.upper, act);
            if (stop || act.zero()) return;
            if (lo.k == SVal::K::Conc && hi.k == SVal::K::Conc) {
              for (Int v = lo.a; v <= hi.a; ++v) {
                if (stop || act.zero()) break;
                scalars[x.iter] = conc(v);
                defined[x.iter] = mc.one();
                exec(*x.body, act);
              }
            } else {
              // Per-lane trip counts: iterate the widest possible range and
              // gate each iteration on lo <= v <= hi.
              Int vmin = value_bounds(lo).first;
              Int vmax = value_bounds(hi).second;
              for (Int v = vmin; v <= vmax; ++v) {
                if (stop || act.zero()) break;
                Mask inr = mc.m_and(sv_cmp(CmpOp::Le, lo, conc(v)),
                                    sv_cmp(CmpOp::Ge, hi, conc(v)));
                Mask ia = mc.m_and(act, inr);
                if (ia.zero()) continue;
                Mask before = ia;
                scalars[x.iter] = conc(v);
                defined[x.iter] = mc.one();
                exec(*x.body, ia);
                act = mc.m_andnot(act, mc.m_andnot(before, ia));
              }
            }
            scalars.erase(x.iter);
            defined.erase(x.iter);
          } else if constexpr (std::is_same_v<T, Cmd::While>) {
            Mask done = mc.zero();
            while (true) {
              if (!count()) break;
              Mask g = eval_bool(*x.guard, act);
              done = mc.m_or(done, mc.m_andnot(act, g));
              act = mc.m_and(act, g);
              if (act.zero() || stop) break;
              exec(*x.body, act);
              if (stop) break;
            }
            act = mc.m_or(done, act);
          } else {
            if (!count()) return;
            if (!x.writes.empty()) {
              std::size_t base = slot_base.at(&c);
              for (std::size_t i = 0; i < x.writes.size(); ++i)
                assign(x.writes[i], slot_vals[base + i], act);
            }
          }
        },
        c.node);
  }

  void assign(const Ident& target, const SVal& v, const Mask& act) {
    auto it = scalars.find(target);
    SVal old = it == scalars.end() ? conc(0) : it->second;
    scalars[target] = sv_select(old, v, act);
    auto dit = defined.find(target);
    defined[target] = dit == defined.end() ? act : mc.m_or(dit->second, act);
  }
};

// Identity of one valuation-space digit: an array cell or a havoc slot.
struct Digit {
  bool is_cell;
  Ident array;
  std::size_t index;  // cell index, or slot number
};

unsigned long long ipow(unsigned long long base, std::size_t exp) {
  unsigned long long r = 1;
  while (exp--) r *= base;
  return r;
}

}  // namespace

SizeVerdict check_size_exhaustive(const CmdPtr& cmd, const SafetySpec& spec,
                                  const std::map<Ident, Int>& sizeAssignment,
                                  const ExhaustiveOptions& opts) {
  if (opts.valueDomain.empty()) throw std::invalid_argument("empty valueDomain");
  std::vector<Int> domain = opts.valueDomain;
  std::sort(domain.begin(), domain.end());
  domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
  const std::size_t d = domain.size();

  std::map<Ident, Int> szs;
  for (const auto& decl : spec.arrays) {
    auto it = sizeAssignment.find(decl.size);
    if (it == sizeAssignment.end())
      throw std::invalid_argument("size variable " + decl.size.name + " not assigned");
    if (it->second < 0)
      throw std::invalid_argument("negative size for " + decl.size.name);
    szs[decl.size] = it->second;
  }

  // Valuation digits: cells in spec order (indices ascending), then havoc
  // slots in program order. The first digit is the most significant.
  std::vector<Digit> digits;
  for (const auto& decl : spec.arrays)
    for (Int i = 0; i < szs[decl.size]; ++i)
      digits.push_back({true, decl.array, static_cast<std::size_t>(i)});
  auto slots = havoc_slots(cmd);
  for (std::size_t i = 0; i < slots.size(); ++i) digits.push_back({false, {}, i});
  const std::size_t K = digits.size();

  unsigned long long total = 1;
  for (std::size_t k = 0; k < K; ++k) {
    if (total > opts.spaceCap / d) {
      return SizeVerdict::inconclusive(
          szs, "valuation space " + std::to_string(d) + "^" + std::to_string(K) +
                   " exceeds cap " + std::to_string(opts.spaceCap));
    }
    total *= d;
  }
  if (total > opts.spaceCap)
    return SizeVerdict::inconclusive(szs, "valuation space exceeds cap");

  // Lane width: as many trailing digits as fit in 2^18 lanes per chunk.
  std::size_t kS = 0;
  unsigned long long width = 1;
  while (kS < K && width * d <= (1ull << 18)) {
    width *= d;
    ++kS;
  }
  const unsigned long long chunks = total / width;
  const std::size_t prefixCount = K - kS;

  VecEngine eng;
  eng.mc.init(static_cast<std::size_t>(width));
  eng.stepBudget = opts.stepBudget;
  for (std::size_t i = 0; i < slots.size(); ++i)
    eng.slot_base.emplace(slots[i].site, i);

  // Suffix digit templates are identical across chunks; build them once.
  // Suffix position t has stride d^(kS-1-t): lane -> domain[(lane/stride) % d].
  std::vector<SVal> suffix_tmpl(kS);
  for (std::size_t t = 0; t < kS; ++t) {
    unsigned long long stride = ipow(d, kS - 1 - t);
    if (d == 2) {
      std::vector<std::uint64_t> w(eng.mc.nwords, 0);
      for (unsigned long long b = 0; b < width; ++b)
        if ((b / stride) % 2 == 1) w[b / 64] |= std::uint64_t(1) << (b % 64);
      suffix_tmpl[t] = eng.pair(domain[0], domain[1], eng.mc.pack(std::move(w)));
    } else {
      std::vector<Int> vals(width);
      for (unsigned long long b = 0; b < width; ++b)
        vals[b] = domain[(b / stride) % d];
      suffix_tmpl[t] = eng.many(std::move(vals));
    }
  }

  auto digit_value = [&](unsigned long long chunk, std::size_t j) -> SVal {
    if (j < prefixCount) {
      unsigned long long div = ipow(d, prefixCount - 1 - j);
      return eng.conc(domain[(chunk / div) % d]);
    }
    return suffix_tmpl[j - prefixCount];
  };

  for (unsigned long long chunk = 0; chunk < chunks; ++chunk) {
    // Fresh store for this chunk.
    eng.arrays.clear();
    eng.scalars.clear();
    eng.defined.clear();
    eng.slot_vals.assign(slots.size(), eng.conc(0));
    eng.sizes = szs;
    eng.faulted = eng.mc.zero();
    eng.erred = eng.mc.zero();
    eng.bug_lane = eng.err_lane = -1;
    eng.err_reason.clear();
    eng.steps = 0;
    eng.budget_hit = eng.stop = false;

    std::size_t j = 0;
    for (const auto& decl : spec.arrays) {
      auto& cells = eng.arrays[decl.array];
      cells.clear();
      for (Int i = 0; i < szs[decl.size]; ++i) cells.push_back(digit_value(chunk, j++));
    }
    for (std::size_t i = 0; i < slots.size(); ++i)
      eng.slot_vals[i] = digit_value(chunk, j++);

    Mask act = eng.mc.one();
    eng.exec(*cmd, act);

    // Resolve this chunk's events; the least lane wins, matching the
    // valuation order of one-by-one enumeration.
    long long lane = -1;
    int kind = -1;  // 0 bug, 1 eval error, 2 budget
    if (eng.bug_lane >= 0) {
      lane = eng.bug_lane;
      kind = 0;
    }
    if (eng.err_lane >= 0 && (lane < 0 || eng.err_lane < lane)) {
      lane = eng.err_lane;
      kind = 1;
    }
    if (eng.budget_hit) {
      Mask stuck = eng.mc.m_andnot(eng.mc.m_andnot(eng.mc.one(), eng.faulted), eng.erred);
      long long sl = eng.mc.first(stuck);
      if (sl >= 0 && (lane < 0 || sl < lane)) {
        lane = sl;
        kind = 2;
      }
    }
    if (lane < 0) continue;

    if (kind == 1) return SizeVerdict::inconclusive(szs, eng.err_reason);
    if (kind == 2) return SizeVerdict::inconclusive(szs, "step budget exceeded");

    // Replay the least faulting valuation concretely for the trace.
    unsigned long long global = chunk * width + static_cast<unsigned long long>(lane);
    Store store;
    store.sizes = szs;
    std::vector<Int> havoc_vals(slots.size(), 0);
    std::size_t dj = 0;
    for (const auto& decl : spec.arrays) {
      auto& cells = store.arrays[decl.array];
      for (Int i = 0; i < szs[decl.size]; ++i) {
        unsigned long long div = ipow(d, K - 1 - dj);
        cells.push_back(domain[(global / div) % d]);
        ++dj;
      }
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
      unsigned long long div = ipow(d, K - 1 - dj);
      havoc_vals[i] = domain[(global / div) % d];
      ++dj;
    }

    Trace trace;
    trace.initialArrays = store.arrays;
    trace.havocChoices = havoc_vals;
    RunOptions ro;
    ro.stepBudget = opts.stepBudget;
    ro.havoc = [&](std::size_t i) { return havoc_vals[i]; };
    ro.trace = &trace;
    try {
      RunResult rr = run_concrete(cmd, store, ro);
      if (rr.terminal == Trace::Terminal::Faulted)
        return SizeVerdict::bug(szs, std::move(trace));
      return SizeVerdict::inconclusive(
          szs, "internal: lockstep fault did not reproduce under replay");
    } catch (const EvalError& e) {
      return SizeVerdict::inconclusive(szs, e.what());
    }
  }

  return SizeVerdict::safe(szs, total);
}

}  // namespace ctms
