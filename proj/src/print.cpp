#include "ctms/print.hpp"

#include <sstream>

namespace ctms {

namespace {

// Precedence levels for minimal parenthesization.
int int_prec(const IntExpr& e) {
  if (const auto* b = std::get_if<IntExpr::Bin>(&e.node))
    return b->op == IntBinOp::Mul ? 2 : 1;
  return 3;  // atoms
}

void print_int(std::ostream& os, const IntExpr& e);

void print_int_child(std::ostream& os, const IntExpr& child, int parent_prec,
                     bool is_right, IntBinOp parent_op) {
  int prec = int_prec(child);
  // -, and * over +/- need parens on a lower-precedence right operand; `-` is
  // left associative, so `a - (b - c)` keeps parens on the right child too.
  bool need = prec < parent_prec ||
              (prec == parent_prec && is_right &&
               (parent_op == IntBinOp::Sub || parent_op == IntBinOp::Mul));
  if (need) os << '(';
  print_int(os, child);
  if (need) os << ')';
}

void print_int(std::ostream& os, const IntExpr& e) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntExpr::Lit>) {
          os << x.value;
        } else if constexpr (std::is_same_v<T, IntExpr::Var> ||
                             std::is_same_v<T, IntExpr::Param>) {
          os << x.name.name;
        } else if constexpr (std::is_same_v<T, IntExpr::Read>) {
          os << x.array.name << '[';
          print_int(os, *x.index);
          os << ']';
        } else {
          const char* op = x.op == IntBinOp::Add ? " + " : x.op == IntBinOp::Sub ? " - " : " * ";
          int prec = x.op == IntBinOp::Mul ? 2 : 1;
          print_int_child(os, *x.lhs, prec, false, x.op);
          os << op;
          print_int_child(os, *x.rhs, prec, true, x.op);
        }
      },
      e.node);
}

// 1 = or, 2 = and, 3 = atom/not/cmp
int bool_prec(const BoolExpr& e) {
  if (std::holds_alternative<BoolExpr::Or>(e.node)) return 1;
  if (std::holds_alternative<BoolExpr::And>(e.node)) return 2;
  return 3;
}

void print_bool(std::ostream& os, const BoolExpr& e) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, BoolExpr::Lit>) {
          os << (x.value ? "true" : "false");
        } else if constexpr (std::is_same_v<T, BoolExpr::Cmp>) {
          print_int(os, *x.lhs);
          os << ' ' << to_string(x.op) << ' ';
          print_int(os, *x.rhs);
        } else if constexpr (std::is_same_v<T, BoolExpr::And> ||
                             std::is_same_v<T, BoolExpr::Or>) {
          int prec = std::is_same_v<T, BoolExpr::And> ? 2 : 1;
          const char* op = std::is_same_v<T, BoolExpr::And> ? " && " : " || ";
          auto child = [&](const BoolExpr& k) {
            bool need = bool_prec(k) < prec;
            if (need) os << '(';
            print_bool(os, k);
            if (need) os << ')';
          };
          child(*x.lhs);
          os << op;
          child(*x.rhs);
        } else {
          os << '!';
          bool need = bool_prec(*x.arg) < 3;
          if (need) os << '(';
          print_bool(os, *x.arg);
          if (need) os << ')';
        }
      },
      e.node);
}

void print_idents(std::ostream& os, const std::vector<Ident>& ids) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) os << ", ";
    os << ids[i].name;
  }
}

void print_cmd(std::ostream& os, const Cmd& c, int indent) {
  std::string pad(2 * indent, ' ');
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Cmd::Skip>) {
          os << pad << "skip";
        } else if constexpr (std::is_same_v<T, Cmd::Assign>) {
          os << pad << x.target.name << " := ";
          print_int(os, *x.value);
        } else if constexpr (std::is_same_v<T, Cmd::ArrayWrite>) {
          os << pad << x.array.name << '[';
          print_int(os, *x.index);
          os << "] := ";
          print_int(os, *x.value);
        } else if constexpr (std::is_same_v<T, Cmd::ExprStmt>) {
          os << pad;
          print_int(os, *x.expr);
        } else if constexpr (std::is_same_v<T, Cmd::Seq>) {
          for (std::size_t i = 0; i < x.cmds.size(); ++i) {
            if (i) os << ";\n";
            print_cmd(os, *x.cmds[i], indent);
          }
        } else if constexpr (std::is_same_v<T, Cmd::If>) {
          os << pad << "if ";
          print_bool(os, *x.guard);
          os << " then {\n";
          print_cmd(os, *x.then_branch, indent + 1);
          os << '\n' << pad << '}';
          if (!is_skip(*x.else_branch)) {
            os << " else {\n";
            print_cmd(os, *x.else_branch, indent + 1);
            os << '\n' << pad << '}';
          }
        } else if constexpr (std::is_same_v<T, Cmd::For>) {
          os << pad << "for " << x.iter.name << " in [";
          print_int(os, *x.lower);
          os << " : ";
          print_int(os, *x.upper);
          os << "] do {\n";
          print_cmd(os, *x.body, indent + 1);
          os << '\n' << pad << '}';
        } else if constexpr (std::is_same_v<T, Cmd::While>) {
          os << pad << "while ";
          print_bool(os, *x.guard);
          os << " do {\n";
          print_cmd(os, *x.body, indent + 1);
          os << '\n' << pad << '}';
        } else {
          os << pad << "opaque " << x.label.name;
          if (!x.reads.empty()) {
            os << " reads(";
            print_idents(os, x.reads);
            os << ')';
          }
          if (!x.writes.empty()) {
            os << " writes(";
            print_idents(os, x.writes);
            os << ')';
          }
          if (!x.frames.empty()) {
            os << " frames(";
            print_idents(os, x.frames);
            os << ')';
          }
        }
      },
      c.node);
}

void print_layout(std::ostream& os, const SafetySpec& spec) {
  bool first = true;
  for (const auto& d : spec.arrays) {
    if (!first) os << " * ";
    os << "array(" << d.array.name << ", " << d.size.name << ')';
    first = false;
  }
  for (const auto& f : spec.frames) {
    if (!first) os << " * ";
    os << f.name;
    first = false;
  }
}

}  // namespace

std::string to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

std::string to_string(const IntExpr& e) {
  std::ostringstream os;
  print_int(os, e);
  return os.str();
}

std::string to_string(const BoolExpr& e) {
  std::ostringstream os;
  print_bool(os, e);
  return os.str();
}

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  for (const auto& q : p.params) os << "param " << q.name << ";\n";
  if (!p.params.empty()) os << '\n';
  os << "requires ";
  print_layout(os, p.spec);
  os << ";\n";
  print_cmd(os, *p.body, 1);
  os << "\nensures ";
  print_layout(os, p.spec);
  os << '\n';
  return os.str();
}

}  // namespace ctms
