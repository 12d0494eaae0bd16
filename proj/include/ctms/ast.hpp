#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ctms/source_loc.hpp"

namespace ctms {

using Int = long long;

struct Ident {
  std::string name;

  Ident() = default;
  Ident(std::string n) : name(std::move(n)) {}
  Ident(const char* n) : name(n) {}

  auto operator<=>(const Ident&) const = default;
};

enum class IntBinOp { Add, Sub, Mul };
enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

struct IntExpr;
using IntExprPtr = std::shared_ptr<const IntExpr>;

struct IntExpr {
  struct Lit {
    Int value;
  };
  struct Var {
    Ident name;
  };
  struct Param {
    Ident name;
  };
  struct Read {
    Ident array;
    IntExprPtr index;
  };
  struct Bin {
    IntBinOp op;
    IntExprPtr lhs;
    IntExprPtr rhs;
  };
  using Node = std::variant<Lit, Var, Param, Read, Bin>;

  Node node;
  SourceLoc loc;
};

struct BoolExpr;
using BoolExprPtr = std::shared_ptr<const BoolExpr>;

struct BoolExpr {
  struct Lit {
    bool value;
  };
  struct Cmp {
    CmpOp op;
    IntExprPtr lhs;
    IntExprPtr rhs;
  };
  struct And {
    BoolExprPtr lhs;
    BoolExprPtr rhs;
  };
  struct Or {
    BoolExprPtr lhs;
    BoolExprPtr rhs;
  };
  struct Not {
    BoolExprPtr arg;
  };
  using Node = std::variant<Lit, Cmp, And, Or, Not>;

  Node node;
  SourceLoc loc;
};

struct Cmd;
using CmdPtr = std::shared_ptr<const Cmd>;

struct Cmd {
  struct Skip {};
  struct Assign {
    Ident target;
    IntExprPtr value;
  };
  struct ArrayWrite {
    Ident array;
    IntExprPtr index;
    IntExprPtr value;
  };
  // Bare evaluation of an integer expression; the value is discarded but any
  // array access in it is still bounds-checked ("a[Y];" in reduced programs).
  struct ExprStmt {
    IntExprPtr expr;
  };
  // Always flattened: no Seq or Skip children, at least two entries.
  struct Seq {
    std::vector<CmdPtr> cmds;
  };
  // else_branch is never null; "if g then c" parses as "if g then c else skip".
  struct If {
    BoolExprPtr guard;
    CmdPtr then_branch;
    CmdPtr else_branch;
  };
  // Inclusive range: iterates lower..upper, zero times when upper < lower.
  struct For {
    Ident iter;
    IntExprPtr lower;
    IntExprPtr upper;
    CmdPtr body;
  };
  struct While {
    BoolExprPtr guard;
    CmdPtr body;
  };
  // Abstraction of complex code with a declared footprint. reads/writes are
  // scalar variables, frames are abstract region labels; all three sorted.
  struct Opaque {
    Ident label;
    std::vector<Ident> reads;
    std::vector<Ident> writes;
    std::vector<Ident> frames;
  };
  using Node = std::variant<Skip, Assign, ArrayWrite, ExprStmt, Seq, If, For, While, Opaque>;

  Node node;
  SourceLoc loc;
};

struct SafetySpec {
  struct ArrayDecl {
    Ident array;
    Ident size;
  };
  std::vector<ArrayDecl> arrays;   // declaration order
  std::vector<Ident> frames;       // sorted, unique

  const ArrayDecl* find_array(const Ident& a) const {
    for (const auto& d : arrays)
      if (d.array == a) return &d;
    return nullptr;
  }
  const ArrayDecl* find_size(const Ident& s) const {
    for (const auto& d : arrays)
      if (d.size == s) return &d;
    return nullptr;
  }
  bool has_frame(const Ident& f) const {
    for (const auto& g : frames)
      if (g == f) return true;
    return false;
  }
};

struct Program {
  CmdPtr body;
  SafetySpec spec;
  std::vector<Ident> params;  // declaration order

  bool has_param(const Ident& p) const {
    for (const auto& q : params)
      if (q == p) return true;
    return false;
  }
};

// ---- constructors ----------------------------------------------------------

IntExprPtr int_lit(Int v, SourceLoc loc = {});
IntExprPtr int_var(Ident name, SourceLoc loc = {});
IntExprPtr int_param(Ident name, SourceLoc loc = {});
IntExprPtr int_read(Ident array, IntExprPtr index, SourceLoc loc = {});
IntExprPtr int_bin(IntBinOp op, IntExprPtr lhs, IntExprPtr rhs, SourceLoc loc = {});

BoolExprPtr bool_lit(bool v, SourceLoc loc = {});
BoolExprPtr bool_cmp(CmpOp op, IntExprPtr lhs, IntExprPtr rhs, SourceLoc loc = {});
BoolExprPtr bool_and(BoolExprPtr lhs, BoolExprPtr rhs, SourceLoc loc = {});
BoolExprPtr bool_or(BoolExprPtr lhs, BoolExprPtr rhs, SourceLoc loc = {});
BoolExprPtr bool_not(BoolExprPtr arg, SourceLoc loc = {});

CmdPtr cmd_skip(SourceLoc loc = {});
CmdPtr cmd_assign(Ident target, IntExprPtr value, SourceLoc loc = {});
CmdPtr cmd_array_write(Ident array, IntExprPtr index, IntExprPtr value, SourceLoc loc = {});
CmdPtr cmd_expr(IntExprPtr expr, SourceLoc loc = {});
// Flattens nested sequences and drops skips; returns skip for an empty list.
CmdPtr cmd_seq(std::vector<CmdPtr> cmds, SourceLoc loc = {});
CmdPtr cmd_if(BoolExprPtr guard, CmdPtr then_branch, CmdPtr else_branch = nullptr,
              SourceLoc loc = {});
CmdPtr cmd_for(Ident iter, IntExprPtr lower, IntExprPtr upper, CmdPtr body, SourceLoc loc = {});
CmdPtr cmd_while(BoolExprPtr guard, CmdPtr body, SourceLoc loc = {});
CmdPtr cmd_opaque(Ident label, std::vector<Ident> reads, std::vector<Ident> writes,
                  std::vector<Ident> frames, SourceLoc loc = {});

// ---- structural equality (ignores source locations) ------------------------

bool ast_equal(const IntExpr& a, const IntExpr& b);
bool ast_equal(const BoolExpr& a, const BoolExpr& b);
bool ast_equal(const Cmd& a, const Cmd& b);
bool ast_equal(const CmdPtr& a, const CmdPtr& b);
bool spec_equal(const SafetySpec& a, const SafetySpec& b);
bool program_equal(const Program& a, const Program& b);

// ---- traversal helpers -----------------------------------------------------

std::size_t node_count(const Cmd& c);
bool is_skip(const Cmd& c);

std::set<Ident> collect_params(const Cmd& c);
std::set<Ident> collect_params(const IntExpr& e);

// Scalar variable occurrences (excludes params and array names used in reads).
void collect_vars(const IntExpr& e, std::set<Ident>& out);
void collect_vars(const BoolExpr& e, std::set<Ident>& out);

// Arrays accessed (read) anywhere in the expression.
void collect_arrays_read(const IntExpr& e, std::set<Ident>& out);
void collect_arrays_read(const BoolExpr& e, std::set<Ident>& out);

// Walks every statement node of the command tree, outermost first.
void for_each_cmd(const CmdPtr& c, const std::function<void(const CmdPtr&)>& fn);

}  // namespace ctms
