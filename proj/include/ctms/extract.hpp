#pragma once

// Structural extraction of completeness-threshold constraints from a reduced
// program: one-variable conjunctions over the analyzed size variable whose
// models are candidate sizes at which each potential out-of-bounds error is
// realizable. A bounded proof at one model per satisfiable constraint then
// discharges every size.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctms/ast.hpp"

namespace ctms {

// Affine expression over params: constant + sum of coeff * param. Zero
// coefficients are never stored.
struct Affine {
  Int constant = 0;
  std::map<Ident, Int> coeffs;

  bool is_constant() const { return coeffs.empty(); }
  // Value once param-closed; throws std::invalid_argument when params remain.
  Int value() const;
  std::string str() const;
  auto operator<=>(const Affine&) const = default;

  Affine operator+(const Affine& o) const;
  Affine operator-(const Affine& o) const;
  Affine operator-() const;
  Affine operator*(Int k) const;
};

Affine affine_const(Int v);
Affine affine_param(Ident p);

// One comparison `size OP bound`. Eq/Lt/Le/Gt/Ge only, never Ne.
struct Atom {
  CmpOp op;
  Affine bound;
  auto operator<=>(const Atom&) const = default;
  std::string str(const Ident& sizeVar) const;
};

// Conjunction of atoms. Order is presentation only (guard atoms outermost
// first, the access atom last); equality and deduplication are set-based.
struct Constraint {
  std::vector<Atom> atoms;

  void add_front(const Atom& a);
  void add_back(const Atom& a);
  bool set_equal(const Constraint& o) const;
  std::string str(const Ident& sizeVar) const;
};

// Constraints in program order with set semantics: re-extracted duplicates
// merge, pooling the source locations of their originating accesses.
struct ConstraintSet {
  Ident sizeVar;
  std::vector<Constraint> constraints;
  std::vector<std::vector<SourceLoc>> origins;  // parallel to constraints

  void add(Constraint c, SourceLoc origin);
  std::string str() const;  // "s > B && s >= L+R ; s > B && s <= Y"
};

struct ExtractionResult {
  bool supported = true;
  ConstraintSet set;
  SourceLoc unsupportedLoc;       // first offending construct, program order
  std::string unsupportedWhat;
  std::vector<std::string> warnings;  // e.g. negative constant index

  static ExtractionResult unsupported(SourceLoc loc, std::string what);
};

// Offsets z of the accesses `a[i+z]` inside one size-bounded loop body.
struct BodyOffsets {
  bool supported = true;
  std::set<Int> offsets;
  SourceLoc firstAccess;      // origin for the loop's constraint
  SourceLoc unsupportedLoc;
  std::string unsupportedWhat;
};

// Collects the `iterator + constant` access offsets of a loop body, ignoring
// data-dependent guards (their branches and their own accesses are walked).
// Any other access shape, a data-independent guard, or a nested while loop
// makes the body unsupported. `havocked` lists scalars an opaque statement
// may overwrite, which render guards mentioning them data-dependent.
BodyOffsets normalize_body(const CmdPtr& body, const Ident& iter, const Ident& sizeVar,
                           const std::set<Ident>& havocked);

ExtractionResult extract(const CmdPtr& cmd, const Ident& sizeVar);

}  // namespace ctms
