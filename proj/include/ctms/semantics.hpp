#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctms/ast.hpp"
#include "ctms/source_loc.hpp"

namespace ctms {

struct Store {
  std::map<Ident, Int> scalars;
  std::map<Ident, std::vector<Int>> arrays;
  std::map<Ident, Int> sizes;  // element counts, >= 0
};

enum class FaultKind { ReadOutOfBounds, WriteOutOfBounds };
std::string to_string(FaultKind k);

struct Fault {
  SourceLoc site;
  Ident array;
  Int indexValue = 0;
  Int sizeValue = 0;
  FaultKind kind = FaultKind::ReadOutOfBounds;
};

struct TraceStep {
  SourceLoc loc;
  std::string event;
};

struct Trace {
  enum class Terminal { Completed, Faulted, BudgetExceeded };
  std::vector<TraceStep> steps;  // last `cap` steps; earlier ones counted below
  std::size_t droppedSteps = 0;
  Terminal terminal = Terminal::Completed;
  std::optional<Fault> fault;
  // Replay witness: the initial valuation that produced this execution.
  std::map<Ident, std::vector<Int>> initialArrays;
  std::vector<Int> havocChoices;  // one value per static opaque-write slot
};

// Reading a scalar that was never assigned. A specification problem in the
// analyzed program, reported as Inconclusive — never as a Fault.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Verdict for one assignment of the size variables. Single-array programs
// have exactly one entry in `sizes`.
struct SizeVerdict {
  enum class Kind { Safe, Bug, Inconclusive };
  Kind kind = Kind::Safe;
  std::map<Ident, Int> sizes;
  unsigned long long executionsExplored = 0;  // Safe only, >= 1
  std::optional<Trace> trace;                 // Bug only
  std::string reason;                         // Inconclusive only

  static SizeVerdict safe(std::map<Ident, Int> sizes, unsigned long long explored);
  static SizeVerdict bug(std::map<Ident, Int> sizes, Trace trace);
  static SizeVerdict inconclusive(std::map<Ident, Int> sizes, std::string reason);

  bool is_safe() const { return kind == Kind::Safe; }
  bool is_bug() const { return kind == Kind::Bug; }
};
std::string to_string(SizeVerdict::Kind k);

// Opaque havoc slots: one per (opaque occurrence, written variable), in
// program order with writes in their stored (sorted) order. A slot holds a
// single value for the whole execution, even when its opaque block re-runs
// inside a loop.
struct HavocSlot {
  const Cmd* site;
  Ident label;
  Ident var;
};
std::vector<HavocSlot> havoc_slots(const CmdPtr& cmd);

struct RunOptions {
  unsigned long long stepBudget = 10'000'000;
  // Value for havoc slot i; defaults to 0 everywhere.
  std::function<Int(std::size_t)> havoc;
  Trace* trace = nullptr;  // optional step recording
  std::size_t traceCap = 512;
};

struct RunResult {
  Store store;
  Trace::Terminal terminal = Trace::Terminal::Completed;
  std::optional<Fault> fault;
  unsigned long long steps = 0;
};

// Big-step execution of a param-free command. Faults stop the execution at
// the offending access; index expressions are evaluated before the value
// being written; &&/|| short-circuit. Throws EvalError on unbound scalars.
RunResult run_concrete(const CmdPtr& cmd, Store store, const RunOptions& opts = {});

struct ExhaustiveOptions {
  std::vector<Int> valueDomain = {0, 1};
  unsigned long long stepBudget = 10'000'000;
  // Upper limit on |valueDomain|^(cells + havoc slots).
  unsigned long long spaceCap = 1ull << 28;
};

// Checks every initial valuation of array cells and havoc slots over the
// value domain, in lexicographic order (arrays in spec order with indices
// ascending, then havoc slots; domain values ascending). Reports the first
// faulting valuation with a replayed trace. Internally valuations run in
// lockstep over bitmask partitions; the verdict matches the literal
// one-by-one enumeration.
SizeVerdict check_size_exhaustive(const CmdPtr& cmd, const SafetySpec& spec,
                                  const std::map<Ident, Int>& sizeAssignment,
                                  const ExhaustiveOptions& opts = {});

struct NondetOptions {
  // 0 means "derive as 2 * (max size under test) + 4".
  unsigned long long loopCap = 0;
  unsigned long long pathBudget = 1ull << 20;
  unsigned long long stepBudget = 10'000'000;
};

// Branch-exploring checker: data-dependent comparisons (mentioning an array
// cell or an opaque-written scalar) fork both outcomes; data-independent
// guards evaluate concretely. executionsExplored counts completed paths.
SizeVerdict check_size_nondet(const CmdPtr& cmd, const SafetySpec& spec,
                              const std::map<Ident, Int>& sizeAssignment,
                              const NondetOptions& opts = {});

}  // namespace ctms
