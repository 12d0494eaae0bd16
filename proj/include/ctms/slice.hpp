#pragma once

// Memory-safety-preserving program reduction with respect to one analyzed
// (array, size) pair: dependency slicing, elimination of loops that cannot
// change which target accesses run or with which indices, and pruning of
// layout regions the reduced body no longer touches.

#include "ctms/ast.hpp"

namespace ctms {

struct SliceTargets {
  Ident array;
  Ident size;
};

// Removes every statement that neither accesses the target array nor
// transitively influences — through data or control dependence — the
// reachability or index value of such an access. Assignments kept only for an
// access on their right-hand side lose the dead target: `r := a[Y]` becomes
// the bare evaluation `a[Y]`.
CmdPtr dependency_slice(const CmdPtr& cmd, const SliceTargets& targets);

// Rewrites `while g do c` to `c` (the body once) when iterating c cannot
// change which target accesses are reachable or their index values: g reads
// no size variable and no iterator derived from one, and every access index
// and data-independent guard in c depends only on the size, params, and c's
// own for-iterators. Loops failing the test are left intact; the extractor
// will report them as unsupported.
CmdPtr collapse_data_independent_loops(const CmdPtr& cmd, const SliceTargets& targets);

// Fixpoint of slicing and loop collapse; idempotent and non-growing.
CmdPtr reduce(const CmdPtr& cmd, const SliceTargets& targets);

// Whole-program reduction: reduces the body and prunes the layout down to
// regions the reduced body still mentions (the target array always stays).
// Throws std::invalid_argument if the target pair is not declared.
Program reduce_program(const Program& p, const SliceTargets& targets);

}  // namespace ctms
