#pragma once

#include <iosfwd>

#include "wt/report.hpp"

namespace wt {

struct SelftestResult {
  int passed = 0;
  int total = 0;
  bool ok() const { return total > 0 && passed == total; }
};

// Runs the full acceptance ladder, one criterion per line on `out`, and
// returns the tally. Thresholds are resolved through `tol`, so per-run
// overrides and the WT_TOL_SCALE environment variable reach every check.
// Everything is deterministic: fixed seeds, fixed grids, no threading.
SelftestResult run_selftest(std::ostream& out, const Tolerances& tol);

}  // namespace wt
