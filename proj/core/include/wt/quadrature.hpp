#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "wt/types.hpp"

namespace wt {

using MatrixFn = std::function<Matrix(double)>;

struct QuadConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_panels = 8192;
  // Each input segment is pre-split into this many panels before adaptive
  // refinement starts; helps oscillatory integrands converge predictably.
  int initial_splits = 4;
};

struct QuadOutcome {
  Matrix value;
  double err = 0.0;  // accumulated local error estimate
  int panels = 0;    // Gauss-Kronrod applications performed
};

// Adaptive Gauss7/Kronrod15 over a union of finite segments. Splitting
// order and the final summation order are both deterministic, so results
// are bit-reproducible for a given integrand and config.
QuadOutcome integrate_adaptive(const MatrixFn& f,
                               std::vector<std::pair<double, double>> segments,
                               const QuadConfig& cfg);

// Integral of f over |x| > cutoff, folded onto u in (0, 1/cutoff] by
// u = 1/x. The fold evaluates f(1/u) and f(-1/u) together, so odd
// oscillatory parts cancel inside a panel instead of thrashing the
// refinement. Quadrature nodes never touch u = 0.
QuadOutcome integrate_symmetric_tail(const MatrixFn& f, double cutoff,
                                     const QuadConfig& cfg);

}  // namespace wt
