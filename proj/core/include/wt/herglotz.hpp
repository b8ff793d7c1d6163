#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wt/measure.hpp"
#include "wt/report.hpp"

namespace wt {

struct EvalOptions {
  // Looser than the engine default: Cauchy kernels against oscillatory
  // densities plateau near 1e-11 on the folded tail, so certifying 1e-12
  // would burn the panel budget for no accuracy gain.
  QuadConfig quad{1e-10, 1e-10, 16384, 4};
  // Direct evaluation stays off the real axis by at least this margin;
  // boundary behavior is the inversion module's job.
  double guard = 1e-3;
};

struct EvalGrid {
  std::vector<Cplx> points;  // upper half-plane
  double guard = 1e-3;

  // 20 points: 5 real offsets x 4 heights.
  static EvalGrid standard();
  // 10 points, for quick closed-form comparisons.
  static EvalGrid ten();
  // 50 points, for dense positivity sweeps.
  static EvalGrid dense50();

  void validate() const;
};

struct HerglotzFunction {
  enum class Provenance { MeasureBacked, ClosedForm };

  int dim = 1;
  std::function<Matrix(Cplx)> eval;
  Provenance provenance = Provenance::ClosedForm;
  std::string id = "custom";
  std::optional<double> period;
};

// M(z) = sum_j (l_j z + 1)/(l_j - z) W_j + z * D-mass + (1+z^2) * Cauchy(D).
// The linear-growth kernel is split off analytically so the density part
// reduces to a Cauchy integral with uniform tail behavior.
Matrix eval_M(const MatrixMeasure& sigma, Cplx z, const EvalOptions& = {});

// Integral of 1/(l - z) - l/(1 + l^2) against the tau form directly.
Matrix eval_M_tau(const MatrixMeasure& tau, Cplx z, const EvalOptions& = {});

// Plain Cauchy transform of the measure in its exposed kind.
Matrix cauchy_transform(const MatrixMeasure& m, Cplx z,
                        const EvalOptions& = {});

HerglotzFunction herglotz_from_measure(const MatrixMeasure& m,
                                       const EvalOptions& = {});

// Class-membership checks over a grid: positivity of the imaginary part,
// the value at i, and conjugate symmetry. Per-point evaluator failures are
// recorded in the report instead of aborting the sweep.
Report herglotz_report(const HerglotzFunction& f, const EvalGrid& grid,
                       const Tolerances& tol, int threads = 1);

// max over the grid of ||F(z+b) - F(z)|| in operator norm.
double function_period_residual(const HerglotzFunction& f, double b,
                                const EvalGrid& grid, int threads = 1);

}  // namespace wt
