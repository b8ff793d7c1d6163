#pragma once

#include <functional>
#include <vector>

#include "wt/types.hpp"

namespace wt {

// Shrinking rectangular contours around a real interval. Only the two
// horizontal segments at distance eps from the axis are integrated; the
// vertical closings are dropped and their omission is absorbed by the
// extrapolation in eps.
struct ContourSchedule {
  double alpha = -1.0;
  double beta = 1.0;
  double eps0 = 0.2;    // first contour height
  double ratio = 0.5;   // geometric shrink factor, in (0,1)
  int count = 6;        // number of heights; at least 3
  int nodes = 512;      // trapezoid points per segment per height
  // Analytic weight applied under the integral; empty means 1. A weight
  // that is not analytic near [alpha, beta] voids the convergence
  // guarantee; the code does not try to detect that.
  std::function<Cplx(Cplx)> phi;

  static ContourSchedule defaults(double alpha, double beta);
  void validate() const;
};

struct InversionResult {
  Matrix estimate;
  double error = 0.0;              // residual of the chosen extrapolant pair
  std::vector<Matrix> per_eps;     // raw contour integrals I_k, largest eps first
  std::vector<Matrix> extrapolants;  // pairwise limits R_k = (I_{k+1} - r I_k)/(1 - r)
  int chosen_index = 0;            // index into extrapolants
};

// Recover int_[alpha,beta] phi(l) dsigma(l) from the Cauchy transform
// Phi(z) = int dsigma(l)/(l - z). For each eps the two horizontal segments
// give I(eps) = -(1/2pi i) [int_bottom - int_top] phi Phi dz; the linear
// model I(eps) = I(0) + c eps is removed pairwise across the geometric eps
// sequence and the estimate with the smallest successive residual wins.
// An atom sitting exactly on alpha or beta contributes half its weight.
InversionResult invert_interval(const std::function<Matrix(Cplx)>& Phi,
                                const ContourSchedule& schedule);

}  // namespace wt
