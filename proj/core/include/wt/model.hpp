#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wt/extension.hpp"
#include "wt/measure.hpp"
#include "wt/types.hpp"

namespace wt {

// Finite atomic realization of the multiplication-operator model: the
// space is a direct sum of N weighted copies of C^m, H multiplies block j
// by lambda_j, and vectors are stored as stacked block coordinates
// (flat index j*m + c). Weights are sandwich-normalized at admission so
// the total mass is the identity.
struct FiniteModel {
  int dim = 0;
  std::vector<double> lattice;   // strictly increasing
  std::vector<Matrix> weights;   // PSD, sum = I after normalization
  int boundary_layers = 0;
  std::optional<double> step;    // set when the lattice is arithmetic
  // Set when N < 2m + 2*layers was admitted anyway (degenerate but legal,
  // e.g. a single atom whose symmetric domain is {0}).
  bool undersized = false;

  int size() const { return static_cast<int>(lattice.size()); }
  int space_dim() const { return size() * dim; }
  // Inclusive index range left after peeling boundary_layers per side.
  std::pair<int, int> interior() const {
    return {boundary_layers, size() - 1 - boundary_layers};
  }
  // Lattice stride realizing a shift by b, when one exists.
  std::optional<int> stride_for(double b) const;
};

// boundary_layers >= 0; requires a purely atomic measure with distinct
// abscissae. N >= 2m + 2*layers, except that with zero layers a smaller
// model is admitted and flagged undersized. RankDeficiency when the
// summed weight matrix is singular (constants fail to embed).
FiniteModel build_model(const MatrixMeasure& sigma, int boundary_layers);

// Row functional whose kernel is the symmetric restriction's domain:
// the m x (N m) matrix with block j equal to (lambda_j + i) W_j.
Matrix domain_constraint_matrix(const FiniteModel& model);

// Section ((lambda_j - i)/(lambda_j - z)) xi, stacked. Orthogonal to
// (H - conj(z)) g for every g in the constraint kernel; that property is
// checked by tests, not enforced here.
Vector defect_vector(const FiniteModel& model, Cplx z, const Vector& xi);

// Matrix of f(l) -> D ((l - i)/(l - b - i)) f(l - b) on lattice sections;
// shifts leaving the lattice truncate to zero. Requires an arithmetic
// lattice whose step divides b and boundary_layers covering the stride.
Matrix s_type_matrix(const FiniteModel& model, const UnitaryMatrix& D,
                     double b);

// ||U^* G U - G|| on the interior blocks, G = blockdiag(W_j): zero exactly
// when the weights satisfy (1+l^2) W(l) = (1+(l+b)^2) W(l+b) along the
// shift. No weight inverses involved, so PSD weights are fine.
double interior_isometry_defect(const FiniteModel& model, const Matrix& U);

// ||P_int (U H U^adj - H + b I) P_int|| with the adjoint taken in the
// weighted inner product (computed in orthonormalized coordinates, which
// requires strictly positive weights).
double commutation_residual(const FiniteModel& model, const Matrix& U,
                            double b);

// ||P_int (U E(delta) U^adj - E(delta + b)) P_int|| where E marks lattice
// points inside the closed interval. Both delta and delta + b must lie in
// the interior spectral range.
double spectral_shift_residual(const FiniteModel& model, const Matrix& U,
                               double b, std::pair<double, double> delta);

// P_+ (zH + I)(H - zI)^{-1} restricted to constant sections, assembled
// from per-block solves. Agrees with eval_M on the model's measure.
Matrix wt_from_model(const FiniteModel& model, Cplx z);

// Max over the grid of ||W0 M(z) - M'(z) W0||, with M' recomputed from
// weights conjugated by W0. W0 must commute with every weight.
double basis_conjugation_check(const FiniteModel& model,
                               const UnitaryMatrix& W0, const EvalGrid& grid);

// Pointwise check of V(s) W(t) = e^{-ist} W(t) V(s) on sampled data,
// where W(t) multiplies by e^{i l t} and V(s) is the omega-twisted shift
// splitting at the origin. The sample set must contain l - s for at least
// one sample l. flip_phase replaces e^{-ist} by e^{+ist} as a control.
struct WeylSample {
  double lambda = 0.0;
  Cplx value;
};
double weyl_relation_residual(double s, double t, Cplx omega,
                              const std::vector<WeylSample>& samples,
                              bool flip_phase = false);

}  // namespace wt
