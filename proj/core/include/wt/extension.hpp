#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "wt/herglotz.hpp"
#include "wt/measure.hpp"
#include "wt/types.hpp"

namespace wt {

// Unitary matrix admitted against ||V*V - I|| <= tol (default 1e-10).
struct UnitaryMatrix {
  Matrix V;
  static UnitaryMatrix checked(Matrix v, double tol = 1e-10);
};

// Half-plane kernels against a sigma measure, split as
//   (l -+ i)/(l - z) = 1 + (z -+ i)/(l - z),
// so the constant part is the exact total mass and the remainder is a
// plain Cauchy transform. At z = i (resp. z = -i) the coefficient
// vanishes and script_A (resp. script_B) returns the mass bit for bit.
Matrix script_A(const MatrixMeasure& sigma, Cplx z, const EvalOptions& = {});
Matrix script_B(const MatrixMeasure& sigma, Cplx z, const EvalOptions& = {});

// Residual of the shift covariance of the two kernels:
//   max(||A(z+b) - ((z+i)/(z+b+i)) A(z)||, ||B(z+b) - ((z-i)/(z+b-i)) B(z)||).
// Requires the tau form of the measure to be b-periodic.
double ab_shift_residual(const MatrixMeasure& sigma, Cplx z, double b,
                         const EvalOptions& = {});

// Weyl-Titchmarsh function of the extension labeled by V:
//   M_V(z) = M_0(z) + (1+z^2) A(z) (I-V) [(i+z)A(z)V + (i-z)B(z)]^{-1} B(z).
// V = I short-circuits to eval_M exactly. The bracket is solved, never
// inverted; its condition number is reported, and above 1e12 the point is
// treated as (numerically) part of the extension's spectrum.
struct ExtensionEval {
  Matrix value;
  double bracket_cond = 0.0;
};
ExtensionEval extension_M_full(const MatrixMeasure& sigma0,
                               const UnitaryMatrix& V, Cplx z,
                               const EvalOptions& = {});
Matrix extension_M(const MatrixMeasure& sigma0, const UnitaryMatrix& V,
                   Cplx z, const EvalOptions& = {});

// Gram blocks of the shifted defect bases under U^n: entry (l,k) of A_n is
// the inner product of U^n psi_k against psi_l, and similarly
// B_n from (U^n phi_k, psi_l), C_n from (U^n psi_k, phi_l),
// D_n from (U^n phi_k, phi_l), all in L^2(sigma).
struct TransitionMatrices {
  Matrix A, B, C, D;
};

// Bundles the measure, the shift step b, the commuting unitary multiplier
// D of the shift operator, and the two defect bases. Bases are held as
// coefficient vectors: column j of phi_basis is the constant section
// phi_j, column j of psi_basis is the coefficient of the unimodular
// section (l-i)/(l+i) xi_j; both Grams reduce to Xi^H x mass x Xi.
class ExtensionContext {
 public:
  // Default bases: columns of mass^{-1/2}, exactly orthonormal in L^2(sigma).
  // Checks: D unitary (1e-10), D commutes with all weights (1e-10),
  // provided bases orthonormal (Gram within 1e-8).
  static ExtensionContext make(const MatrixMeasure& sigma, double b,
                               Matrix D_mult,
                               std::optional<Matrix> phi_basis = {},
                               std::optional<Matrix> psi_basis = {});

  int dim() const;
  double b() const;
  const MatrixMeasure& measure() const;
  const Matrix& multiplier() const;
  const Matrix& phi_basis() const;
  const Matrix& psi_basis() const;

  // tau-periodicity residual over the auto-selected interior window,
  // computed once and cached. Gate for everything involving U^n.
  double periodicity_residual() const;

  // Cached per n; raises PeriodicityPreconditionFailed when the backing
  // measure is not b-periodic at the measure level.
  const TransitionMatrices& transition(int n) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// One application of the extension-transport map
//   T_n(V0) = -[(nb-2i) A_n V0 - nb B_n] [(nb+2i) D_n - nb C_n V0]^{-1};
// n = 0 returns V0 unchanged. The sign convention is fixed by T_0 = id
// and the group law T_n(T_m(.)) = T_{n+m}(.), which this form satisfies.
// Unitarity of the output is reported, not enforced.
struct GroupMapResult {
  Matrix V;
  double unitarity_defect = 0.0;
  double bracket_cond = 0.0;
};
GroupMapResult group_map(const ExtensionContext& ctx, const UnitaryMatrix& V0,
                         int n);

// Smallest n in [1, n_max] with ||T_n(V0) - V0|| <= tol, or nullopt. The
// orbit is re-checked from a second, internally generated starting matrix;
// disagreement raises InconsistentPeriod. Each T_n(V0) is re-unitarized by
// polar projection before the comparison.
std::optional<int> orbit_period(const ExtensionContext& ctx,
                                const UnitaryMatrix& V0, int n_max,
                                double tol);

}  // namespace wt
