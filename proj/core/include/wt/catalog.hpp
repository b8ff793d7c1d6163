#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "wt/extension.hpp"
#include "wt/herglotz.hpp"
#include "wt/measure.hpp"
#include "wt/types.hpp"

namespace wt {

// Named closed-form matrix functions with known periods and, where
// available, backing measures. These anchor the numerical modules: every
// evaluator here is cheap, exact, and independently codable.
struct CatalogEntry {
  std::string id;
  std::string params_doc;  // human-readable parameter summary
  int dim = 1;
  std::function<Matrix(Cplx)> eval;
  std::optional<double> period;
  // Set when a measure reproducing the evaluator is known.
  std::function<MatrixMeasure()> measure;
};

HerglotzFunction to_function(const CatalogEntry& e);

// i + e^{iz} - e^{-1} on the upper half-plane only; no continuation below
// the axis is defined (the backing measure covers that if needed).
Cplx example_a(Cplx z);

// -i I + (2i/(e^{2l}-1)) (e^{l(1-iz)}-1) (I - e^{-izl} V)^{-1} (I - e^l V),
// the matrix function with period 2 pi / l. The resolvent factor is
// invertible off the real axis; on-axis eigenvalue phases raise.
Matrix example_b(Cplx z, double l, const UnitaryMatrix& V);

// diag of two scalar twisted-shift functions with lengths xi and l - xi
// and twists omega1, omega2: periods 2 pi / xi and 2 pi / (l - xi), so the
// matrix is non-periodic when the length ratio is irrational.
Matrix example_diag(Cplx z, double xi, double l, Cplx omega1, Cplx omega2);

// i I upstairs, -i I downstairs: the shift-invariant-for-every-b case.
Matrix constant_wt(Cplx z, int m);

// Commutator identity for the sampled first-order operator
//   (A f)(t) = -i f'(t) + (t^2 / gamma) f(t) + sum_k vhat(k) f(t + k)
// against the oscillation (S f)(t) = e^{ist} f(t):
//   [S A - A S + s S] f = e^{ist} sum_k vhat(k)(1 - e^{isk}) f(t + k).
// residual is the max-sample gap between the two sides (derivatives by a
// five-point stencil, so the floor is O(h^4)); rhs_max is the size of the
// right-hand side itself, which vanishes when s k is a multiple of 2 pi
// for every active k.
struct SchrodingerCheck {
  double residual = 0.0;
  double rhs_max = 0.0;
};
SchrodingerCheck schrodinger_commutator_residual(
    double s, const std::map<int, Cplx>& vhat, const SampledFunction& f,
    double gamma);

// Bound catalog entries.
CatalogEntry entry_a();
CatalogEntry entry_b(double l, const UnitaryMatrix& V);
CatalogEntry entry_diag(double xi, double l, Cplx omega1, Cplx omega2);
CatalogEntry entry_const(int m);

// Shipped measures.
// sigma density (1 + sin x) / (pi (1 + x^2)): backs example_a.
MatrixMeasure example_a_measure();
// tau density I/pi (Lebesgue): backs constant_wt.
MatrixMeasure lebesgue_tau(int m);
// Integer lattice with equal tau weights, truncated at |j| <= cutoff and
// completed by the matching constant tau density beyond the cutoff. A bare
// truncation leaves an O(1/cutoff) defect in F(z+1) - F(z); the continuum
// completion cancels it to O(cutoff^-2), far below the periodicity
// tolerances. bump scales the weight at zero by (1 + bump) before
// normalization, breaking periodicity on purpose.
MatrixMeasure periodic_lattice_measure(double cutoff = 2.0e4,
                                       double bump = 0.0);

}  // namespace wt
