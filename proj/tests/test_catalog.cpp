#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <optional>

#include "wt/catalog.hpp"
#include "wt/errors.hpp"
#include "wt/herglotz.hpp"
#include "wt/measure.hpp"

using namespace wt;

namespace {

constexpr double kPi = 3.14159265358979323846;

template <typename F>
std::optional<Errc> code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

SampledFunction gaussian(double x0, double dx, int n) {
  SampledFunction f;
  f.x0 = x0;
  f.dx = dx;
  f.values.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double x = x0 + dx * j;
    f.values[static_cast<std::size_t>(j)] = std::exp(-0.5 * x * x);
  }
  return f;
}

// Same scalar family as the catalog's twisted-shift formula but assembled
// through polar pieces, sharing no code path with the library.
Cplx twisted_oracle(Cplx z, double l, Cplx v) {
  Cplx u = std::polar(std::exp(l * z.imag()), -l * z.real());  // e^{-izl}
  Cplx num = (std::exp(l) * u - 1.0) * (1.0 - std::exp(l) * v);
  Cplx den = (std::exp(2.0 * l) - 1.0) * (1.0 - u * v);
  return Cplx(0.0, -1.0) + Cplx(0.0, 2.0) * num / den;
}

}  // namespace

TEST_CASE("half-plane exponential example: values, period, domain") {
  CHECK(std::abs(example_a(Cplx(0, 1)) - Cplx(0, 1)) <= 1e-16);
  Cplx expect(std::exp(-2.0) - std::exp(-1.0), 1.0);
  CHECK(std::abs(example_a(Cplx(0, 2)) - expect) <= 1e-15);
  for (Cplx z : {Cplx(0.3, 0.8), Cplx(-2.0, 1.5)})
    CHECK(std::abs(example_a(z + 2.0 * kPi) - example_a(z)) <= 1e-14);
  CHECK(code_of([] { example_a(Cplx(0, -1)); }) == Errc::LowerHalfPlane);
  CHECK(code_of([] { example_a(Cplx(0.5, 0.0)); }) == Errc::LowerHalfPlane);
}

TEST_CASE("exponential density reproduces the closed form") {
  MatrixMeasure m = example_a_measure();
  HerglotzFunction f = herglotz_from_measure(m);
  for (Cplx z : EvalGrid::ten().points)
    CHECK(std::abs(f.eval(z)(0, 0) - example_a(z)) <= 1e-6);
}

TEST_CASE("matrix twisted-shift function: normalization and period") {
  Rng rng(31);
  UnitaryMatrix v2 = UnitaryMatrix::checked(random_unitary(2, rng));
  UnitaryMatrix one = UnitaryMatrix::checked(Matrix::Identity(1, 1));
  Matrix d(2, 2);
  d.setZero();
  d(0, 0) = 1.0;
  d(1, 1) = std::exp(Cplx(0.0, 0.6));
  UnitaryMatrix vd = UnitaryMatrix::checked(d);

  // z = i collapses both V-dependent factors for every parameter set.
  CHECK(op_norm(example_b(Cplx(0, 1), 0.8, v2) -
                Cplx(0, 1) * Matrix::Identity(2, 2)) <= 1e-13);
  CHECK(op_norm(example_b(Cplx(0, 1), kPi, one) -
                Cplx(0, 1) * Matrix::Identity(1, 1)) <= 1e-13);

  // Declared period 2 pi / l, and no shorter divisor works.
  struct Set {
    double l;
    UnitaryMatrix v;
  };
  for (const Set& s : {Set{kPi, one}, Set{1.0, v2}, Set{2.0, vd}}) {
    CatalogEntry e = entry_b(s.l, s.v);
    HerglotzFunction f = to_function(e);
    REQUIRE(e.period.has_value());
    CHECK(function_period_residual(f, *e.period, EvalGrid::ten()) <= 1e-12);
    CHECK(function_period_residual(f, *e.period / 2.0, EvalGrid::ten()) >=
          1e-3);
    CHECK(function_period_residual(f, *e.period / 3.0, EvalGrid::ten()) >=
          1e-3);
    CHECK(herglotz_report(f, EvalGrid::dense50(), Tolerances{}).all_pass());
  }

  // Period times length recovers the full angle exactly.
  Matrix ph(1, 1);
  ph(0, 0) = std::exp(Cplx(0.0, 0.4));
  for (double l : {1.0, 2.0, kPi})
    CHECK(*entry_b(l, UnitaryMatrix::checked(ph)).period * l == 2.0 * kPi);

  // Independently coded scalar evaluation.
  for (Cplx z : EvalGrid::ten().points) {
    CHECK(std::abs(example_b(z, kPi, one)(0, 0) -
                   twisted_oracle(z, kPi, Cplx(1, 0))) <= 1e-12);
    CHECK(std::abs(example_b(z, 0.7, UnitaryMatrix::checked(ph))(0, 0) -
                   twisted_oracle(z, 0.7, ph(0, 0))) <= 1e-12);
  }

  // Eigenvalue phase of V on the real axis kills the resolvent factor.
  CHECK(code_of([&] { example_b(Cplx(0.0, 0.0), kPi, one); }) ==
        Errc::SingularResolvent);
  CHECK(code_of([&] { example_b(Cplx(0, 1), -1.0, one); }) ==
        Errc::InvalidInput);
}

TEST_CASE("diagonal pair: factor periods coexist, joint period does not") {
  const double xi = 1.0;
  const double l = 1.0 + std::sqrt(2.0);
  const Cplx w1 = std::exp(Cplx(0.0, 0.3));
  const Cplx w2 = std::exp(Cplx(0.0, -0.8));

  CHECK(op_norm(example_diag(Cplx(0, 1), xi, l, w1, w2) -
                Cplx(0, 1) * Matrix::Identity(2, 2)) <= 1e-14);

  // Each diagonal factor keeps its own period.
  for (Cplx z : EvalGrid::ten().points) {
    Matrix m0 = example_diag(z, xi, l, w1, w2);
    Matrix m1 = example_diag(z + 2.0 * kPi / xi, xi, l, w1, w2);
    CHECK(std::abs(m1(0, 0) - m0(0, 0)) <= 1e-12);
    Matrix m2 = example_diag(z + 2.0 * kPi / (l - xi), xi, l, w1, w2);
    CHECK(std::abs(m2(1, 1) - m0(1, 1)) <= 1e-12);
  }

  // Irrational length ratio: no multiple of the first period serves the
  // whole matrix.
  HerglotzFunction f = to_function(entry_diag(xi, l, w1, w2));
  double best = 1e9;
  for (int n = 1; n <= 50; ++n)
    best = std::min(best,
                    function_period_residual(f, n * 2.0 * kPi, EvalGrid::ten()));
  CHECK(best >= 1e-3);

  CHECK(herglotz_report(f, EvalGrid::dense50(), Tolerances{}).all_pass());

  // Twist aligned with the shift phase at a real point: denominator dies.
  CHECK(code_of([] {
          example_diag(Cplx(0.0, 0.0), 1.0, 2.0, Cplx(1, 0), Cplx(1, 0));
        }) == Errc::SingularDenominator);
  CHECK(code_of([] {
          example_diag(Cplx(0, 1), 2.0, 1.0, Cplx(1, 0), Cplx(1, 0));
        }) == Errc::InvalidInput);
  CHECK(code_of([] {
          example_diag(Cplx(0, 1), 0.5, 1.0, Cplx(2, 0), Cplx(1, 0));
        }) == Errc::InvalidInput);
}

TEST_CASE("constant function and its Lebesgue measure") {
  CHECK(op_norm(constant_wt(Cplx(0, 1), 3) -
                Cplx(0, 1) * Matrix::Identity(3, 3)) == 0.0);
  CHECK(op_norm(constant_wt(Cplx(2.0, -3.0), 2) +
                Cplx(0, 1) * Matrix::Identity(2, 2)) == 0.0);
  CHECK(code_of([] { constant_wt(Cplx(0.5, 0.0), 1); }) ==
        Errc::RealAxisEvaluation);

  CatalogEntry e = entry_const(2);
  CHECK(herglotz_report(to_function(e), EvalGrid::standard(), Tolerances{})
            .all_pass());
  REQUIRE(e.measure);
  MatrixMeasure leb = e.measure();
  Matrix at = eval_M_tau(leb, Cplx(5.0, 0.5));
  CHECK(op_norm(at - Cplx(0, 1) * Matrix::Identity(2, 2)) <= 1e-6);
}

TEST_CASE("catalog entries pass the class checks") {
  for (const CatalogEntry& e :
       {entry_a(), entry_b(kPi, UnitaryMatrix::checked(Matrix::Identity(1, 1))),
        entry_const(1)}) {
    HerglotzFunction f = to_function(e);
    CHECK(herglotz_report(f, EvalGrid::standard(), Tolerances{}).all_pass());
    if (e.period)
      CHECK(function_period_residual(f, *e.period, EvalGrid::standard()) <=
            1e-10);
  }
  // The half-plane example also backs onto its measure within quadrature
  // accuracy at the declared period.
  CatalogEntry a = entry_a();
  REQUIRE(a.measure);
  HerglotzFunction fm = herglotz_from_measure(a.measure());
  CHECK(function_period_residual(fm, *a.period, EvalGrid::ten()) <= 1e-6);
  // Half periods are visibly wrong.
  CHECK(function_period_residual(to_function(a), kPi, EvalGrid::standard()) >=
        1e-3);
}

TEST_CASE("sampled commutator identity for the shifted first-order operator") {
  SampledFunction f = gaussian(-6.0, 1e-3, 12001);
  std::map<int, Cplx> vhat{{1, Cplx(0.3, 0.1)}, {-1, Cplx(0.3, -0.1)}};

  // Full angle: the right-hand side degenerates and the pair commutes up
  // to the stencil floor.
  SchrodingerCheck full =
      schrodinger_commutator_residual(2.0 * kPi, vhat, f, 2.0);
  CHECK(full.residual <= 1e-5);
  CHECK(full.rhs_max <= 1e-12);

  // Half angle: identity still holds but the right-hand side is real work.
  SchrodingerCheck half = schrodinger_commutator_residual(kPi, vhat, f, 2.0);
  CHECK(half.residual <= 1e-5);
  CHECK(half.rhs_max >= 0.5);

  // No convolution: pure linear potential commutes for every s.
  SchrodingerCheck bare =
      schrodinger_commutator_residual(1.7, {}, f, -3.0);
  CHECK(bare.residual <= 1e-8);

  CHECK(code_of([&] {
          schrodinger_commutator_residual(1.0, {{1, Cplx(0.0, 0.3)}}, f, 1.0);
        }) == Errc::ConjugateSymmetryViolated);
  SampledFunction coarse = gaussian(-3.0, 0.3, 21);
  CHECK(code_of([&] {
          schrodinger_commutator_residual(1.0, vhat, coarse, 1.0);
        }) == Errc::SampleClosureViolated);
  CHECK(code_of([&] {
          schrodinger_commutator_residual(1.0, vhat, f, 0.0);
        }) == Errc::InvalidInput);
}

TEST_CASE("completed lattice is periodic at both levels until perturbed") {
  MatrixMeasure lat = periodic_lattice_measure(2.0e4);
  CHECK(tau_periodicity_residual_auto(lat, 1.0) <= 1e-8);
  HerglotzFunction f = herglotz_from_measure(lat);
  CHECK(op_norm(f.eval(Cplx(0, 1)) - Cplx(0, 1) * Matrix::Identity(1, 1)) <=
        1e-10);
  // The continuum completion keeps the function-level defect at the
  // O(cutoff^-2) scale, two decades under the 1e-8 gate.
  CHECK(function_period_residual(f, 1.0, EvalGrid::ten()) <= 1e-8);

  MatrixMeasure bumped = periodic_lattice_measure(2.0e4, 1e-3);
  CHECK(tau_periodicity_residual_auto(bumped, 1.0) >= 1e-4);
  HerglotzFunction g = herglotz_from_measure(bumped);
  CHECK(function_period_residual(g, 1.0, EvalGrid::ten()) >= 1e-4);
}
