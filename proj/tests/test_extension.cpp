#include <doctest.h>

#include <cmath>
#include <complex>

#include "wt/errors.hpp"
#include "wt/extension.hpp"
#include "wt/herglotz.hpp"
#include "wt/measure.hpp"

using namespace wt;

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix w1(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

Matrix u1(Cplx v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

// sigma with Cauchy density: tau form is Lebesgue/pi, so it is b-periodic
// for every b.
MatrixMeasure cauchy_sigma(int m) {
  DensitySpec d;
  d.density = [m](double x) -> Matrix {
    return Matrix::Identity(m, m) / (kPi * (1.0 + x * x));
  };
  d.smooth_windows = {{-50.0, 50.0}};
  d.tail = TailBound{1.0 / kPi, 2.0, 50.0};
  return MatrixMeasure::sigma(m, {}, d);
}

// Equal-tau-weight integer lattice truncated at |j| <= half; sigma weights
// are w / (1 + j^2), normalized to unit mass.
MatrixMeasure lattice_sigma(int half) {
  double s = 0.0;
  for (int j = -half; j <= half; ++j) s += 1.0 / (1.0 + double(j) * j);
  std::vector<Atom> atoms;
  for (int j = -half; j <= half; ++j)
    atoms.push_back({double(j), w1(1.0 / (s * (1.0 + double(j) * j)))});
  return MatrixMeasure::sigma(1, std::move(atoms));
}

}  // namespace

TEST_CASE("half plane kernels on a single atom") {
  auto m = MatrixMeasure::sigma(1, {{0.0, w1(1.0)}});
  CHECK(std::abs(script_A(m, Cplx(0, 2))(0, 0) - Cplx(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(script_B(m, Cplx(0, 2))(0, 0) - Cplx(-0.5, 0.0)) < 1e-15);
  // At z = i the kernel collapses to 1 and the mass comes back bit-exact.
  CHECK(script_A(m, Cplx(0, 1))(0, 0) == Cplx(1.0, 0.0));
}

TEST_CASE("half plane kernels on the Cauchy density match residues") {
  auto m = cauchy_sigma(1);
  // A(z) = 2i/(z+i) and B(z) = 0 in the upper half plane.
  CHECK(std::abs(script_A(m, Cplx(0, 2))(0, 0) - Cplx(2.0 / 3.0, 0.0)) < 1e-8);
  CHECK(std::abs(script_A(m, Cplx(1, 1))(0, 0) - 2.0 * iu / Cplx(1, 2)) <
        1e-8);
  CHECK(std::abs(script_B(m, Cplx(0, 2))(0, 0)) < 1e-8);
  CHECK(op_norm(script_A(m, Cplx(0, 1)) - m.sigma_mass()) == 0.0);
}

TEST_CASE("shift covariance holds for translation invariant tau") {
  auto m = cauchy_sigma(1);
  CHECK(ab_shift_residual(m, Cplx(0, 1), 0.7) < 1e-8);
  CHECK(ab_shift_residual(m, Cplx(0, 2), 2.0) < 1e-8);
  CHECK(ab_shift_residual(m, Cplx(-1.5, 0.6), 1.0) < 1e-8);
}

TEST_CASE("shift covariance rejects a non-periodic measure") {
  auto m = MatrixMeasure::sigma(1, {{-1.0, w1(0.5)}, {1.0, w1(0.5)}});
  CHECK_THROWS_AS(ab_shift_residual(m, Cplx(0, 1), 1.0), Error);
}

TEST_CASE("identity extension short-circuits to the base function") {
  auto m = MatrixMeasure::sigma(1, {{0.0, w1(1.0)}});
  auto V = UnitaryMatrix::checked(Matrix::Identity(1, 1));
  Cplx z(0.8, 1.1);
  CHECK(extension_M(m, V, z)(0, 0) == eval_M(m, z)(0, 0));
}

TEST_CASE("scalar extension formula on one atom") {
  auto m = MatrixMeasure::sigma(1, {{0.0, w1(1.0)}});
  auto Vm1 = UnitaryMatrix::checked(u1(Cplx(-1.0, 0.0)));
  // V = -1 gives M_V(z) = z.
  CHECK(std::abs(extension_M(m, Vm1, Cplx(0, 2))(0, 0) - Cplx(0, 2)) < 1e-12);
  CHECK(std::abs(extension_M(m, Vm1, Cplx(1.3, 0.4))(0, 0) - Cplx(1.3, 0.4)) <
        1e-12);

  // V = e^{i gamma} relocates the atom to tan(gamma/2) with unit weight.
  double gamma = kPi / 2.0;
  auto V = UnitaryMatrix::checked(u1(std::exp(iu * gamma)));
  auto target = MatrixMeasure::make_raw(MeasureKind::Sigma, 1,
                                        {{std::tan(gamma / 2.0), w1(1.0)}});
  for (Cplx z : {Cplx(0, 2), Cplx(1, 1), Cplx(-0.5, 0.8)})
    CHECK(std::abs(extension_M(m, V, z)(0, 0) - eval_M(target, z)(0, 0)) <
          1e-12);

  // Every extension keeps the normalization M(i) = i.
  CHECK(std::abs(extension_M(m, V, Cplx(0, 1))(0, 0) - iu) < 1e-14);
  CHECK(extension_M_full(m, V, Cplx(0, 2)).bracket_cond >= 1.0);
}

TEST_CASE("extension transport preserves the period residual") {
  auto m = cauchy_sigma(1);
  Rng rng(42);
  auto V = UnitaryMatrix::checked(random_unitary(1, rng));
  HerglotzFunction base = herglotz_from_measure(m);
  HerglotzFunction ext{1,
                       [m, V](Cplx z) { return extension_M(m, V, z); },
                       HerglotzFunction::Provenance::MeasureBacked,
                       "extension",
                       {}};
  auto grid = EvalGrid::ten();
  double r0 = function_period_residual(base, 0.9, grid);
  double r1 = function_period_residual(ext, 0.9, grid);
  CHECK(std::abs(r0 - r1) < 1e-6);
  CHECK(r0 < 1e-8);
}

TEST_CASE("unitary admission checks the defect") {
  CHECK_THROWS_AS(UnitaryMatrix::checked(1.1 * Matrix::Identity(2, 2)), Error);
  Matrix rot(2, 2);
  rot << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
  CHECK(UnitaryMatrix::checked(rot).V(0, 0).real() ==
        doctest::Approx(std::cos(0.3)));
}

TEST_CASE("context admission enforces the invariants") {
  auto good = cauchy_sigma(2);
  CHECK_NOTHROW(ExtensionContext::make(good, 1.0, Matrix::Identity(2, 2)));
  CHECK_THROWS_AS(
      ExtensionContext::make(good, 1.0, 1.1 * Matrix::Identity(2, 2)), Error);

  // Non-scalar weights reject a multiplier that fails to commute.
  Matrix wa = Matrix::Zero(2, 2), wb = Matrix::Zero(2, 2);
  wa(0, 0) = 0.5;
  wa(1, 1) = 0.3;
  wb(0, 0) = 0.5;
  wb(1, 1) = 0.7;
  auto diag = MatrixMeasure::sigma(2, {{-1.0, wa}, {1.0, wb}});
  Matrix swap = Matrix::Zero(2, 2);
  swap(0, 1) = 1.0;
  swap(1, 0) = 1.0;
  CHECK_THROWS_AS(ExtensionContext::make(diag, 1.0, swap), Error);

  // A basis with the wrong Gram is rejected.
  CHECK_THROWS_AS(ExtensionContext::make(good, 1.0, Matrix::Identity(2, 2),
                                         2.0 * Matrix::Identity(2, 2)),
                  Error);
}

TEST_CASE("transition matrices at n=0 are Gram matrices") {
  auto ctx = ExtensionContext::make(cauchy_sigma(2), 1.0,
                                    Matrix::Identity(2, 2));
  const auto& t = ctx.transition(0);
  CHECK(op_norm(t.A - Matrix::Identity(2, 2)) < 1e-9);
  CHECK(op_norm(t.D - Matrix::Identity(2, 2)) < 1e-9);
  CHECK(op_norm(t.B - Matrix(t.C.adjoint())) < 1e-12);
}

TEST_CASE("transition matrices match a dense lattice sum") {
  auto m = lattice_sigma(15);
  Cplx d = std::exp(iu * (kPi / 7.0));
  auto ctx = ExtensionContext::make(m, 1.0, u1(d));
  const auto& t = ctx.transition(1);

  // Independent dense sums over the atoms, constant bases = 1 (unit mass).
  Cplx sa(0, 0), sb(0, 0), sc(0, 0), sd(0, 0);
  for (const Atom& a : m.stored_atoms()) {
    Cplx lam(a.lambda, 0.0);
    double w = a.weight(0, 0).real();
    sa += w * (lam + iu) / (lam - 1.0 + iu);
    sb += w * (lam + iu) / (lam - 1.0 - iu);
    sc += w * (lam - iu) / (lam - 1.0 + iu);
    sd += w * (lam - iu) / (lam - 1.0 - iu);
  }
  CHECK(std::abs(t.A(0, 0) - d * sa) < 1e-12);
  CHECK(std::abs(t.B(0, 0) - d * sb) < 1e-12);
  CHECK(std::abs(t.C(0, 0) - d * sc) < 1e-12);
  CHECK(std::abs(t.D(0, 0) - d * sd) < 1e-12);
}

TEST_CASE("transition matrices refuse non-periodic measures") {
  auto m = MatrixMeasure::sigma(1, {{-1.0, w1(0.5)}, {1.0, w1(0.5)}});
  auto ctx = ExtensionContext::make(m, 1.0, Matrix::Identity(1, 1));
  CHECK_THROWS_AS(ctx.transition(1), Error);
}

TEST_CASE("group maps satisfy identity, structure, law, and inverse") {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = iu;
  auto ctx = ExtensionContext::make(cauchy_sigma(2), 1.0, D);
  Rng rng(7);
  auto V0 = UnitaryMatrix::checked(random_unitary(2, rng));

  auto T = [&](const Matrix& v, int n) {
    return group_map(ctx, UnitaryMatrix{v}, n);
  };

  // T_0 keeps the input untouched.
  CHECK((T(V0.V, 0).V - V0.V).norm() == 0.0);

  // Exactly periodic measure commuting with D: T_n = D^n V0 D^-n.
  Matrix oracle = D * V0.V * D.adjoint();
  auto g1 = T(V0.V, 1);
  CHECK(op_norm(g1.V - oracle) < 1e-8);
  CHECK(g1.unitarity_defect < 1e-8);
  CHECK(g1.bracket_cond < 1e3);

  // Group law at several index pairs.
  CHECK(op_norm(T(T(V0.V, 1).V, 1).V - T(V0.V, 2).V) < 1e-6);
  CHECK(op_norm(T(T(V0.V, 2).V, 1).V - T(V0.V, 3).V) < 1e-6);
  CHECK(op_norm(T(T(V0.V, -1).V, 2).V - T(V0.V, 1).V) < 1e-6);

  // Group inverse up to |n| = 5.
  for (int n : {1, 3, 5})
    CHECK(op_norm(T(T(V0.V, -n).V, n).V - V0.V) < 1e-6);
}

TEST_CASE("orbit period detects cyclic and acyclic multipliers") {
  Rng rng(11);
  auto V0 = UnitaryMatrix::checked(random_unitary(2, rng));

  auto ctx1 = ExtensionContext::make(cauchy_sigma(2), 1.0,
                                     Matrix::Identity(2, 2));
  CHECK(orbit_period(ctx1, V0, 5, 1e-6) == 1);

  Matrix D4 = Matrix::Zero(2, 2);
  D4(0, 0) = 1.0;
  D4(1, 1) = iu;
  auto ctx4 = ExtensionContext::make(cauchy_sigma(2), 1.0, D4);
  CHECK(orbit_period(ctx4, V0, 10, 1e-6) == 4);

  Matrix Dirr = Matrix::Zero(2, 2);
  Dirr(0, 0) = 1.0;
  Dirr(1, 1) = std::exp(iu * 1.0);
  auto ctxn = ExtensionContext::make(cauchy_sigma(2), 1.0, Dirr);
  CHECK(orbit_period(ctxn, V0, 30, 1e-6) == std::nullopt);

  // A starting matrix commuting with D sees a shorter orbit than the
  // control start; the disagreement is surfaced, not silently averaged.
  auto Vdeg = UnitaryMatrix::checked(Matrix::Identity(2, 2));
  CHECK_THROWS_AS(orbit_period(ctx4, Vdeg, 10, 1e-6), Error);
}
