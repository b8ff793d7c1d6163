#include <doctest.h>

#include <cmath>

#include "wt/errors.hpp"
#include "wt/herglotz.hpp"
#include "wt/inversion.hpp"
#include "wt/measure.hpp"

using namespace wt;

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix w1(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

std::function<Matrix(Cplx)> cauchy_of(const MatrixMeasure& m) {
  return [m](Cplx z) { return cauchy_transform(m, z); };
}

// Closed form for a unit atom at the origin: the two-segment contour
// integral collapses to a Lorentzian in eps.
double atom_contour_oracle(double a, double b, double eps) {
  return (std::atan(b / eps) - std::atan(a / eps)) / kPi;
}

}  // namespace

TEST_CASE("interior atom is recovered and matches the arctan oracle") {
  auto m = MatrixMeasure::sigma(1, {{0.0, w1(1.0)}});
  auto sched = ContourSchedule::defaults(-1.0, 1.0);
  auto res = invert_interval(cauchy_of(m), sched);

  CHECK(std::abs(res.estimate(0, 0).real() - 1.0) < 1e-4);
  CHECK(std::abs(res.estimate(0, 0).imag()) < 1e-10);
  CHECK(res.error < 1e-4);
  REQUIRE(res.per_eps.size() == 6);

  // Trapezoid leaves an O(h^2) boundary term proportional to eps, so the
  // raw contour values sit within ~3e-7 of the closed form and the
  // extrapolation removes the rest.
  double eps = sched.eps0;
  for (int k = 0; k < 3; ++k, eps *= sched.ratio) {
    double oracle = atom_contour_oracle(-1.0, 1.0, eps);
    CHECK(std::abs(res.per_eps[k](0, 0).real() - oracle) < 1e-6);
  }
}

TEST_CASE("interval disjoint from the support returns zero") {
  auto m = MatrixMeasure::sigma(1, {{0.0, w1(1.0)}});
  auto res = invert_interval(cauchy_of(m), ContourSchedule::defaults(2.0, 3.0));
  CHECK(op_norm(res.estimate) < 1e-6);
}

TEST_CASE("quadratic weight recovers the tau mass") {
  auto m = MatrixMeasure::sigma(1, {{0.0, w1(1.0)}});
  auto sched = ContourSchedule::defaults(-1.0, 1.0);
  sched.phi = [](Cplx z) { return 1.0 + z * z; };
  auto res = invert_interval(cauchy_of(m), sched);
  CHECK(std::abs(res.estimate(0, 0).real() - 1.0) < 1e-4);

  // Same weight, atom away from the origin: tau weight is (1+l^2) w.
  auto m2 = MatrixMeasure::make_raw(MeasureKind::Sigma, 1, {{2.0, w1(1.0)}});
  auto s2 = ContourSchedule::defaults(1.0, 3.0);
  s2.phi = [](Cplx z) { return 1.0 + z * z; };
  auto r2 = invert_interval(cauchy_of(m2), s2);
  CHECK(std::abs(r2.estimate(0, 0).real() - 5.0) < 1e-3);
}

TEST_CASE("atom on the left endpoint counts with half weight") {
  auto m = MatrixMeasure::sigma(1, {{-1.0, w1(1.0)}});
  auto res =
      invert_interval(cauchy_of(m), ContourSchedule::defaults(-1.0, 1.0));
  CHECK(std::abs(res.estimate(0, 0).real() - 0.5) < 1e-3);
}

TEST_CASE("interval splitting is additive") {
  auto m = MatrixMeasure::sigma(2, {{-1.0, 0.5 * Matrix::Identity(2, 2)},
                                    {1.0, 0.5 * Matrix::Identity(2, 2)}});
  auto whole =
      invert_interval(cauchy_of(m), ContourSchedule::defaults(-2.0, 2.0));
  auto left =
      invert_interval(cauchy_of(m), ContourSchedule::defaults(-2.0, 0.3));
  auto right =
      invert_interval(cauchy_of(m), ContourSchedule::defaults(0.3, 2.0));
  double gap = op_norm(whole.estimate - left.estimate - right.estimate);
  CHECK(gap < whole.error + left.error + right.error + 1e-6);
  CHECK(op_norm(left.estimate - 0.5 * Matrix::Identity(2, 2)) < 1e-4);
}

TEST_CASE("wt function feeds the inversion through its cauchy transform") {
  auto m = MatrixMeasure::sigma(1, {{-1.0, w1(0.5)}, {1.0, w1(0.5)}});
  auto f = herglotz_from_measure(m);
  auto phi_from_wt = [&f](Cplx z) -> Matrix {
    return (f.eval(z) - z * Matrix::Identity(1, 1)) / (1.0 + z * z);
  };

  // tau mass of a cell versus its translate, recovered from the function
  // alone, reproduces the measure-level comparison.
  auto tau_in = [&](double a, double b) {
    auto s = ContourSchedule::defaults(a, b);
    s.phi = [](Cplx z) { return 1.0 + z * z; };
    return invert_interval(phi_from_wt, s).estimate(0, 0).real();
  };
  auto t = m.as_tau();

  // b=2 maps the -1 atom onto the +1 atom: both sides see residual 0.
  double fn_match =
      std::abs(tau_in(-1.3 + 2.0, 0.7 + 2.0) - tau_in(-1.3, 0.7));
  double meas_match = measure_periodicity_residual(t, 2.0, {-1.3, 0.7}, 1);
  CHECK(std::abs(fn_match - meas_match) < 1e-3);
  CHECK(meas_match < 1e-12);

  // b=1.6 moves the +1 atom out of the cell: residual is its tau weight.
  double fn_miss =
      std::abs(tau_in(-0.5 + 1.6, 1.5 + 1.6) - tau_in(-0.5, 1.5));
  double meas_miss = measure_periodicity_residual(t, 1.6, {-0.5, 1.5}, 1);
  CHECK(std::abs(fn_miss - meas_miss) < 1e-3);
  CHECK(meas_miss >= 0.99);
}

TEST_CASE("growing residuals raise ExtrapolationDiverged") {
  auto bad = [](Cplx z) -> Matrix {
    Matrix m(1, 1);
    m(0, 0) = iu / z.imag();
    return m;
  };
  CHECK_THROWS_WITH_AS(
      invert_interval(bad, ContourSchedule::defaults(-1.0, 1.0)),
      doctest::Contains("residuals grow"), Error);
}

TEST_CASE("schedule validation rejects bad parameters") {
  auto m = MatrixMeasure::sigma(1, {{0.0, w1(1.0)}});
  auto s = ContourSchedule::defaults(-1.0, 1.0);
  s.count = 2;
  CHECK_THROWS_AS(invert_interval(cauchy_of(m), s), Error);
  s = ContourSchedule::defaults(-1.0, 1.0);
  s.ratio = 1.0;
  CHECK_THROWS_AS(invert_interval(cauchy_of(m), s), Error);
  s = ContourSchedule::defaults(1.0, -1.0);
  CHECK_THROWS_AS(invert_interval(cauchy_of(m), s), Error);
}
