#include "wt/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "wt/errors.hpp"

namespace wt {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

Matrix scalar(Cplx v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

void require_unimodular(Cplx w, const char* who) {
  if (std::abs(std::abs(w) - 1.0) > 1e-12)
    raise(Errc::InvalidInput, std::string(who) + ": twist must be unimodular");
}

// Scalar twisted-shift function of length L and twist omega. Same family
// as example_b with m = 1; kept separate so the scalar denominator can be
// reported precisely.
Cplx scalar_twisted(Cplx z, double L, Cplx omega) {
  Cplx den = 1.0 - std::exp(-iu * z * L) * omega;
  if (std::abs(den) < 1e-14)
    raise(Errc::SingularDenominator,
          "twisted-shift denominator vanishes at z = " + fmt(z.real()) +
              (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "i");
  Cplx num = (std::exp(L * (1.0 - iu * z)) - 1.0) * (1.0 - std::exp(L) * omega);
  return -iu + 2.0 * iu * num / ((std::exp(2.0 * L) - 1.0) * den);
}

}  // namespace

HerglotzFunction to_function(const CatalogEntry& e) {
  HerglotzFunction f;
  f.dim = e.dim;
  f.eval = e.eval;
  f.provenance = HerglotzFunction::Provenance::ClosedForm;
  f.id = e.id;
  f.period = e.period;
  return f;
}

Cplx example_a(Cplx z) {
  if (!(z.imag() > 0.0))
    raise(Errc::LowerHalfPlane,
          "example a is defined on the open upper half-plane only");
  return iu + std::exp(iu * z) - std::exp(-1.0);
}

Matrix example_b(Cplx z, double l, const UnitaryMatrix& V) {
  if (!(l > 0.0)) raise(Errc::InvalidInput, "example b: l must be positive");
  const int m = static_cast<int>(V.V.rows());
  Matrix id = Matrix::Identity(m, m);
  Matrix a = id - std::exp(-iu * z * l) * V.V;
  Eigen::JacobiSVD<Matrix> svd(a);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(m - 1);
  if (!(smin > 0.0) || smax / smin > 1e12)
    raise(Errc::SingularResolvent,
          "example b: I - e^{-izl} V is singular at this z (eigenvalue "
          "phase of V on the axis)");
  Matrix x = a.partialPivLu().solve(id - std::exp(l) * V.V);
  Cplx factor = 2.0 * iu * (std::exp(l * (1.0 - iu * z)) - 1.0) /
                (std::exp(2.0 * l) - 1.0);
  return -iu * id + factor * x;
}

Matrix example_diag(Cplx z, double xi, double l, Cplx omega1, Cplx omega2) {
  if (!(xi > 0.0) || !(xi < l))
    raise(Errc::InvalidInput, "example diag: need 0 < xi < l");
  require_unimodular(omega1, "example diag");
  require_unimodular(omega2, "example diag");
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = scalar_twisted(z, xi, omega1);
  m(1, 1) = scalar_twisted(z, l - xi, omega2);
  return m;
}

Matrix constant_wt(Cplx z, int m) {
  if (m < 1 || m > MatrixMeasure::max_dim)
    raise(Errc::InvalidInput, "constant_wt: bad dimension");
  if (z.imag() == 0.0)
    raise(Errc::RealAxisEvaluation,
          "constant_wt: the two half-plane values disagree on the axis");
  return (z.imag() > 0.0 ? iu : -iu) * Matrix::Identity(m, m);
}

SchrodingerCheck schrodinger_commutator_residual(
    double s, const std::map<int, Cplx>& vhat, const SampledFunction& f,
    double gamma) {
  if (gamma == 0.0)
    raise(Errc::InvalidInput, "schrodinger check: gamma must be nonzero");
  if (!(f.dx > 0.0) || f.values.size() < 5)
    raise(Errc::InvalidInput,
          "schrodinger check: need at least five samples at positive step");

  // The potential is real iff its transform is conjugate-even.
  for (const auto& [k, v] : vhat) {
    if (std::abs(v) == 0.0) continue;
    auto it = vhat.find(-k);
    if (it == vhat.end() ||
        std::abs(it->second - std::conj(v)) > 1e-12 * std::max(1.0, std::abs(v)))
      raise(Errc::ConjugateSymmetryViolated,
            "schrodinger check: coefficient at " + std::to_string(-k) +
                " must be the conjugate of the one at " + std::to_string(k));
  }

  // Integer shifts must land on sample nodes.
  struct Shift {
    int offset;
    Cplx v;
    double k;
  };
  std::vector<Shift> shifts;
  for (const auto& [k, v] : vhat) {
    if (std::abs(v) == 0.0) continue;
    double raw = static_cast<double>(k) / f.dx;
    long long p = std::llround(raw);
    if (std::abs(static_cast<double>(p) * f.dx - k) > 1e-9)
      raise(Errc::SampleClosureViolated,
            "schrodinger check: shift by " + std::to_string(k) +
                " does not land on the sample grid (step " + fmt(f.dx) + ")");
    shifts.push_back({static_cast<int>(p), v, static_cast<double>(k)});
  }

  const int n = static_cast<int>(f.values.size());
  int lo = 2, hi = n - 3;
  for (const Shift& sh : shifts) {
    lo = std::max(lo, -sh.offset);
    hi = std::min(hi, n - 1 - sh.offset);
  }
  if (lo > hi)
    raise(Errc::SampleClosureViolated,
          "schrodinger check: no sample has all its shifted partners in "
          "range");

  std::vector<Cplx> g(f.values.size());
  for (int j = 0; j < n; ++j)
    g[static_cast<size_t>(j)] = std::exp(Cplx(0.0, s * f.x(static_cast<size_t>(j)))) *
                                f.values[static_cast<size_t>(j)];

  // Five-point derivative; the interior margin of 2 is already in [lo, hi].
  auto deriv = [&](const std::vector<Cplx>& a, int j) {
    return (-a[static_cast<size_t>(j) + 2] + 8.0 * a[static_cast<size_t>(j) + 1] -
            8.0 * a[static_cast<size_t>(j) - 1] + a[static_cast<size_t>(j) - 2]) /
           (12.0 * f.dx);
  };
  auto apply = [&](const std::vector<Cplx>& a, int j, double t) {
    Cplx out = -iu * deriv(a, j) + (t * t / gamma) * a[static_cast<size_t>(j)];
    for (const Shift& sh : shifts)
      out += sh.v * a[static_cast<size_t>(j + sh.offset)];
    return out;
  };

  SchrodingerCheck chk;
  for (int j = lo; j <= hi; ++j) {
    double t = f.x(static_cast<size_t>(j));
    Cplx osc = std::exp(Cplx(0.0, s * t));
    Cplx lhs = osc * apply(f.values, j, t) - apply(g, j, t) +
               s * g[static_cast<size_t>(j)];
    Cplx rhs = 0.0;
    for (const Shift& sh : shifts)
      rhs += sh.v * (1.0 - std::exp(Cplx(0.0, s * sh.k))) *
             f.values[static_cast<size_t>(j + sh.offset)];
    rhs *= osc;
    chk.residual = std::max(chk.residual, std::abs(lhs - rhs));
    chk.rhs_max = std::max(chk.rhs_max, std::abs(rhs));
  }
  return chk;
}

CatalogEntry entry_a() {
  CatalogEntry e;
  e.id = "a";
  e.params_doc = "none";
  e.dim = 1;
  e.eval = [](Cplx z) { return scalar(example_a(z)); };
  e.period = 2.0 * pi;
  e.measure = [] { return example_a_measure(); };
  return e;
}

CatalogEntry entry_b(double l, const UnitaryMatrix& V) {
  if (!(l > 0.0)) raise(Errc::InvalidInput, "entry b: l must be positive");
  CatalogEntry e;
  e.id = "b";
  e.params_doc = "l = " + fmt(l) + ", V " + std::to_string(V.V.rows()) + "x" +
                 std::to_string(V.V.cols());
  e.dim = static_cast<int>(V.V.rows());
  Matrix v = V.V;
  e.eval = [l, v](Cplx z) { return example_b(z, l, UnitaryMatrix{v}); };
  e.period = 2.0 * pi / l;
  return e;
}

CatalogEntry entry_diag(double xi, double l, Cplx omega1, Cplx omega2) {
  CatalogEntry e;
  e.id = "diag";
  e.params_doc = "xi = " + fmt(xi) + ", l = " + fmt(l) +
                 "; factor periods 2pi/xi and 2pi/(l - xi)";
  e.dim = 2;
  e.eval = [=](Cplx z) { return example_diag(z, xi, l, omega1, omega2); };
  // No joint period is declared: the factors only share one when the
  // length ratio is rational.
  return e;
}

CatalogEntry entry_const(int m) {
  CatalogEntry e;
  e.id = "const";
  e.params_doc = "m = " + std::to_string(m);
  e.dim = m;
  e.eval = [m](Cplx z) { return constant_wt(z, m); };
  e.measure = [m] { return lebesgue_tau(m); };
  return e;
}

MatrixMeasure example_a_measure() {
  DensitySpec d;
  d.density = [](double x) {
    return scalar((1.0 + std::sin(x)) / (pi * (1.0 + x * x)));
  };
  d.smooth_windows = {{-50.0, 50.0}};
  d.tail = TailBound{2.0 / pi, 2.0, 50.0};
  return MatrixMeasure::sigma(1, {}, d);
}

MatrixMeasure lebesgue_tau(int m) {
  if (m < 1 || m > MatrixMeasure::max_dim)
    raise(Errc::InvalidInput, "lebesgue_tau: bad dimension");
  DensitySpec d;
  d.density = [m](double) -> Matrix {
    return Matrix::Identity(m, m) / pi;
  };
  d.smooth_windows = {{-50.0, 50.0}};
  d.tail = TailBound{1.0 / pi, 0.0, 50.0};
  return MatrixMeasure::tau(m, {}, d);
}

MatrixMeasure periodic_lattice_measure(double cutoff, double bump) {
  if (!(cutoff >= 8.0))
    raise(Errc::InvalidInput, "periodic lattice: cutoff too small");
  const long long top = static_cast<long long>(std::floor(cutoff));
  const double edge = static_cast<double>(top);
  double s = 0.0;
  for (long long j = -top; j <= top; ++j) {
    double x = static_cast<double>(j);
    s += (1.0 + (j == 0 ? bump : 0.0)) / (1.0 + x * x);
  }
  // sigma mass = c * (s + int_{|x|>edge} dx/(1+x^2)), pinned to 1 exactly.
  const double c = 1.0 / (s + pi - 2.0 * std::atan(edge));
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(2 * top + 1));
  for (long long j = -top; j <= top; ++j) {
    double x = static_cast<double>(j);
    atoms.push_back({x, scalar(c * (1.0 + (j == 0 ? bump : 0.0)))});
  }
  DensitySpec d;
  d.density = [c, edge](double x) {
    return scalar(std::abs(x) > edge ? c : 0.0);
  };
  d.tail = TailBound{c, 0.0, edge};
  return MatrixMeasure::tau(1, atoms, d);
}

}  // namespace wt
