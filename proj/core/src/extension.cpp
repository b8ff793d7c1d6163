#include "wt/extension.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "wt/errors.hpp"

namespace wt {
namespace {

// Measure-level b-periodicity gate shared by every U^n-backed operation.
constexpr double kPeriodTol = 1e-8;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Largest commutator defect of ones multiplier against the measure's
// weights: atoms exactly, densities on a probe grid per window plus tail
// samples.
double commute_defect(const MatrixMeasure& sigma, const Matrix& D) {
  double worst = 0.0;
  auto probe = [&](const Matrix& W) {
    double scale = std::max(1.0, op_norm(W));
    worst = std::max(worst, op_norm(D * W - W * D) / scale);
  };
  for (const Atom& a : sigma.stored_atoms()) probe(a.weight);
  if (sigma.has_density()) {
    const auto& d = *sigma.stored_density();
    for (auto [lo, hi] : d.smooth_windows)
      for (int k = 0; k <= 8; ++k) probe(d.density(lo + (hi - lo) * k / 8.0));
    if (d.tail)
      for (double f : {1.5, 3.0}) {
        probe(d.density(d.tail->cutoff * f));
        probe(d.density(-d.tail->cutoff * f));
      }
  }
  return worst;
}

Matrix upow(const Matrix& D, int n) {
  const int m = static_cast<int>(D.rows());
  Matrix r = Matrix::Identity(m, m);
  const Matrix step = n >= 0 ? D : Matrix(D.adjoint());
  for (int k = 0; k < std::abs(n); ++k) r = step * r;
  return r;
}

// Right-solve X = Z Y^{-1} and the condition number of Y.
std::pair<Matrix, double> solve_right(const Matrix& Z, const Matrix& Y,
                                      const char* who) {
  Eigen::JacobiSVD<Matrix> svd(Y);
  const auto& s = svd.singularValues();
  double cond = s(s.size() - 1) > 0.0
                    ? s(0) / s(s.size() - 1)
                    : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12))
    raise(Errc::SingularBracket, std::string(who) +
                                     ": bracket condition number " +
                                     sci(cond) + " exceeds 1e12");
  Matrix X = Y.transpose()
                 .colPivHouseholderQr()
                 .solve(Z.transpose())
                 .transpose();
  return {std::move(X), cond};
}

}  // namespace

UnitaryMatrix UnitaryMatrix::checked(Matrix v, double tol) {
  if (v.rows() != v.cols() || v.rows() == 0)
    raise(Errc::InvalidInput, "unitary matrix must be square");
  double defect = unitarity_defect(v);
  if (!(defect <= tol))
    raise(Errc::InvalidInput,
          "matrix is not unitary: ||V*V - I|| = " + sci(defect));
  return UnitaryMatrix{std::move(v)};
}

Matrix script_A(const MatrixMeasure& sigma, Cplx z, const EvalOptions& opt) {
  const MatrixMeasure s = sigma.as_sigma();
  const Cplx c = z - iu;
  if (c == Cplx(0.0, 0.0)) return s.sigma_mass();
  return s.sigma_mass() + c * cauchy_transform(s, z, opt);
}

Matrix script_B(const MatrixMeasure& sigma, Cplx z, const EvalOptions& opt) {
  const MatrixMeasure s = sigma.as_sigma();
  const Cplx c = z + iu;
  if (c == Cplx(0.0, 0.0)) return s.sigma_mass();
  return s.sigma_mass() + c * cauchy_transform(s, z, opt);
}

double ab_shift_residual(const MatrixMeasure& sigma, Cplx z, double b,
                         const EvalOptions& opt) {
  double resid = tau_periodicity_residual_auto(sigma, b);
  if (!(resid <= kPeriodTol))
    raise(Errc::PeriodicityPreconditionFailed,
          "ab_shift_residual: tau measure has periodicity residual " +
              sci(resid) + " at b = " + std::to_string(b));
  const Cplx zb = z + b;
  const Matrix a_gap =
      script_A(sigma, zb, opt) - ((z + iu) / (zb + iu)) * script_A(sigma, z, opt);
  const Matrix b_gap =
      script_B(sigma, zb, opt) - ((z - iu) / (zb - iu)) * script_B(sigma, z, opt);
  return std::max(op_norm(a_gap), op_norm(b_gap));
}

ExtensionEval extension_M_full(const MatrixMeasure& sigma0,
                               const UnitaryMatrix& V, Cplx z,
                               const EvalOptions& opt) {
  const MatrixMeasure s = sigma0.as_sigma();
  const int m = s.dim();
  if (V.V.rows() != m)
    raise(Errc::DimensionMismatch, "extension_M: V is " +
                                       std::to_string(V.V.rows()) +
                                       "x" + std::to_string(V.V.cols()) +
                                       " but the measure has dimension " +
                                       std::to_string(m));
  Matrix M0 = eval_M(s, z, opt);
  if ((V.V - Matrix::Identity(m, m)).norm() == 0.0)
    return {std::move(M0), 1.0};

  const Matrix A = script_A(s, z, opt);
  const Matrix B = script_B(s, z, opt);
  const Matrix bracket = (iu + z) * A * V.V + (iu - z) * B;
  auto [X, cond] = solve_right(Matrix((1.0 + z * z) * A *
                                      (Matrix::Identity(m, m) - V.V)),
                               bracket, "extension_M");
  return {Matrix(M0 + X * B), cond};
}

Matrix extension_M(const MatrixMeasure& sigma0, const UnitaryMatrix& V,
                   Cplx z, const EvalOptions& opt) {
  return extension_M_full(sigma0, V, z, opt).value;
}

struct ExtensionContext::Impl {
  MatrixMeasure sigma;
  double b = 0.0;
  Matrix D;
  Matrix Phi, Psi;
  mutable std::mutex mu;
  mutable std::map<int, TransitionMatrices> cache;
  mutable std::optional<double> period_resid;
};

ExtensionContext ExtensionContext::make(const MatrixMeasure& sigma, double b,
                                        Matrix D_mult,
                                        std::optional<Matrix> phi_basis,
                                        std::optional<Matrix> psi_basis) {
  auto impl = std::make_shared<Impl>();
  impl->sigma = sigma.as_sigma();
  impl->b = b;
  const int m = impl->sigma.dim();
  if (!(b != 0.0)) raise(Errc::InvalidInput, "context: b must be nonzero");
  if (D_mult.rows() != m || D_mult.cols() != m)
    raise(Errc::DimensionMismatch, "context: multiplier must be " +
                                       std::to_string(m) + "x" +
                                       std::to_string(m));
  double ud = unitarity_defect(D_mult);
  if (!(ud <= 1e-10))
    raise(Errc::InvalidInput,
          "context: multiplier is not unitary (defect " + sci(ud) + ")");
  double cd = commute_defect(impl->sigma, D_mult);
  if (!(cd <= 1e-10))
    raise(Errc::CommutationPreconditionFailed,
          "context: multiplier does not commute with the weights (defect " +
              sci(cd) + ")");
  impl->D = std::move(D_mult);

  const Matrix root = inv_sqrt_hpd(impl->sigma.sigma_mass());
  auto admit_basis = [&](std::optional<Matrix>& given, const char* name) {
    if (!given) return root;
    if (given->rows() != m || given->cols() != m)
      raise(Errc::DimensionMismatch,
            std::string("context: ") + name + " basis must be " +
                std::to_string(m) + "x" + std::to_string(m));
    double gd = op_norm(Matrix(given->adjoint() * impl->sigma.sigma_mass() *
                               (*given)) -
                        Matrix::Identity(m, m));
    if (!(gd <= 1e-8))
      raise(Errc::InvalidInput, std::string("context: ") + name +
                                    " basis is not orthonormal (Gram defect " +
                                    sci(gd) + ")");
    return *given;
  };
  impl->Phi = admit_basis(phi_basis, "phi");
  impl->Psi = admit_basis(psi_basis, "psi");

  ExtensionContext ctx;
  ctx.impl_ = std::move(impl);
  return ctx;
}

int ExtensionContext::dim() const { return impl_->sigma.dim(); }
double ExtensionContext::b() const { return impl_->b; }
const MatrixMeasure& ExtensionContext::measure() const { return impl_->sigma; }
const Matrix& ExtensionContext::multiplier() const { return impl_->D; }
const Matrix& ExtensionContext::phi_basis() const { return impl_->Phi; }
const Matrix& ExtensionContext::psi_basis() const { return impl_->Psi; }

double ExtensionContext::periodicity_residual() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  if (!impl_->period_resid)
    impl_->period_resid = tau_periodicity_residual_auto(impl_->sigma, impl_->b);
  return *impl_->period_resid;
}

const TransitionMatrices& ExtensionContext::transition(int n) const {
  double resid = periodicity_residual();
  if (!(resid <= kPeriodTol))
    raise(Errc::PeriodicityPreconditionFailed,
          "transition matrices need a b-periodic tau measure; residual " +
              sci(resid) + " at b = " + std::to_string(impl_->b));

  std::lock_guard<std::mutex> lock(impl_->mu);
  auto it = impl_->cache.find(n);
  if (it != impl_->cache.end()) return it->second;

  const double nb = n * impl_->b;
  const Matrix Dn = upow(impl_->D, n);
  const Matrix& Xi = impl_->Phi;
  const Matrix& Psi = impl_->Psi;
  const MatrixMeasure& s = impl_->sigma;

  TransitionMatrices tm;
  tm.A = Psi.adjoint() * Dn * script_B(s, Cplx(nb, -1.0)) * Psi;
  tm.B = Psi.adjoint() * Dn * script_B(s, Cplx(nb, 1.0)) * Xi;
  tm.C = Xi.adjoint() * Dn * script_A(s, Cplx(nb, -1.0)) * Psi;
  tm.D = Xi.adjoint() * Dn * script_A(s, Cplx(nb, 1.0)) * Xi;
  return impl_->cache.emplace(n, std::move(tm)).first->second;
}

GroupMapResult group_map(const ExtensionContext& ctx, const UnitaryMatrix& V0,
                         int n) {
  const int m = ctx.dim();
  if (V0.V.rows() != m)
    raise(Errc::DimensionMismatch, "group_map: V0 dimension mismatch");
  if (n == 0) return {V0.V, unitarity_defect(V0.V), 1.0};

  const TransitionMatrices& t = ctx.transition(n);
  const double nb = n * ctx.b();
  const Matrix num = (Cplx(nb, -2.0) * t.A * V0.V) - nb * t.B;
  const Matrix den = Cplx(nb, 2.0) * t.D - nb * t.C * V0.V;
  auto [V, cond] = solve_right(Matrix(-num), den, "group_map");
  return {V, unitarity_defect(V), cond};
}

std::optional<int> orbit_period(const ExtensionContext& ctx,
                                const UnitaryMatrix& V0, int n_max,
                                double tol) {
  if (n_max < 1) raise(Errc::InvalidInput, "orbit_period: n_max must be >= 1");
  if (!(tol > 0.0)) raise(Errc::InvalidInput, "orbit_period: tol must be > 0");

  auto scan = [&](const Matrix& start) -> std::optional<int> {
    for (int n = 1; n <= n_max; ++n) {
      Matrix Vn = polar_unitary(group_map(ctx, UnitaryMatrix{start}, n).V);
      if (op_norm(Vn - start) <= tol) return n;
    }
    return std::nullopt;
  };

  std::optional<int> got = scan(V0.V);
  Rng rng(0x5851f42d4c957f2dULL);
  std::optional<int> control = scan(random_unitary(ctx.dim(), rng));
  if (got != control)
    raise(Errc::InconsistentPeriod,
          "orbit_period: starting matrices disagree (" +
              (got ? std::to_string(*got) : std::string("none")) + " vs " +
              (control ? std::to_string(*control) : std::string("none")) +
              "); either V0 is degenerate or quadrature error exceeds tol");
  return got;
}

}  // namespace wt
