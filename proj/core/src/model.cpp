#include "wt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "wt/errors.hpp"
#include "wt/herglotz.hpp"

namespace wt {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

// Max commutator norm against the model weights, relative to their size.
double weight_commute_defect(const FiniteModel& model, const Matrix& a) {
  double worst = 0.0;
  for (const Matrix& w : model.weights) {
    double scale = std::max(1.0, op_norm(w));
    worst = std::max(worst, op_norm(a * w - w * a) / scale);
  }
  return worst;
}

void require_square_dim(const FiniteModel& model, const Matrix& u,
                        const char* who) {
  if (u.rows() != model.space_dim() || u.cols() != model.space_dim())
    raise(Errc::DimensionMismatch,
          std::string(who) + ": operator must be " +
              std::to_string(model.space_dim()) + " x " +
              std::to_string(model.space_dim()));
}

// Block-diagonal weight Gram matrix, optionally through f(W_j).
template <typename F>
Matrix block_diag_weights(const FiniteModel& model, F&& f) {
  const int m = model.dim;
  Matrix g = Matrix::Zero(model.space_dim(), model.space_dim());
  for (int j = 0; j < model.size(); ++j)
    g.block(j * m, j * m, m, m) = f(model.weights[static_cast<size_t>(j)]);
  return g;
}

// Orthonormalizing sandwich G^{1/2} U G^{-1/2}; weights must be strictly
// positive for the inverse root to mean anything.
Matrix orthonormalized(const FiniteModel& model, const Matrix& u,
                       const char* who) {
  for (int j = 0; j < model.size(); ++j) {
    const Matrix& w = model.weights[static_cast<size_t>(j)];
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm_part(w));
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 1e-12 * std::max(1.0, hi)))
      raise(Errc::RankDeficiency,
            std::string(who) + ": weight at lattice index " +
                std::to_string(j) +
                " is singular; the weighted adjoint is undefined");
  }
  Matrix gh = block_diag_weights(model, [](const Matrix& w) { return sqrt_hpsd(w); });
  Matrix ghi = block_diag_weights(model, [](const Matrix& w) { return inv_sqrt_hpd(w); });
  return gh * u * ghi;
}

// Interior sub-block of a full-space operator.
Matrix interior_block(const FiniteModel& model, const Matrix& a) {
  auto [lo, hi] = model.interior();
  const int m = model.dim;
  return a.block(lo * m, lo * m, (hi - lo + 1) * m, (hi - lo + 1) * m);
}

Vector lattice_diagonal(const FiniteModel& model) {
  Vector d(model.space_dim());
  for (int j = 0; j < model.size(); ++j)
    d.segment(j * model.dim, model.dim)
        .setConstant(Cplx(model.lattice[static_cast<size_t>(j)], 0.0));
  return d;
}

void require_off_axis_point(const FiniteModel& model, Cplx z, const char* who) {
  if (z.imag() != 0.0) return;
  for (double l : model.lattice)
    if (l == z.real())
      raise(Errc::PoleHit, std::string(who) + ": z = " + fmt(z.real()) +
                               " is a lattice point");
  raise(Errc::RealAxisEvaluation,
        std::string(who) + ": z must be off the real axis");
}

}  // namespace

std::optional<int> FiniteModel::stride_for(double b) const {
  if (b == 0.0) return 0;
  if (!step) return std::nullopt;
  double raw = b / *step;
  long long s = std::llround(raw);
  if (std::abs(static_cast<double>(s) * *step - b) > 1e-9 * std::max(1.0, std::abs(b)))
    return std::nullopt;
  return static_cast<int>(s);
}

FiniteModel build_model(const MatrixMeasure& sigma, int boundary_layers) {
  if (boundary_layers < 0)
    raise(Errc::InvalidInput, "build_model: boundary_layers must be >= 0");
  MatrixMeasure s = sigma.as_sigma();
  if (s.has_density())
    raise(Errc::InvalidInput,
          "build_model: measure must be purely atomic (densities have no "
          "finite lattice)");
  std::vector<Atom> atoms = s.atoms();
  if (atoms.empty()) raise(Errc::InvalidInput, "build_model: no atoms");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.lambda < b.lambda; });
  for (std::size_t j = 1; j < atoms.size(); ++j)
    if (!(atoms[j].lambda > atoms[j - 1].lambda))
      raise(Errc::InvalidInput,
            "build_model: lattice points must be distinct (duplicate at " +
                fmt(atoms[j].lambda) + ")");

  FiniteModel model;
  model.dim = s.dim();
  model.boundary_layers = boundary_layers;
  const int n = static_cast<int>(atoms.size());
  const int m = model.dim;
  if (n - 2 * boundary_layers < 1)
    raise(Errc::InvalidInput,
          "build_model: boundary layers consume the whole lattice (" +
              std::to_string(n) + " points, " +
              std::to_string(boundary_layers) + " layers per side)");
  if (n < 2 * m + 2 * boundary_layers) {
    if (boundary_layers > 0)
      raise(Errc::InvalidInput,
            "build_model: need at least " +
                std::to_string(2 * m + 2 * boundary_layers) +
                " lattice points, got " + std::to_string(n));
    model.undersized = true;  // legal but the symmetric domain may be {0}
  }

  Matrix mass = Matrix::Zero(m, m);
  for (const Atom& a : atoms) mass += a.weight;
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm_part(mass));
  if (!(es.eigenvalues().minCoeff() >
        1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())))
    raise(Errc::RankDeficiency,
          "build_model: total weight is singular; constants do not embed");
  Matrix root = inv_sqrt_hpd(mass);

  model.lattice.reserve(atoms.size());
  model.weights.reserve(atoms.size());
  for (const Atom& a : atoms) {
    model.lattice.push_back(a.lambda);
    model.weights.push_back(herm_part(root * a.weight * root));
  }

  if (n >= 2) {
    double d0 = model.lattice[1] - model.lattice[0];
    bool arithmetic = true;
    for (int j = 1; j + 1 < n; ++j) {
      double dj = model.lattice[static_cast<size_t>(j) + 1] -
                  model.lattice[static_cast<size_t>(j)];
      if (std::abs(dj - d0) > 1e-12 * std::max(1.0, std::abs(model.lattice[static_cast<size_t>(j)]))) {
        arithmetic = false;
        break;
      }
    }
    if (arithmetic) model.step = d0;
  }

  // The constraint functional must have full rank m, so the defect space
  // has the advertised dimension. With a positive total mass this is
  // automatic; the check guards degenerate hand-built inputs.
  Eigen::JacobiSVD<Matrix> svd(domain_constraint_matrix(model));
  int rank = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > 1e-12 * svd.singularValues()(0)) ++rank;
  if (rank != m)
    raise(Errc::RankDeficiency,
          "build_model: boundary functional has rank " + std::to_string(rank) +
              ", expected " + std::to_string(m));
  return model;
}

Matrix domain_constraint_matrix(const FiniteModel& model) {
  const int m = model.dim;
  Matrix r(m, model.space_dim());
  for (int j = 0; j < model.size(); ++j)
    r.block(0, j * m, m, m) =
        Cplx(model.lattice[static_cast<size_t>(j)], 1.0) *
        model.weights[static_cast<size_t>(j)];
  return r;
}

Vector defect_vector(const FiniteModel& model, Cplx z, const Vector& xi) {
  if (xi.size() != model.dim)
    raise(Errc::DimensionMismatch, "defect_vector: xi must have length " +
                                       std::to_string(model.dim));
  require_off_axis_point(model, z, "defect_vector");
  Vector v(model.space_dim());
  for (int j = 0; j < model.size(); ++j) {
    double l = model.lattice[static_cast<size_t>(j)];
    v.segment(j * model.dim, model.dim) = (Cplx(l, -1.0) / (l - z)) * xi;
  }
  return v;
}

Matrix s_type_matrix(const FiniteModel& model, const UnitaryMatrix& D,
                     double b) {
  if (D.V.rows() != model.dim || D.V.cols() != model.dim)
    raise(Errc::DimensionMismatch,
          "s_type_matrix: multiplier must be " + std::to_string(model.dim) +
              " x " + std::to_string(model.dim));
  if (weight_commute_defect(model, D.V) > 1e-10)
    raise(Errc::CommutationPreconditionFailed,
          "s_type_matrix: multiplier does not commute with the weights");
  std::optional<int> stride = model.stride_for(b);
  if (!stride)
    raise(Errc::LatticeIncompatible,
          "s_type_matrix: shift " + fmt(b) +
              " is not an integer multiple of the lattice step");
  if (std::abs(*stride) > model.boundary_layers && *stride != 0)
    raise(Errc::LatticeIncompatible,
          "s_type_matrix: shift spans " + std::to_string(std::abs(*stride)) +
              " lattice cells but only " +
              std::to_string(model.boundary_layers) +
              " boundary layers were reserved");

  const int m = model.dim;
  const int n = model.size();
  Matrix u = Matrix::Zero(model.space_dim(), model.space_dim());
  for (int j = 0; j < n; ++j) {
    int src = j - *stride;
    if (src < 0 || src >= n) continue;  // shifted off the lattice: drop
    double l = model.lattice[static_cast<size_t>(j)];
    // b = 0 must give the identity exactly, so skip the trivial quotient.
    Cplx kappa = (b == 0.0) ? Cplx(1.0, 0.0)
                            : Cplx(l, -1.0) / Cplx(l - b, -1.0);
    u.block(j * m, src * m, m, m) = kappa * D.V;
  }
  return u;
}

double interior_isometry_defect(const FiniteModel& model, const Matrix& u) {
  require_square_dim(model, u, "interior_isometry_defect");
  Matrix g = block_diag_weights(model, [](const Matrix& w) { return w; });
  Matrix gram_gap = u.adjoint() * g * u - g;
  return op_norm(interior_block(model, gram_gap));
}

double commutation_residual(const FiniteModel& model, const Matrix& u,
                            double b) {
  require_square_dim(model, u, "commutation_residual");
  Matrix ut = orthonormalized(model, u, "commutation_residual");
  Vector h = lattice_diagonal(model);
  Matrix a = ut * h.asDiagonal() * ut.adjoint() - Matrix(h.asDiagonal()) +
             b * Matrix::Identity(model.space_dim(), model.space_dim());
  return op_norm(interior_block(model, a));
}

double spectral_shift_residual(const FiniteModel& model, const Matrix& u,
                               double b, std::pair<double, double> delta) {
  require_square_dim(model, u, "spectral_shift_residual");
  if (!(delta.first <= delta.second))
    raise(Errc::InvalidInput, "spectral_shift_residual: empty interval");
  auto [lo, hi] = model.interior();
  double rlo = model.lattice[static_cast<size_t>(lo)];
  double rhi = model.lattice[static_cast<size_t>(hi)];
  auto inside = [&](double a0, double a1) { return a0 >= rlo && a1 <= rhi; };
  if (!inside(delta.first, delta.second) ||
      !inside(delta.first + b, delta.second + b))
    raise(Errc::WindowExceeded,
          "spectral_shift_residual: interval [" + fmt(delta.first) + ", " +
              fmt(delta.second) + "] shifted by " + fmt(b) +
              " leaves the interior spectral range [" + fmt(rlo) + ", " +
              fmt(rhi) + "]");

  auto marker = [&](double a0, double a1) {
    Vector d(model.space_dim());
    for (int j = 0; j < model.size(); ++j) {
      double l = model.lattice[static_cast<size_t>(j)];
      d.segment(j * model.dim, model.dim)
          .setConstant(Cplx((l >= a0 && l <= a1) ? 1.0 : 0.0, 0.0));
    }
    return d;
  };
  Matrix ut = orthonormalized(model, u, "spectral_shift_residual");
  Vector e0 = marker(delta.first, delta.second);
  Vector e1 = marker(delta.first + b, delta.second + b);
  Matrix a = ut * e0.asDiagonal() * ut.adjoint() - Matrix(e1.asDiagonal());
  return op_norm(interior_block(model, a));
}

Matrix wt_from_model(const FiniteModel& model, Cplx z) {
  require_off_axis_point(model, z, "wt_from_model");
  const int m = model.dim;
  Matrix id = Matrix::Identity(m, m);
  Matrix acc = Matrix::Zero(m, m);
  for (int j = 0; j < model.size(); ++j) {
    double l = model.lattice[static_cast<size_t>(j)];
    // Per-block resolvent solve; H is block-diagonal so the dense system
    // factors into these m x m pieces.
    Matrix x = ((l - z) * id).partialPivLu().solve(id);
    acc += model.weights[static_cast<size_t>(j)] * ((z * l + 1.0) * x);
  }
  return acc;
}

double basis_conjugation_check(const FiniteModel& model,
                               const UnitaryMatrix& W0, const EvalGrid& grid) {
  if (W0.V.rows() != model.dim)
    raise(Errc::DimensionMismatch, "basis_conjugation_check: basis rotation "
                                   "must match the coefficient dimension");
  if (weight_commute_defect(model, W0.V) > 1e-10)
    raise(Errc::CommutationPreconditionFailed,
          "basis_conjugation_check: rotation does not commute with the "
          "weights");
  FiniteModel rotated = model;
  for (Matrix& w : rotated.weights) w = herm_part(W0.V.adjoint() * w * W0.V);
  double worst = 0.0;
  for (Cplx z : grid.points) {
    Matrix lhs = W0.V * wt_from_model(model, z);
    Matrix rhs = wt_from_model(rotated, z) * W0.V;
    worst = std::max(worst, op_norm(lhs - rhs));
  }
  return worst;
}

double weyl_relation_residual(double s, double t, Cplx omega,
                              const std::vector<WeylSample>& samples,
                              bool flip_phase) {
  if (std::abs(std::abs(omega) - 1.0) > 1e-12)
    raise(Errc::InvalidInput,
          "weyl_relation_residual: twist must be unimodular");
  if (samples.empty())
    raise(Errc::InvalidInput, "weyl_relation_residual: no samples");

  std::vector<WeylSample> sorted = samples;
  std::sort(sorted.begin(), sorted.end(),
            [](const WeylSample& a, const WeylSample& b) {
              return a.lambda < b.lambda;
            });
  auto find_at = [&](double x) -> const WeylSample* {
    auto it = std::lower_bound(
        sorted.begin(), sorted.end(), x,
        [](const WeylSample& a, double v) { return a.lambda < v; });
    double tol = 1e-9 * std::max(1.0, std::abs(x));
    if (it != sorted.end() && std::abs(it->lambda - x) <= tol) return &*it;
    if (it != sorted.begin() && std::abs(std::prev(it)->lambda - x) <= tol)
      return &*std::prev(it);
    return nullptr;
  };

  // chi_+ takes the origin; the twist acts on the half-line [0, inf).
  auto split_factor = [&](double here, double prev) {
    Cplx f(1.0, 0.0);
    if (here >= 0.0) f *= omega;
    if (prev >= 0.0) f *= std::conj(omega);
    return f;
  };

  Cplx phase = std::exp(Cplx(0.0, (flip_phase ? 1.0 : -1.0) * s * t));
  double worst = 0.0;
  int matched = 0;
  for (const WeylSample& smp : sorted) {
    const WeylSample* prev = find_at(smp.lambda - s);
    if (!prev) continue;
    ++matched;
    Cplx twist = split_factor(smp.lambda, prev->lambda);
    // V(s) W(t) f at lambda: the shift picks up the source's oscillation.
    Cplx lhs = twist * std::exp(Cplx(0.0, prev->lambda * t)) * prev->value;
    // e^{-ist} W(t) V(s) f at lambda.
    Cplx rhs = phase * std::exp(Cplx(0.0, smp.lambda * t)) * twist * prev->value;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  if (matched == 0)
    raise(Errc::SampleClosureViolated,
          "weyl_relation_residual: no sample has a partner at lambda - s; "
          "the sample set is not closed under the shift");
  return worst;
}

}  // namespace wt
