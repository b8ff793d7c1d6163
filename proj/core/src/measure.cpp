#include "wt/measure.hpp"

#include <algorithm>
#include <cmath>

#include "wt/errors.hpp"

namespace wt {
namespace {

// Merge overlapping or touching intervals into a sorted disjoint list.
std::vector<std::pair<double, double>> merge_intervals(
    std::vector<std::pair<double, double>> v) {
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, double>> out;
  for (auto [a, b] : v) {
    if (!out.empty() && a <= out.back().second)
      out.back().second = std::max(out.back().second, b);
    else
      out.emplace_back(a, b);
  }
  return out;
}

}  // namespace

MatrixMeasure MatrixMeasure::make_impl(MeasureKind kind, int dim,
                                       std::vector<Atom> atoms,
                                       std::optional<DensitySpec> density,
                                       bool enforce_mass) {
  MatrixMeasure m;
  m.dim_ = dim;
  m.stored_ = kind;
  m.exposed_ = kind;
  m.atoms_ = std::move(atoms);
  m.dens_ = std::move(density);
  m.validate();
  auto one = [](double) { return Cplx(1.0, 0.0); };
  // Admission-time mass only feeds the normalization gate (1e-6), so a
  // larger panel budget at a looser certificate keeps oscillatory densities
  // with broken tail symmetry (e.g. shifted ones) admissible.
  QuadConfig mass_cfg{1e-10, 1e-10, 16384, 4};
  m.sigma_density_mass_ = m.as_sigma().integrate_density(one, mass_cfg).value;
  m.sigma_mass_ = m.sigma_density_mass_;
  for (const Atom& a : m.atoms_) {
    double f = (kind == MeasureKind::Sigma)
                   ? 1.0
                   : 1.0 / (1.0 + a.lambda * a.lambda);
    m.sigma_mass_ += f * a.weight;
  }
  if (enforce_mass) {
    double defect = op_norm(m.sigma_mass_ - Matrix::Identity(dim, dim));
    if (defect > normalization_tol)
      raise(Errc::InvalidMeasure,
            "measure mass deviates from identity by " +
                std::to_string(defect) + " (allowed " +
                std::to_string(normalization_tol) + ")");
  }
  return m;
}

MatrixMeasure MatrixMeasure::make(MeasureKind kind, int dim,
                                  std::vector<Atom> atoms,
                                  std::optional<DensitySpec> density) {
  return make_impl(kind, dim, std::move(atoms), std::move(density), true);
}

MatrixMeasure MatrixMeasure::make_raw(MeasureKind kind, int dim,
                                      std::vector<Atom> atoms,
                                      std::optional<DensitySpec> density) {
  return make_impl(kind, dim, std::move(atoms), std::move(density), false);
}

MatrixMeasure MatrixMeasure::sigma(int dim, std::vector<Atom> atoms,
                                   std::optional<DensitySpec> density) {
  return make(MeasureKind::Sigma, dim, std::move(atoms), std::move(density));
}

MatrixMeasure MatrixMeasure::tau(int dim, std::vector<Atom> atoms,
                                 std::optional<DensitySpec> density) {
  return make(MeasureKind::Tau, dim, std::move(atoms), std::move(density));
}

void MatrixMeasure::validate() const {
  if (dim_ < 1 || dim_ > max_dim)
    raise(Errc::InvalidMeasure,
          "dimension " + std::to_string(dim_) + " outside [1, " +
              std::to_string(max_dim) + "]");
  if (atoms_.empty() && !dens_)
    raise(Errc::InvalidMeasure, "measure has neither atoms nor a density");

  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.lambda))
      raise(Errc::InvalidMeasure, "atom position is not finite");
    if (a.weight.rows() != dim_ || a.weight.cols() != dim_)
      raise(Errc::DimensionMismatch, "atom weight has wrong shape");
    if (!a.weight.allFinite())
      raise(Errc::InvalidMeasure, "atom weight has non-finite entries");
    double scale = 1.0 + a.weight.norm();
    if (!is_hpsd(a.weight, 1e-9 * scale))
      raise(Errc::InvalidMeasure,
            "atom weight at lambda=" + std::to_string(a.lambda) +
                " is not hermitian PSD");
  }

  if (dens_) {
    if (!dens_->density)
      raise(Errc::InvalidMeasure, "density spec without a callable");
    if (dens_->smooth_windows.empty() && !dens_->tail)
      raise(Errc::InvalidMeasure,
            "density needs smooth windows or a tail certificate");
    for (auto [a, b] : dens_->smooth_windows)
      if (!(std::isfinite(a) && std::isfinite(b) && a < b))
        raise(Errc::InvalidMeasure, "invalid smooth window");
    if (dens_->tail) {
      const TailBound& t = *dens_->tail;
      if (!(t.cutoff >= 1.0))
        raise(Errc::InvalidMeasure, "tail cutoff must be >= 1");
      if (!(t.C >= 0.0) || !std::isfinite(t.p))
        raise(Errc::InvalidMeasure, "invalid tail certificate");
      double sigma_p = (stored_ == MeasureKind::Sigma) ? t.p : t.p + 2.0;
      if (sigma_p <= 1.0)
        raise(Errc::TailUnbounded,
              "tail decay too weak to certify a finite measure");
    }

    // PSD probe on a deterministic grid: window interiors plus a few points
    // past the cutoff when a tail is declared.
    std::vector<double> probes;
    for (auto [a, b] : dens_->smooth_windows) {
      for (int i = 0; i < 33; ++i)
        probes.push_back(a + (b - a) * (i + 0.5) / 33.0);
    }
    if (dens_->tail) {
      for (double s : {1.5, 3.0, 10.0}) {
        probes.push_back(dens_->tail->cutoff * s);
        probes.push_back(-dens_->tail->cutoff * s);
      }
    }
    for (double x : probes) {
      Matrix d = dens_->density(x);
      if (d.rows() != dim_ || d.cols() != dim_)
        raise(Errc::DimensionMismatch, "density value has wrong shape");
      if (!d.allFinite())
        raise(Errc::InvalidMeasure, "density value has non-finite entries");
      if (!is_hpsd(d, 1e-9 * (1.0 + d.norm())))
        raise(Errc::InvalidMeasure,
              "density is not hermitian PSD at x=" + std::to_string(x));
    }
  }
}

MatrixMeasure MatrixMeasure::as_sigma() const {
  MatrixMeasure m = *this;
  m.exposed_ = MeasureKind::Sigma;
  return m;
}

MatrixMeasure MatrixMeasure::as_tau() const {
  MatrixMeasure m = *this;
  m.exposed_ = MeasureKind::Tau;
  return m;
}

double MatrixMeasure::convert_factor(double lambda) const {
  if (stored_ == exposed_) return 1.0;
  double s = 1.0 + lambda * lambda;
  return exposed_ == MeasureKind::Tau ? s : 1.0 / s;
}

std::vector<Atom> MatrixMeasure::atoms() const {
  std::vector<Atom> out;
  out.reserve(atoms_.size());
  for (const Atom& a : atoms_) {
    if (stored_ == exposed_)
      out.push_back(a);
    else
      out.push_back(Atom{a.lambda, convert_factor(a.lambda) * a.weight});
  }
  return out;
}

Matrix MatrixMeasure::density_at(double lambda) const {
  if (!dens_) raise(Errc::InvalidInput, "measure has no density");
  Matrix d = dens_->density(lambda);
  if (stored_ != exposed_) d *= convert_factor(lambda);
  return d;
}

std::optional<TailBound> MatrixMeasure::tail() const {
  if (!dens_ || !dens_->tail) return std::nullopt;
  TailBound t = *dens_->tail;
  if (stored_ == exposed_) return t;
  // |1/(1+x^2)| <= x^-2 and (1+x^2) <= 2 x^2 for |x| >= 1.
  if (exposed_ == MeasureKind::Sigma) {
    t.p += 2.0;
  } else {
    t.p -= 2.0;
    t.C *= 2.0;
  }
  return t;
}

std::vector<std::pair<double, double>> MatrixMeasure::bulk_segments() const {
  if (!dens_) return {};
  auto windows = merge_intervals(dens_->smooth_windows);
  if (!dens_->tail) return windows;

  double w = dens_->tail->cutoff;
  for (auto [a, b] : windows) w = std::max({w, std::abs(a), std::abs(b)});

  // Fill [-w, w] completely: windows plus the gaps between and around them.
  std::vector<std::pair<double, double>> segs;
  double pos = -w;
  for (auto [a, b] : windows) {
    if (a > pos) segs.emplace_back(pos, a);
    segs.emplace_back(a, b);
    pos = b;
  }
  if (pos < w) segs.emplace_back(pos, w);
  return segs;
}

std::optional<std::pair<double, double>> MatrixMeasure::finite_support_hull()
    const {
  bool any = false;
  double lo = 0.0, hi = 0.0;
  auto fold = [&](double x) {
    if (!any) {
      lo = hi = x;
      any = true;
    } else {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  };
  for (const Atom& a : atoms_) fold(a.lambda);
  if (dens_)
    for (auto [a, b] : dens_->smooth_windows) {
      fold(a);
      fold(b);
    }
  if (!any) return std::nullopt;
  return std::make_pair(lo, hi);
}

QuadOutcome MatrixMeasure::integrate_density(
    const std::function<Cplx(double)>& kernel, const QuadConfig& cfg) const {
  Matrix acc = Matrix::Zero(dim_, dim_);
  double err = 0.0;
  int panels = 0;
  if (dens_) {
    MatrixFn f = [this, &kernel](double x) -> Matrix {
      return kernel(x) * density_at(x);
    };
    auto segs = bulk_segments();
    if (!segs.empty()) {
      QuadOutcome bulk = integrate_adaptive(f, segs, cfg);
      acc += bulk.value;
      err += bulk.err;
      panels += bulk.panels;
    }
    if (dens_->tail) {
      double w = dens_->tail->cutoff;
      for (auto [a, b] : segs) w = std::max({w, std::abs(a), std::abs(b)});
      QuadOutcome tail = integrate_symmetric_tail(f, w, cfg);
      acc += tail.value;
      err += tail.err;
      panels += tail.panels;
    }
  }
  return QuadOutcome{std::move(acc), err, panels};
}

QuadOutcome MatrixMeasure::integrate(
    const std::function<Cplx(double)>& kernel, const QuadConfig& cfg) const {
  QuadOutcome out = integrate_density(kernel, cfg);
  for (const Atom& a : atoms_) {
    double f = convert_factor(a.lambda);
    out.value += kernel(a.lambda) * (f * a.weight);
  }
  return out;
}

QuadOutcome total_mass(const MatrixMeasure& m, const QuadConfig& cfg) {
  if (m.kind() != MeasureKind::Sigma)
    raise(Errc::InvalidInput, "total_mass expects a sigma-kind measure");
  return m.integrate([](double) { return Cplx(1.0, 0.0); }, cfg);
}

MatrixMeasure tau_from_sigma(const MatrixMeasure& m) {
  if (m.kind() != MeasureKind::Sigma)
    raise(Errc::InvalidInput, "tau_from_sigma expects a sigma-kind measure");
  return m.as_tau();
}

MatrixMeasure sigma_from_tau(const MatrixMeasure& m) {
  if (m.kind() != MeasureKind::Tau)
    raise(Errc::InvalidInput, "sigma_from_tau expects a tau-kind measure");
  return m.as_sigma();
}

MatrixMeasure shift_measure(const MatrixMeasure& m, double b) {
  std::vector<Atom> atoms = m.stored_atoms();
  for (Atom& a : atoms) a.lambda += b;

  std::optional<DensitySpec> dens = m.stored_density();
  if (dens) {
    auto inner = dens->density;
    dens->density = [inner, b](double x) { return inner(x - b); };
    for (auto& [lo, hi] : dens->smooth_windows) {
      lo += b;
      hi += b;
    }
    if (dens->tail) {
      // For |x| >= cutoff + |b| we have |x - b| >= |x| * cutoff/(cutoff+|b|),
      // so the certificate survives with a padded constant.
      TailBound& t = *dens->tail;
      double grow = (t.cutoff + std::abs(b)) / t.cutoff;
      t.C *= std::pow(grow, t.p);
      t.cutoff += std::abs(b);
    }
    dens->id = "custom";
  }

  // A shifted sigma measure keeps its mass; a shifted tau form generally
  // does not stay normalized, so admission runs without the mass gate.
  MatrixMeasure out = MatrixMeasure::make_raw(m.stored_kind(), m.dim(),
                                              std::move(atoms),
                                              std::move(dens));
  return m.kind() == m.stored_kind()
             ? out
             : (m.kind() == MeasureKind::Sigma ? out.as_sigma()
                                               : out.as_tau());
}

Matrix interval_mass(const MatrixMeasure& m, double a, double b,
                     const QuadConfig& cfg) {
  if (!(a < b)) raise(Errc::InvalidInput, "interval_mass needs a < b");
  Matrix acc = Matrix::Zero(m.dim(), m.dim());
  auto near = [](double x, double y) {
    return std::abs(x - y) <= 1e-12 * (1.0 + std::abs(y));
  };
  for (const Atom& at : m.stored_atoms()) {
    double w = 0.0;
    if (near(at.lambda, a) || near(at.lambda, b))
      w = 0.5;
    else if (at.lambda > a && at.lambda < b)
      w = 1.0;
    if (w > 0.0) acc += w * m.convert_factor(at.lambda) * at.weight;
  }
  if (m.has_density()) {
    MatrixFn f = [&m](double x) { return m.density_at(x); };
    acc += integrate_adaptive(f, {{a, b}}, cfg).value;
  }
  return acc;
}

double measure_periodicity_residual(const MatrixMeasure& tau, double b,
                                    std::pair<double, double> window,
                                    int cells, const QuadConfig& cfg) {
  if (tau.kind() != MeasureKind::Tau)
    raise(Errc::InvalidInput,
          "measure_periodicity_residual expects a tau-kind measure");
  auto [alpha, beta] = window;
  if (!(beta - alpha >= std::abs(b)))
    raise(Errc::InvalidInput, "window must be at least b wide");
  if (cells < 1) raise(Errc::InvalidInput, "cells must be >= 1");

  double width = (beta - alpha) / cells;
  double worst = 0.0;
  for (int k = 0; k < cells; ++k) {
    double lo = alpha + k * width;
    double hi = (k + 1 == cells) ? beta : alpha + (k + 1) * width;
    Matrix d = interval_mass(tau, lo + b, hi + b, cfg) -
               interval_mass(tau, lo, hi, cfg);
    worst = std::max(worst, op_norm(d));
  }
  return worst;
}

double tau_periodicity_residual_auto(const MatrixMeasure& m, double b,
                                     const QuadConfig& cfg) {
  if (b == 0.0) raise(Errc::InvalidInput, "shift step b must be nonzero");
  MatrixMeasure tau = (m.kind() == MeasureKind::Tau) ? m : m.as_tau();

  // Window centered in the finite support (or at the origin), kept away
  // from any truncation boundary so genuinely periodic interiors score 0.
  double half = std::max(4.0 * std::abs(b), 10.0);
  double center = 0.0;
  if (auto hull = tau.finite_support_hull()) {
    center = 0.5 * (hull->first + hull->second);
    double quarter = 0.25 * (hull->second - hull->first);
    if (quarter > std::abs(b)) half = std::min(half, quarter);
  }
  return measure_periodicity_residual(
      tau, b, {center - half, center + half}, 16, cfg);
}

bool second_moment_divergent(const MatrixMeasure& m) {
  auto t = m.as_sigma().tail();
  return t.has_value() && t->p <= 3.0;
}

}  // namespace wt
