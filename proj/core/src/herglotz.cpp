#include "wt/herglotz.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "wt/errors.hpp"

namespace wt {
namespace {

void require_off_axis(Cplx z, double guard, const MatrixMeasure* m) {
  if (z.imag() == 0.0 && m) {
    for (const Atom& a : m->stored_atoms())
      if (a.lambda == z.real())
        raise(Errc::PoleHit,
              "z coincides with the atom at " + std::to_string(a.lambda));
  }
  if (std::abs(z.imag()) < guard)
    raise(Errc::RealAxisEvaluation,
          "evaluation within the real-axis guard band |Im z| < " +
              std::to_string(guard));
}

// Deterministic indexed parallel map: results land by index, the fold over
// them stays sequential, so the thread count never changes a result.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

EvalGrid EvalGrid::standard() {
  EvalGrid g;
  for (double re : {-3.0, -1.2, -0.35, 0.8, 2.4})
    for (double im : {0.6, 1.1, 2.3, 3.7}) g.points.emplace_back(re, im);
  return g;
}

EvalGrid EvalGrid::ten() {
  EvalGrid g;
  for (double re : {-3.0, -1.2, -0.35, 0.8, 2.4})
    for (double im : {0.6, 2.3}) g.points.emplace_back(re, im);
  return g;
}

EvalGrid EvalGrid::dense50() {
  EvalGrid g;
  for (double re : {-4.5, -3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5, 4.5})
    for (double im : {0.5, 1.0, 1.8, 2.9, 4.2}) g.points.emplace_back(re, im);
  return g;
}

void EvalGrid::validate() const {
  if (points.empty()) raise(Errc::InvalidInput, "empty evaluation grid");
  if (!(guard > 0.0)) raise(Errc::InvalidInput, "grid guard must be > 0");
  for (const Cplx& z : points)
    if (!(z.imag() >= guard))
      raise(Errc::InvalidInput,
            "grid point below the guard band: Im z = " +
                std::to_string(z.imag()));
}

Matrix eval_M(const MatrixMeasure& sigma, Cplx z, const EvalOptions& opt) {
  if (sigma.kind() != MeasureKind::Sigma)
    raise(Errc::InvalidInput, "eval_M expects a sigma-kind measure");
  require_off_axis(z, opt.guard, &sigma);

  const int m = sigma.dim();
  Matrix acc = Matrix::Zero(m, m);
  for (const Atom& a : sigma.atoms())
    acc += ((a.lambda * z + 1.0) / (a.lambda - z)) * a.weight;

  if (sigma.has_density()) {
    acc += z * sigma.sigma_density_mass();
    QuadOutcome cauchy = sigma.integrate_density(
        [z](double l) { return 1.0 / (l - z); }, opt.quad);
    acc += (1.0 + z * z) * cauchy.value;
  }
  return acc;
}

Matrix eval_M_tau(const MatrixMeasure& tau, Cplx z, const EvalOptions& opt) {
  if (tau.kind() != MeasureKind::Tau)
    raise(Errc::InvalidInput, "eval_M_tau expects a tau-kind measure");
  require_off_axis(z, opt.guard, &tau);
  auto kernel = [z](double l) {
    return 1.0 / (l - z) - l / (1.0 + l * l);
  };
  return tau.integrate(kernel, opt.quad).value;
}

Matrix cauchy_transform(const MatrixMeasure& m, Cplx z,
                        const EvalOptions& opt) {
  require_off_axis(z, opt.guard, &m);
  return m.integrate([z](double l) { return 1.0 / (l - z); }, opt.quad).value;
}

HerglotzFunction herglotz_from_measure(const MatrixMeasure& m,
                                       const EvalOptions& opt) {
  HerglotzFunction f;
  f.dim = m.dim();
  f.provenance = HerglotzFunction::Provenance::MeasureBacked;
  f.id = "measure";
  if (m.kind() == MeasureKind::Sigma)
    f.eval = [m, opt](Cplx z) { return eval_M(m, z, opt); };
  else
    f.eval = [m, opt](Cplx z) { return eval_M_tau(m, z, opt); };
  return f;
}

Report herglotz_report(const HerglotzFunction& f, const EvalGrid& grid,
                       const Tolerances& tol, int threads) {
  grid.validate();
  const int n = static_cast<int>(grid.points.size());

  struct PointResult {
    bool upper_ok = false, lower_ok = false;
    Matrix up, lo;
    std::string error;
  };
  std::vector<PointResult> pts(n);

  parallel_for(n, threads, [&](int i) {
    Cplx z = grid.points[i];
    PointResult& r = pts[i];
    try {
      r.up = f.eval(z);
      r.upper_ok = true;
    } catch (const Error& e) {
      r.error = e.code_name() + std::string(": ") + e.what();
    }
    try {
      r.lo = f.eval(std::conj(z));
      r.lower_ok = true;
    } catch (const Error&) {
      // Recorded as a skipped symmetry point; upper-half data stands alone.
    }
  });

  double min_eig = std::numeric_limits<double>::infinity();
  double sym_defect = 0.0;
  int eval_errors = 0, sym_points = 0;
  std::string first_error;
  for (const PointResult& r : pts) {
    if (!r.upper_ok) {
      ++eval_errors;
      if (first_error.empty()) first_error = r.error;
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(imag_part(r.up));
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    if (r.lower_ok) {
      ++sym_points;
      double rel = op_norm(r.lo - r.up.adjoint()) /
                   std::max(1.0, op_norm(r.up));
      sym_defect = std::max(sym_defect, rel);
    }
  }

  double norm_defect = std::numeric_limits<double>::infinity();
  std::string norm_note;
  try {
    Matrix at_i = f.eval(Cplx(0.0, 1.0));
    norm_defect =
        op_norm(at_i - Cplx(0.0, 1.0) * Matrix::Identity(f.dim, f.dim));
  } catch (const Error& e) {
    norm_note = e.code_name() + std::string(": ") + e.what();
  }

  bool measure_backed =
      f.provenance == HerglotzFunction::Provenance::MeasureBacked;

  Report rep;
  rep.tool = "herglotz_report";
  rep.verdicts.push_back(check_lower("im_min_eigenvalue", min_eig,
                                     -tol.get("herglotz_psd")));
  rep.verdicts.push_back(check_upper(
      "normalization_at_i", norm_defect,
      tol.get(measure_backed ? "herglotz_norm_measure"
                             : "herglotz_norm_closed"),
      norm_note));
  rep.verdicts.push_back(check_upper(
      "conjugate_symmetry", sym_defect, tol.get("conjugate_symmetry"),
      sym_points == 0 ? "no lower-half evaluations available" : ""));
  rep.verdicts.push_back(check_upper("eval_errors",
                                     static_cast<double>(eval_errors), 0.0,
                                     first_error));
  rep.data["grid_points"] = n;
  rep.data["symmetry_points"] = sym_points;
  rep.data["function"] = f.id;
  return rep;
}

double function_period_residual(const HerglotzFunction& f, double b,
                                const EvalGrid& grid, int threads) {
  if (b == 0.0) raise(Errc::InvalidInput, "period b must be nonzero");
  grid.validate();
  const int n = static_cast<int>(grid.points.size());
  std::vector<double> res(n, 0.0);
  std::vector<std::exception_ptr> errs(n);
  parallel_for(n, threads, [&](int i) {
    try {
      Cplx z = grid.points[i];
      res[i] = op_norm(f.eval(z + b) - f.eval(z));
    } catch (...) {
      errs[i] = std::current_exception();
    }
  });
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  double worst = 0.0;
  for (double r : res) worst = std::max(worst, r);
  return worst;
}

}  // namespace wt
