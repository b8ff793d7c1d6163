#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wt/quadrature.hpp"
#include "wt/types.hpp"

namespace wt {

// Two descriptions of the same object: a sigma measure is normalized so its
// total mass is the identity; the tau form carries weights scaled by
// (1 + lambda^2). Conversion is a relabeling, not a data rewrite, so a
// round trip reproduces the original weights bit for bit.
enum class MeasureKind { Sigma, Tau };

inline const char* kind_name(MeasureKind k) {
  return k == MeasureKind::Sigma ? "sigma" : "tau";
}

struct Atom {
  double lambda = 0.0;
  Matrix weight;
};

// Decay certificate: ||density(x)|| <= C / |x|^p for |x| >= cutoff.
struct TailBound {
  double C = 0.0;
  double p = 0.0;
  double cutoff = 1.0;
};

struct DensitySpec {
  std::function<Matrix(double)> density;  // in the measure's stored kind
  std::vector<std::pair<double, double>> smooth_windows;
  std::optional<TailBound> tail;  // absent: density vanishes off the windows
  std::string id = "custom";
  std::map<std::string, double> params;
};

class MatrixMeasure {
 public:
  static constexpr double normalization_tol = 1e-6;
  static constexpr int max_dim = 8;

  MatrixMeasure() = default;

  // Validates admission: weights hermitian PSD, density PSD on a probe
  // grid, tails strong enough to integrate, and total sigma mass within
  // normalization_tol of the identity.
  static MatrixMeasure make(MeasureKind kind, int dim, std::vector<Atom> atoms,
                            std::optional<DensitySpec> density = {});
  // Same shape and PSD checks but no normalization gate. For derived
  // measures (shifts, perturbations) that are deliberately off-mass.
  static MatrixMeasure make_raw(MeasureKind kind, int dim,
                                std::vector<Atom> atoms,
                                std::optional<DensitySpec> density = {});
  static MatrixMeasure sigma(int dim, std::vector<Atom> atoms,
                             std::optional<DensitySpec> density = {});
  static MatrixMeasure tau(int dim, std::vector<Atom> atoms,
                           std::optional<DensitySpec> density = {});

  int dim() const { return dim_; }
  MeasureKind kind() const { return exposed_; }
  MeasureKind stored_kind() const { return stored_; }
  bool has_atoms() const { return !atoms_.empty(); }
  bool has_density() const { return dens_.has_value(); }

  MatrixMeasure as_sigma() const;
  MatrixMeasure as_tau() const;

  // Stored-kind data, untouched by kind flips.
  const std::vector<Atom>& stored_atoms() const { return atoms_; }
  const std::optional<DensitySpec>& stored_density() const { return dens_; }

  // Weight multiplier stored kind -> exposed kind at a given point.
  double convert_factor(double lambda) const;

  // Atoms materialized in the exposed kind.
  std::vector<Atom> atoms() const;

  // Density value in the exposed kind.
  Matrix density_at(double lambda) const;

  // Tail certificate restated for the exposed kind (p shifts by 2 across a
  // kind flip; the constant is padded accordingly).
  std::optional<TailBound> tail() const;

  // Integral of a scalar kernel against the measure in its exposed kind:
  //   sum_atoms k(lambda) W + int k(x) density(x) dx  (+ tail part).
  QuadOutcome integrate(const std::function<Cplx(double)>& kernel,
                        const QuadConfig& cfg = {}) const;

  // Integral of a scalar kernel against the density part only (atoms
  // excluded); zero matrix when there is no density.
  QuadOutcome integrate_density(const std::function<Cplx(double)>& kernel,
                                const QuadConfig& cfg = {}) const;

  // Total mass of the sigma form and its density-only part, cached at
  // admission.
  const Matrix& sigma_mass() const { return sigma_mass_; }
  const Matrix& sigma_density_mass() const { return sigma_density_mass_; }

  // Finite segments covering the non-tail part of the line, exposed to
  // callers that build their own integrands.
  std::vector<std::pair<double, double>> bulk_segments() const;

  // Hull of atom positions and window edges; nullopt when empty.
  std::optional<std::pair<double, double>> finite_support_hull() const;

 private:
  int dim_ = 0;
  MeasureKind stored_ = MeasureKind::Sigma;
  MeasureKind exposed_ = MeasureKind::Sigma;
  std::vector<Atom> atoms_;          // weights in stored kind
  std::optional<DensitySpec> dens_;  // callable in stored kind
  Matrix sigma_mass_;
  Matrix sigma_density_mass_;

  static MatrixMeasure make_impl(MeasureKind kind, int dim,
                                 std::vector<Atom> atoms,
                                 std::optional<DensitySpec> density,
                                 bool enforce_mass);
  void validate() const;
};

// Total sigma mass with a fresh quadrature error estimate. Requires a
// sigma-kind measure.
QuadOutcome total_mass(const MatrixMeasure& m, const QuadConfig& cfg = {});

// Kind conversions with explicit direction checks.
MatrixMeasure tau_from_sigma(const MatrixMeasure& m);
MatrixMeasure sigma_from_tau(const MatrixMeasure& m);

// Translation by b: atoms move to lambda + b, the density argument and its
// windows shift, and the tail certificate is re-padded to stay valid.
MatrixMeasure shift_measure(const MatrixMeasure& m, double b);

// Mass of [a, b] in the exposed kind. Atoms sitting exactly on an endpoint
// count with half weight, matching the symmetric jump normalization.
Matrix interval_mass(const MatrixMeasure& m, double a, double b,
                     const QuadConfig& cfg = {});

// Partition the window into `cells` intervals D_k and return
// max_k ||tau(D_k + b) - tau(D_k)|| in operator norm.
double measure_periodicity_residual(const MatrixMeasure& tau, double b,
                                    std::pair<double, double> window,
                                    int cells, const QuadConfig& cfg = {});

// Periodicity residual of the tau form over an automatically chosen
// interior window (away from any truncation boundary).
double tau_periodicity_residual_auto(const MatrixMeasure& m, double b,
                                     const QuadConfig& cfg = {});

// Report-only proxy for the divergence of the second moment: true when the
// density's sigma-form tail decays no faster than |x|^-3.
bool second_moment_divergent(const MatrixMeasure& m);

}  // namespace wt
