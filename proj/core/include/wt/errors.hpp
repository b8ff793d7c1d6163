#pragma once

#include <stdexcept>
#include <string>

namespace wt {

// Machine-readable failure reasons. The CLI maps these onto structured
// error objects; library users can switch on them.
enum class Errc {
  InvalidInput,
  DimensionMismatch,
  InvalidMeasure,
  RealAxisEvaluation,
  LowerHalfPlane,
  PoleHit,
  SingularResolvent,
  TailUnbounded,
  QuadratureBudgetExceeded,
  ExtrapolationDiverged,
  PeriodicityPreconditionFailed,
  CommutationPreconditionFailed,
  SingularBracket,
  SingularDenominator,
  InconsistentPeriod,
  RankDeficiency,
  LatticeIncompatible,
  WindowExceeded,
  SampleClosureViolated,
  ConjugateSymmetryViolated,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidInput: return "invalid_input";
    case Errc::DimensionMismatch: return "dimension_mismatch";
    case Errc::InvalidMeasure: return "invalid_measure";
    case Errc::RealAxisEvaluation: return "real_axis_evaluation";
    case Errc::LowerHalfPlane: return "lower_half_plane";
    case Errc::PoleHit: return "pole_hit";
    case Errc::SingularResolvent: return "singular_resolvent";
    case Errc::TailUnbounded: return "tail_unbounded";
    case Errc::QuadratureBudgetExceeded: return "quadrature_budget_exceeded";
    case Errc::ExtrapolationDiverged: return "extrapolation_diverged";
    case Errc::PeriodicityPreconditionFailed: return "periodicity_precondition_failed";
    case Errc::CommutationPreconditionFailed: return "commutation_precondition_failed";
    case Errc::SingularBracket: return "singular_bracket";
    case Errc::SingularDenominator: return "singular_denominator";
    case Errc::InconsistentPeriod: return "inconsistent_period";
    case Errc::RankDeficiency: return "rank_deficiency";
    case Errc::LatticeIncompatible: return "lattice_incompatible";
    case Errc::WindowExceeded: return "window_exceeded";
    case Errc::SampleClosureViolated: return "sample_closure_violated";
    case Errc::ConjugateSymmetryViolated: return "conjugate_symmetry_violated";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }
  const char* code_name() const { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace wt
