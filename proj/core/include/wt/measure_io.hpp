#pragma once

#include <optional>
#include <string>

#include "wt/errors.hpp"
#include "wt/herglotz.hpp"
#include "wt/measure.hpp"
#include "wt/report.hpp"
#include "wt/types.hpp"

namespace wt {

// Input-shape failure carrying the JSON pointer of the offending node, so
// front ends can report exactly where a spec went wrong.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(Errc::InvalidInput, path.empty() ? what : path + ": " + what),
        path_(path),
        detail_(what) {}
  const std::string& path() const { return path_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string path_;
  std::string detail_;
};

// "a+bi", "a-bi", "a", "bi", "i", "-i"; exponents allowed in both parts.
Cplx parse_complex(const std::string& s);

// Row-major array of rows of [re, im] pairs.
Matrix matrix_from_json(const Json& j, const std::string& path);

// Measure spec:
//   { "dim": 1, "kind": "sigma"|"tau",
//     "atoms": [{"lambda": 0.0, "weight": [[[1.0, 0.0]]]}],
//     "density": {"expr": "<named-density-id>", "params": {...},
//                 "smooth_windows": [[-50, 50]]},
//     "tail": {"C": 1.0, "p": 2.0, "cutoff": 50.0} }
// Named densities: "one_plus_sin_over_pi_1pl2", "lebesgue_over_pi",
// "constant_on_interval" (params a, b, value).
MatrixMeasure measure_from_json(const Json& j);
MatrixMeasure measure_from_file(const std::string& file);

// Atoms and named densities serialize; ad-hoc callable densities cannot.
Json measure_to_json(const MatrixMeasure& m);

// Array of [re, im] points; all must sit above the guard band.
EvalGrid grid_from_json(const Json& j);

// Context spec: { "measure": {...}, "b": 1.0, "D": [[[re,im]]],
//                 "phi_basis": [[...]], "psi_basis": [[...]] }.
struct ContextSpec {
  MatrixMeasure measure;
  double b = 0.0;
  Matrix D;
  std::optional<Matrix> phi_basis;
  std::optional<Matrix> psi_basis;
};
ContextSpec context_from_json(const Json& j);
ContextSpec context_from_file(const std::string& file);

}  // namespace wt
