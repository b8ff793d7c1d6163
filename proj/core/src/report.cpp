#include "wt/report.hpp"

#include <cstdlib>

#include "wt/errors.hpp"

namespace wt {

const std::map<std::string, double>& Tolerances::defaults() {
  static const std::map<std::string, double> table = {
      {"herglotz_psd", 1e-10},
      {"herglotz_norm_measure", 1e-6},
      {"herglotz_norm_closed", 1e-10},
      {"conjugate_symmetry", 1e-10},
      {"period_residual", 1e-6},
      {"tau_consistency", 2e-8},
      {"measure_periodicity", 1e-8},
      {"norm_at_i", 1e-8},
      {"closed_form_agreement", 1e-6},
      {"catalog_period", 1e-12},
      {"catalog_norm", 1e-12},
      {"function_periodicity", 1e-8},
      {"periodicity_detect", 1e-4},
      {"nonperiodicity_floor", 1e-3},
      {"basis_gram", 1e-8},
      {"d_commutes", 1e-10},
      {"unitary_input", 1e-10},
      {"ab_shift", 1e-6},
      {"extension_period", 1e-6},
      {"group_law", 1e-6},
      {"group_unitarity", 1e-8},
      {"orbit", 1e-6},
      {"bracket_cond_max", 1e12},
      {"inversion_interior", 1e-4},
      {"inversion_endpoint", 1e-3},
      {"inversion_disjoint", 1e-6},
      {"inversion_weighted", 1e-3},
      {"model_commutation", 1e-10},
      {"model_spectral_shift", 1e-10},
      {"model_isometry", 1e-12},
      {"model_wt_consistency", 1e-10},
      {"model_defect_orthogonality", 1e-10},
      {"basis_conjugation", 1e-10},
      {"weyl", 1e-13},
      {"weyl_control", 0.1},
      {"schrodinger", 1e-5},
      {"schrodinger_rhs", 0.5},
  };
  return table;
}

Tolerances::Tolerances() {
  if (const char* env = std::getenv("WT_TOL_SCALE")) {
    char* end = nullptr;
    double s = std::strtod(env, &end);
    if (end != env && s > 0.0) scale_ = s;
  }
}

void Tolerances::set_override(const std::string& name, double value) {
  if (!(value > 0.0))
    raise(Errc::InvalidInput, "tolerance override '" + name +
                                  "' must be positive");
  if (!known(name))
    raise(Errc::InvalidInput, "unknown tolerance name '" + name + "'");
  overrides_[name] = value;
}

bool Tolerances::known(const std::string& name) const {
  return defaults().count(name) > 0;
}

double Tolerances::get(const std::string& name) const {
  auto it = overrides_.find(name);
  if (it != overrides_.end()) return it->second;
  auto dt = defaults().find(name);
  if (dt == defaults().end())
    raise(Errc::InvalidInput, "unknown tolerance name '" + name + "'");
  return dt->second * scale_;
}

Verdict check_upper(const std::string& name, double value, double threshold,
                    const std::string& note) {
  return Verdict{name, value, threshold, "<=", value <= threshold, note};
}

Verdict check_lower(const std::string& name, double value, double threshold,
                    const std::string& note) {
  return Verdict{name, value, threshold, ">=", value >= threshold, note};
}

bool Report::all_pass() const {
  for (const Verdict& v : verdicts)
    if (!v.pass) return false;
  return true;
}

Json Report::to_json() const {
  Json j;
  j["tool"] = tool;
  j["pass"] = all_pass();
  Json vs = Json::array();
  for (const Verdict& v : verdicts) {
    Json e;
    e["name"] = v.name;
    e["value"] = v.value;
    e["threshold"] = v.threshold;
    e["op"] = v.op;
    e["pass"] = v.pass;
    if (!v.note.empty()) e["note"] = v.note;
    vs.push_back(std::move(e));
  }
  j["verdicts"] = std::move(vs);
  if (!data.empty()) j["data"] = data;
  return j;
}

Json cplx_to_json(const Cplx& z) { return Json::array({z.real(), z.imag()}); }

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(cplx_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace wt
