#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wt/types.hpp"

namespace wt {

using Json = nlohmann::ordered_json;

// Named default tolerances, scaled globally by the WT_TOL_SCALE environment
// variable and overridable per run. Every threshold used by a verdict goes
// through this table so CLI overrides reach all tools uniformly.
class Tolerances {
 public:
  Tolerances();

  static const std::map<std::string, double>& defaults();

  double scale() const { return scale_; }
  void set_override(const std::string& name, double value);
  bool known(const std::string& name) const;
  double get(const std::string& name) const;

 private:
  double scale_ = 1.0;
  std::map<std::string, double> overrides_;
};

struct Verdict {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string op;  // "<=" or ">="
  bool pass = false;
  std::string note;
};

// Residual-style check: passes when value <= threshold.
Verdict check_upper(const std::string& name, double value, double threshold,
                    const std::string& note = "");
// Lower-bound check: passes when value >= threshold.
Verdict check_lower(const std::string& name, double value, double threshold,
                    const std::string& note = "");

struct Report {
  std::string tool;
  std::vector<Verdict> verdicts;
  Json data = Json::object();

  bool all_pass() const;
  Json to_json() const;
};

Json cplx_to_json(const Cplx& z);
Json matrix_to_json(const Matrix& m);

}  // namespace wt
