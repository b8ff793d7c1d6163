#include "wt/measure_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wt {

namespace {

double require_number(const Json& j, const std::string& path) {
  if (!j.is_number())
    throw SchemaError(path, "expected a number, got " + std::string(j.type_name()));
  return j.get<double>();
}

int require_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw SchemaError(path, "expected an integer, got " + std::string(j.type_name()));
  return j.get<int>();
}

std::string require_string(const Json& j, const std::string& path) {
  if (!j.is_string())
    throw SchemaError(path, "expected a string, got " + std::string(j.type_name()));
  return j.get<std::string>();
}

const Json& require_array(const Json& j, const std::string& path) {
  if (!j.is_array())
    throw SchemaError(path, "expected an array, got " + std::string(j.type_name()));
  return j;
}

Cplx entry_from_json(const Json& j, const std::string& path) {
  require_array(j, path);
  if (j.size() != 2)
    throw SchemaError(path, "expected [re, im]");
  return {require_number(j[0], path + "/0"), require_number(j[1], path + "/1")};
}

// The three shipped density families. Windows and tails can be overridden
// by the spec; these are the natural defaults.
DensitySpec named_density(const std::string& expr,
                          const std::map<std::string, double>& params, int dim,
                          const std::string& path) {
  DensitySpec d;
  d.id = expr;
  d.params = params;
  if (expr == "one_plus_sin_over_pi_1pl2") {
    d.density = [dim](double x) -> Matrix {
      return Matrix::Identity(dim, dim) *
             ((1.0 + std::sin(x)) / (pi * (1.0 + x * x)));
    };
    d.smooth_windows = {{-50.0, 50.0}};
    d.tail = TailBound{2.0 / pi, 2.0, 50.0};
    return d;
  }
  if (expr == "lebesgue_over_pi") {
    d.density = [dim](double) -> Matrix {
      return Matrix::Identity(dim, dim) / pi;
    };
    d.smooth_windows = {{-50.0, 50.0}};
    d.tail = TailBound{1.0 / pi, 0.0, 50.0};
    return d;
  }
  if (expr == "constant_on_interval") {
    auto need = [&](const char* name) {
      auto it = params.find(name);
      if (it == params.end())
        throw SchemaError(path + "/params",
                          std::string("missing parameter \"") + name + "\"");
      return it->second;
    };
    double a = need("a"), b = need("b"), value = need("value");
    if (!(a < b))
      throw SchemaError(path + "/params", "need a < b");
    if (!(value >= 0.0))
      throw SchemaError(path + "/params", "value must be nonnegative");
    d.density = [a, b, value, dim](double x) -> Matrix {
      if (x < a || x > b) return Matrix::Zero(dim, dim);
      return value * Matrix::Identity(dim, dim);
    };
    d.smooth_windows = {{a, b}};
    return d;  // compact support: no tail certificate needed
  }
  throw SchemaError(path + "/expr", "unknown density \"" + expr + "\"");
}

}  // namespace

Cplx parse_complex(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) raise(Errc::InvalidInput, "empty complex literal");

  auto bad = [&]() -> Cplx {
    raise(Errc::InvalidInput, "cannot parse complex literal \"" + s + "\"");
  };
  auto to_double = [&](const std::string& u) {
    if (u.empty() || u == "+") return 1.0;
    if (u == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(u, &used);
    } catch (...) {
      return bad().real();
    }
    if (used != u.size()) bad();
    return v;
  };

  if (t.back() != 'i' && t.back() != 'I') return {to_double(t), 0.0};
  std::string body = t.substr(0, t.size() - 1);
  // Split at the last sign that is not leading and not an exponent sign.
  for (std::size_t k = body.size(); k-- > 1;) {
    char c = body[k];
    if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E')
      return {to_double(body.substr(0, k)), to_double(body.substr(k))};
  }
  return {0.0, to_double(body)};  // pure imaginary
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
  require_array(j, path);
  if (j.empty()) throw SchemaError(path, "matrix has no rows");
  const std::size_t rows = j.size();
  const Json& first = require_array(j[0], path + "/0");
  const std::size_t cols = first.size();
  if (cols == 0) throw SchemaError(path + "/0", "matrix row is empty");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    std::string rp = path + "/" + std::to_string(r);
    const Json& row = require_array(j[r], rp);
    if (row.size() != cols)
      throw SchemaError(rp, "ragged matrix: expected " + std::to_string(cols) +
                                " entries");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          entry_from_json(row[c], rp + "/" + std::to_string(c));
  }
  return m;
}

MatrixMeasure measure_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("", "measure spec must be an object");
  if (!j.contains("dim")) throw SchemaError("/dim", "missing");
  int dim = require_int(j.at("dim"), "/dim");

  MeasureKind kind = MeasureKind::Sigma;
  if (j.contains("kind")) {
    std::string k = require_string(j.at("kind"), "/kind");
    if (k == "sigma")
      kind = MeasureKind::Sigma;
    else if (k == "tau")
      kind = MeasureKind::Tau;
    else
      throw SchemaError("/kind", "expected \"sigma\" or \"tau\"");
  }

  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    const Json& arr = require_array(j.at("atoms"), "/atoms");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      std::string ap = "/atoms/" + std::to_string(k);
      const Json& a = arr[k];
      if (!a.is_object()) throw SchemaError(ap, "expected an object");
      if (!a.contains("lambda")) throw SchemaError(ap + "/lambda", "missing");
      if (!a.contains("weight")) throw SchemaError(ap + "/weight", "missing");
      Atom atom;
      atom.lambda = require_number(a.at("lambda"), ap + "/lambda");
      atom.weight = matrix_from_json(a.at("weight"), ap + "/weight");
      if (atom.weight.rows() != dim || atom.weight.cols() != dim)
        throw SchemaError(ap + "/weight",
                          "expected a " + std::to_string(dim) + "x" +
                              std::to_string(dim) + " matrix");
      atoms.push_back(std::move(atom));
    }
  }

  std::optional<DensitySpec> density;
  if (j.contains("density")) {
    const Json& dj = j.at("density");
    if (!dj.is_object()) throw SchemaError("/density", "expected an object");
    if (!dj.contains("expr")) throw SchemaError("/density/expr", "missing");
    std::string expr = require_string(dj.at("expr"), "/density/expr");
    std::map<std::string, double> params;
    if (dj.contains("params")) {
      const Json& pj = dj.at("params");
      if (!pj.is_object())
        throw SchemaError("/density/params", "expected an object");
      for (auto it = pj.begin(); it != pj.end(); ++it)
        params[it.key()] =
            require_number(it.value(), "/density/params/" + it.key());
    }
    DensitySpec d = named_density(expr, params, dim, "/density");
    if (dj.contains("smooth_windows")) {
      const Json& wj = require_array(dj.at("smooth_windows"),
                                     "/density/smooth_windows");
      d.smooth_windows.clear();
      for (std::size_t k = 0; k < wj.size(); ++k) {
        std::string wp = "/density/smooth_windows/" + std::to_string(k);
        const Json& w = require_array(wj[k], wp);
        if (w.size() != 2) throw SchemaError(wp, "expected [a, b]");
        d.smooth_windows.emplace_back(require_number(w[0], wp + "/0"),
                                      require_number(w[1], wp + "/1"));
      }
    }
    if (j.contains("tail")) {
      const Json& tj = j.at("tail");
      if (!tj.is_object()) throw SchemaError("/tail", "expected an object");
      for (const char* f : {"C", "p", "cutoff"})
        if (!tj.contains(f))
          throw SchemaError(std::string("/tail/") + f, "missing");
      d.tail = TailBound{require_number(tj.at("C"), "/tail/C"),
                         require_number(tj.at("p"), "/tail/p"),
                         require_number(tj.at("cutoff"), "/tail/cutoff")};
    }
    density = std::move(d);
  } else if (j.contains("tail")) {
    throw SchemaError("/tail", "tail certificate without a density");
  }

  if (atoms.empty() && !density)
    throw SchemaError("", "measure needs atoms, a density, or both");
  return MatrixMeasure::make(kind, dim, std::move(atoms), std::move(density));
}

MatrixMeasure measure_from_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) raise(Errc::InvalidInput, "cannot open measure file: " + file);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(Errc::InvalidInput, file + ": JSON parse failure: " + e.what());
  }
  return measure_from_json(j);
}

Json measure_to_json(const MatrixMeasure& m) {
  Json out = Json::object();
  out["dim"] = m.dim();
  out["kind"] = kind_name(m.stored_kind());
  if (m.has_atoms()) {
    Json arr = Json::array();
    for (const Atom& a : m.stored_atoms()) {
      Json aj = Json::object();
      aj["lambda"] = a.lambda;
      aj["weight"] = matrix_to_json(a.weight);
      arr.push_back(std::move(aj));
    }
    out["atoms"] = std::move(arr);
  }
  if (m.has_density()) {
    const DensitySpec& d = *m.stored_density();
    if (d.id == "custom")
      raise(Errc::InvalidInput,
            "measure_to_json: ad-hoc density callables do not serialize");
    Json dj = Json::object();
    dj["expr"] = d.id;
    if (!d.params.empty()) {
      Json pj = Json::object();
      for (const auto& [k, v] : d.params) pj[k] = v;
      dj["params"] = std::move(pj);
    }
    Json wj = Json::array();
    for (const auto& [a, b] : d.smooth_windows) wj.push_back(Json::array({a, b}));
    dj["smooth_windows"] = std::move(wj);
    out["density"] = std::move(dj);
    if (d.tail) {
      Json tj = Json::object();
      tj["C"] = d.tail->C;
      tj["p"] = d.tail->p;
      tj["cutoff"] = d.tail->cutoff;
      out["tail"] = std::move(tj);
    }
  }
  return out;
}

EvalGrid grid_from_json(const Json& j) {
  require_array(j, "");
  EvalGrid g;
  g.points.clear();
  for (std::size_t k = 0; k < j.size(); ++k) {
    std::string p = "/" + std::to_string(k);
    const Json& pt = require_array(j[k], p);
    if (pt.size() != 2) throw SchemaError(p, "expected [re, im]");
    g.points.emplace_back(require_number(pt[0], p + "/0"),
                          require_number(pt[1], p + "/1"));
  }
  return g;
}

ContextSpec context_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("", "context spec must be an object");
  if (!j.contains("measure")) throw SchemaError("/measure", "missing");
  if (!j.contains("b")) throw SchemaError("/b", "missing");
  if (!j.contains("D")) throw SchemaError("/D", "missing");

  ContextSpec spec;
  try {
    spec.measure = measure_from_json(j.at("measure"));
  } catch (const SchemaError& e) {
    throw SchemaError("/measure" + e.path(), e.detail());
  }
  spec.b = require_number(j.at("b"), "/b");
  spec.D = matrix_from_json(j.at("D"), "/D");
  if (j.contains("phi_basis"))
    spec.phi_basis = matrix_from_json(j.at("phi_basis"), "/phi_basis");
  if (j.contains("psi_basis"))
    spec.psi_basis = matrix_from_json(j.at("psi_basis"), "/psi_basis");
  return spec;
}

ContextSpec context_from_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) raise(Errc::InvalidInput, "cannot open context file: " + file);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(Errc::InvalidInput, file + ": JSON parse failure: " + e.what());
  }
  return context_from_json(j);
}

}  // namespace wt
