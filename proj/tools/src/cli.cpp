#include "wtcli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wt/catalog.hpp"
#include "wt/errors.hpp"
#include "wt/extension.hpp"
#include "wt/herglotz.hpp"
#include "wt/inversion.hpp"
#include "wt/measure.hpp"
#include "wt/measure_io.hpp"
#include "wt/model.hpp"
#include "wt/report.hpp"
#include "wt/selftest.hpp"
#include "wt/types.hpp"

namespace wtcli {
namespace {

using wt::Cplx;
using wt::Json;
using wt::Matrix;
using wt::MatrixMeasure;

wt::Tolerances tolerances_from(const std::vector<std::string>& overrides) {
  wt::Tolerances tol;
  for (const std::string& s : overrides) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      wt::raise(wt::Errc::InvalidInput,
                "tolerance override must be name=value, got: " + s);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      wt::raise(wt::Errc::InvalidInput,
                "tolerance override value does not parse: " + s);
    }
    tol.set_override(s.substr(0, eq), v);
  }
  return tol;
}

Json json_from_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) wt::raise(wt::Errc::InvalidInput, "cannot open file: " + file);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    wt::raise(wt::Errc::InvalidInput,
              file + ": JSON parse failure: " + e.what());
  }
  return j;
}

// Named grids plus "path.json" holding an array of [re, im] points.
wt::EvalGrid resolve_grid(const std::string& spec) {
  if (spec.empty() || spec == "default" || spec == "standard")
    return wt::EvalGrid::standard();
  if (spec == "ten") return wt::EvalGrid::ten();
  if (spec == "dense") return wt::EvalGrid::dense50();
  wt::EvalGrid g = wt::grid_from_json(json_from_file(spec));
  g.validate();
  return g;
}

// Writes the report to the chosen sink and maps verdicts to the exit code.
int emit(const wt::Report& rep, const std::string& out_path,
         std::ostream& out) {
  std::string text = rep.to_json().dump(2);
  if (out_path.empty()) {
    out << text << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f)
      wt::raise(wt::Errc::InvalidInput, "cannot open output file: " + out_path);
    f << text << "\n";
  }
  return rep.all_pass() ? 0 : 2;
}

void require_threads(int threads) {
  if (threads < 1)
    wt::raise(wt::Errc::InvalidInput, "--threads must be at least 1");
}

// --- eval --------------------------------------------------------------

struct EvalArgs {
  std::string measure;
  std::vector<std::string> zs;
  std::string grid = "standard";
  std::string csv;
  std::string out;
};

void write_values_csv(const std::string& path, const std::vector<Cplx>& zs,
                      const std::vector<Matrix>& values) {
  std::ofstream f(path);
  if (!f) wt::raise(wt::Errc::InvalidInput, "cannot open csv output: " + path);
  f << "re_z,im_z,entry,re,im\n" << std::setprecision(17);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const Matrix& v = values[i];
    for (int r = 0; r < v.rows(); ++r)
      for (int c = 0; c < v.cols(); ++c)
        f << zs[i].real() << ',' << zs[i].imag() << ','
          << r * v.cols() + c << ',' << v(r, c).real() << ','
          << v(r, c).imag() << '\n';
  }
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  MatrixMeasure m = wt::measure_from_file(a.measure);
  wt::HerglotzFunction f = wt::herglotz_from_measure(m);

  std::vector<Cplx> points;
  if (!a.zs.empty()) {
    for (const std::string& s : a.zs) points.push_back(wt::parse_complex(s));
  } else {
    points = resolve_grid(a.grid).points;
  }

  std::vector<Matrix> values;
  values.reserve(points.size());
  for (Cplx z : points) values.push_back(f.eval(z));

  wt::Report rep{"eval"};
  rep.data["measure"] = a.measure;
  rep.data["dim"] = m.dim();
  rep.data["kind"] = wt::kind_name(m.kind());
  Json pts = Json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    Json p = Json::object();
    p["z"] = wt::cplx_to_json(points[i]);
    p["M"] = wt::matrix_to_json(values[i]);
    pts.push_back(std::move(p));
  }
  rep.data["points"] = std::move(pts);

  if (!a.csv.empty()) write_values_csv(a.csv, points, values);
  return emit(rep, a.out, out);
}

// --- check -------------------------------------------------------------

struct CheckArgs {
  std::string measure;
  std::string grid = "standard";
  std::string out;
  int threads = 1;
  std::vector<std::string> tol_overrides;
};

int run_check(const CheckArgs& a, std::ostream& out) {
  require_threads(a.threads);
  wt::Tolerances tol = tolerances_from(a.tol_overrides);
  MatrixMeasure m = wt::measure_from_file(a.measure);
  wt::HerglotzFunction f = wt::herglotz_from_measure(m);
  wt::Report rep = wt::herglotz_report(f, resolve_grid(a.grid), tol, a.threads);
  rep.data["measure"] = a.measure;
  return emit(rep, a.out, out);
}

// --- period ------------------------------------------------------------

struct PeriodArgs {
  std::string measure;
  double b = 0.0;
  std::string grid = "standard";
  std::string out;
  int threads = 1;
  std::vector<std::string> tol_overrides;
};

int run_period(const PeriodArgs& a, std::ostream& out) {
  require_threads(a.threads);
  wt::Tolerances tol = tolerances_from(a.tol_overrides);
  MatrixMeasure m = wt::measure_from_file(a.measure);
  wt::HerglotzFunction f = wt::herglotz_from_measure(m);
  double fn = wt::function_period_residual(f, a.b, resolve_grid(a.grid),
                                           a.threads);
  wt::Report rep{"period"};
  rep.verdicts.push_back(
      wt::check_upper("period_residual", fn, tol.get("period_residual")));
  rep.data["measure"] = a.measure;
  rep.data["b"] = a.b;
  // Informative companion: the same shift tested against the measure
  // itself, over an automatically chosen interior window.
  rep.data["measure_residual"] = wt::tau_periodicity_residual_auto(m, a.b);
  return emit(rep, a.out, out);
}

// --- invert ------------------------------------------------------------

struct InvertArgs {
  std::string measure;
  double alpha = 0.0;
  double beta = 0.0;
  double eps0 = 0.2;
  double ratio = 0.5;
  int count = 6;
  int nodes = 512;
  std::string phi = "one";
  std::string out;
};

int run_invert(const InvertArgs& a, std::ostream& out) {
  MatrixMeasure m = wt::measure_from_file(a.measure);
  auto transform = [m](Cplx z) { return wt::cauchy_transform(m, z); };

  wt::ContourSchedule sched = wt::ContourSchedule::defaults(a.alpha, a.beta);
  sched.eps0 = a.eps0;
  sched.ratio = a.ratio;
  sched.count = a.count;
  sched.nodes = a.nodes;
  if (a.phi == "one") {
    // identity weight, leave sched.phi empty
  } else if (a.phi == "linear") {
    sched.phi = [](Cplx z) { return z; };
  } else if (a.phi == "square") {
    sched.phi = [](Cplx z) { return z * z; };
  } else {
    wt::raise(wt::Errc::InvalidInput,
              "--phi must be one, linear, or square; got: " + a.phi);
  }
  sched.validate();

  wt::InversionResult r = wt::invert_interval(transform, sched);
  wt::Report rep{"invert"};
  rep.data["measure"] = a.measure;
  rep.data["interval"] = Json::array({a.alpha, a.beta});
  rep.data["phi"] = a.phi;
  rep.data["estimate"] = wt::matrix_to_json(r.estimate);
  rep.data["error"] = r.error;
  rep.data["chosen_index"] = r.chosen_index;
  return emit(rep, a.out, out);
}

// --- orbit -------------------------------------------------------------

struct OrbitArgs {
  std::string ctx;
  std::string v0;
  int nmax = 64;
  std::string out;
  std::vector<std::string> tol_overrides;
};

int run_orbit(const OrbitArgs& a, std::ostream& out) {
  wt::Tolerances tol = tolerances_from(a.tol_overrides);
  wt::ContextSpec spec = wt::context_from_file(a.ctx);
  wt::ExtensionContext ctx = wt::ExtensionContext::make(
      spec.measure, spec.b, spec.D, spec.phi_basis, spec.psi_basis);

  wt::UnitaryMatrix v0{Matrix()};
  std::string start;
  if (a.v0.empty()) {
    wt::Rng rng(0x5eedull);
    v0 = wt::UnitaryMatrix::checked(wt::random_unitary(ctx.dim(), rng));
    start = "random(seed 0x5eed)";
  } else {
    v0 = wt::UnitaryMatrix::checked(
        wt::matrix_from_json(json_from_file(a.v0), ""));
    start = a.v0;
  }

  std::optional<int> period = wt::orbit_period(ctx, v0, a.nmax, tol.get("orbit"));

  wt::Report rep{"orbit"};
  rep.data["context"] = a.ctx;
  rep.data["start"] = start;
  rep.data["b"] = ctx.b();
  rep.data["nmax"] = a.nmax;
  rep.data["measure_residual"] = ctx.periodicity_residual();
  rep.data["period"] = period ? Json(*period) : Json(nullptr);
  return emit(rep, a.out, out);
}

// --- model -------------------------------------------------------------

struct ModelArgs {
  std::string measure;
  int layers = 1;
  std::optional<double> b;
  std::vector<double> delta;
  std::string grid = "ten";
  bool assert_shift = false;
  std::string out;
  std::vector<std::string> tol_overrides;
};

int run_model(const ModelArgs& a, std::ostream& out) {
  wt::Tolerances tol = tolerances_from(a.tol_overrides);
  MatrixMeasure m = wt::measure_from_file(a.measure);
  wt::FiniteModel model = wt::build_model(m, a.layers);

  wt::Report rep{"model"};
  rep.data["measure"] = a.measure;
  rep.data["size"] = model.size();
  rep.data["dim"] = model.dim;
  rep.data["boundary_layers"] = model.boundary_layers;
  rep.data["undersized"] = model.undersized;
  if (model.step) rep.data["step"] = *model.step;

  // Internal consistency: the model's resolvent assembly must reproduce
  // the direct evaluation of its own (normalized) weights.
  std::vector<wt::Atom> atoms;
  for (int j = 0; j < model.size(); ++j)
    atoms.push_back({model.lattice[static_cast<std::size_t>(j)],
                     model.weights[static_cast<std::size_t>(j)]});
  MatrixMeasure held =
      MatrixMeasure::make_raw(wt::MeasureKind::Sigma, model.dim, atoms);
  double worst = 0.0;
  for (Cplx z : resolve_grid(a.grid).points)
    worst = std::max(worst,
                     wt::op_norm(wt::wt_from_model(model, z) - wt::eval_M(held, z)));
  rep.verdicts.push_back(wt::check_upper("wt_consistency", worst,
                                         tol.get("model_wt_consistency")));

  std::optional<double> b = a.b;
  if (!b && model.step) {
    // Implicit shift step: engage only when the shift matrix is actually
    // constructible, so a plain realization run never trips over layers.
    std::optional<int> stride = model.stride_for(*model.step);
    if (stride && model.boundary_layers >= *stride) b = *model.step;
  }
  if (b) {
    Matrix U = wt::s_type_matrix(
        model, wt::UnitaryMatrix::checked(Matrix::Identity(model.dim, model.dim)),
        *b);
    double iso = wt::interior_isometry_defect(model, U);
    double comm = wt::commutation_residual(model, U, *b);
    rep.data["b"] = *b;
    rep.data["isometry_defect"] = iso;
    rep.data["commutation_residual"] = comm;
    if (!a.delta.empty()) {
      double shift = wt::spectral_shift_residual(model, U, *b,
                                                 {a.delta[0], a.delta[1]});
      rep.data["spectral_shift_residual"] = shift;
      if (a.assert_shift)
        rep.verdicts.push_back(wt::check_upper(
            "spectral_shift", shift, tol.get("model_spectral_shift")));
    }
    // Shift residuals gate the run only on request: for a measure that is
    // not b-periodic they are findings, not failures.
    if (a.assert_shift) {
      rep.verdicts.push_back(
          wt::check_upper("interior_isometry", iso, tol.get("model_isometry")));
      rep.verdicts.push_back(wt::check_upper("commutation", comm,
                                             tol.get("model_commutation")));
    }
  }
  return emit(rep, a.out, out);
}

// --- example -----------------------------------------------------------

struct ExampleArgs {
  std::string id;
  std::string params;
  std::string grid = "standard";
  int sweep = 0;
  std::string csv;
  std::string out;
  int threads = 1;
  std::vector<std::string> tol_overrides;
};

Cplx param_complex(const Json& params, const std::string& key, Cplx fallback) {
  if (!params.contains(key)) return fallback;
  const Json& v = params.at(key);
  if (v.is_number()) return Cplx(v.get<double>(), 0.0);
  if (v.is_string()) return wt::parse_complex(v.get<std::string>());
  throw wt::SchemaError("/" + key, "expected a number or a complex string");
}

double param_number(const Json& params, const std::string& key,
                    double fallback) {
  if (!params.contains(key)) return fallback;
  const Json& v = params.at(key);
  if (!v.is_number()) throw wt::SchemaError("/" + key, "expected a number");
  return v.get<double>();
}

int run_example_schrodinger(const Json& params, const std::string& out_path,
                            const wt::Tolerances& tol, std::ostream& out) {
  double s = param_number(params, "s", wt::pi);
  double gamma = param_number(params, "gamma", 1.0);
  double x0 = param_number(params, "x0", -6.0);
  double dx = param_number(params, "dx", 1e-3);
  int n = static_cast<int>(param_number(params, "n", 12001));
  if (n < 5) throw wt::SchemaError("/n", "need at least 5 samples");

  std::map<int, Cplx> vhat{{1, Cplx(0.3, 0.1)}, {-1, Cplx(0.3, -0.1)}};
  if (params.contains("vhat")) {
    const Json& vj = params.at("vhat");
    if (!vj.is_object())
      throw wt::SchemaError("/vhat", "expected an object of k -> amplitude");
    vhat.clear();
    for (const auto& [key, val] : vj.items()) {
      int k = 0;
      try {
        std::size_t used = 0;
        k = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw wt::SchemaError("/vhat/" + key, "key must be an integer");
      }
      if (!val.is_string())
        throw wt::SchemaError("/vhat/" + key, "expected a complex string");
      vhat[k] = wt::parse_complex(val.get<std::string>());
    }
  }

  wt::SampledFunction f;
  f.x0 = x0;
  f.dx = dx;
  f.values.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double x = x0 + dx * k;
    f.values.push_back(std::exp(-0.5 * x * x) * std::exp(Cplx(0.0, 0.3 * x)));
  }

  wt::SchrodingerCheck chk = wt::schrodinger_commutator_residual(s, vhat, f, gamma);
  wt::Report rep{"example"};
  rep.data["id"] = "schrodinger";
  rep.data["s"] = s;
  rep.data["gamma"] = gamma;
  rep.data["rhs_max"] = chk.rhs_max;
  rep.verdicts.push_back(
      wt::check_upper("commutator_residual", chk.residual, tol.get("schrodinger")));
  return emit(rep, out_path, out);
}

int run_example(const ExampleArgs& a, std::ostream& out) {
  require_threads(a.threads);
  wt::Tolerances tol = tolerances_from(a.tol_overrides);
  Json params = Json::object();
  if (!a.params.empty()) {
    try {
      params = Json::parse(a.params);
    } catch (const std::exception& e) {
      throw wt::SchemaError("", std::string("--params: ") + e.what());
    }
    if (!params.is_object())
      throw wt::SchemaError("", "--params must be a JSON object");
  }

  if (a.id == "schrodinger") {
    if (a.sweep > 0 || !a.csv.empty())
      wt::raise(wt::Errc::InvalidInput,
                "--sweep-period applies to function examples only");
    return run_example_schrodinger(params, a.out, tol, out);
  }

  wt::CatalogEntry entry;
  if (a.id == "a") {
    entry = wt::entry_a();
  } else if (a.id == "b") {
    double l = param_number(params, "l", wt::pi);
    Matrix v = Matrix::Identity(1, 1);
    if (params.contains("v")) v = wt::matrix_from_json(params.at("v"), "/v");
    entry = wt::entry_b(l, wt::UnitaryMatrix::checked(v));
  } else if (a.id == "diag") {
    double xi = param_number(params, "xi", 1.0);
    double l = param_number(params, "l", 1.0 + std::sqrt(2.0));
    Cplx w1 = param_complex(params, "omega1", std::exp(Cplx(0.0, 0.3)));
    Cplx w2 = param_complex(params, "omega2", std::exp(Cplx(0.0, -0.8)));
    entry = wt::entry_diag(xi, l, w1, w2);
  } else if (a.id == "const") {
    int m = static_cast<int>(param_number(params, "m", 1));
    entry = wt::entry_const(m);
  } else {
    wt::raise(wt::Errc::InvalidInput,
              "--id must be a, b, diag, const, or schrodinger; got: " + a.id);
  }

  wt::HerglotzFunction f = wt::to_function(entry);
  wt::EvalGrid grid = resolve_grid(a.grid);
  wt::Report rep = wt::herglotz_report(f, grid, tol, a.threads);
  rep.tool = "example";
  rep.data["id"] = entry.id;
  rep.data["params"] = entry.params_doc;
  if (entry.period) {
    rep.data["period"] = *entry.period;
    rep.verdicts.push_back(wt::check_upper(
        "declared_period_residual",
        wt::function_period_residual(f, *entry.period, grid, a.threads),
        tol.get("catalog_period")));
  }

  if (a.sweep > 0) {
    Json sweep = Json::array();
    std::ofstream csv;
    if (!a.csv.empty()) {
      csv.open(a.csv);
      if (!csv)
        wt::raise(wt::Errc::InvalidInput, "cannot open csv output: " + a.csv);
      csv << "n,b,residual\n" << std::setprecision(17);
    }
    for (int n = 1; n <= a.sweep; ++n) {
      double b = 2.0 * wt::pi * n;
      double res = wt::function_period_residual(f, b, grid, a.threads);
      Json row = Json::object();
      row["n"] = n;
      row["b"] = b;
      row["residual"] = res;
      sweep.push_back(std::move(row));
      if (csv.is_open()) csv << n << ',' << b << ',' << res << '\n';
    }
    rep.data["period_sweep"] = std::move(sweep);
  } else if (!a.csv.empty()) {
    wt::raise(wt::Errc::InvalidInput,
              "--csv for example output requires --sweep-period");
  }
  return emit(rep, a.out, out);
}

// --- selftest ----------------------------------------------------------

int run_selftest_cmd(const std::vector<std::string>& overrides,
                     std::ostream& out) {
  wt::Tolerances tol = tolerances_from(overrides);
  wt::SelftestResult r = wt::run_selftest(out, tol);
  return r.ok() ? 0 : 2;
}

int guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const wt::SchemaError& e) {
    Json ej = Json::object();
    ej["error"] = Json::object();
    ej["error"]["code"] = e.code_name();
    ej["error"]["message"] = e.detail();
    ej["error"]["path"] = e.path();
    err << ej.dump(2) << "\n";
    return 1;
  } catch (const wt::Error& e) {
    Json ej = Json::object();
    ej["error"] = Json::object();
    ej["error"]["code"] = e.code_name();
    ej["error"]["message"] = e.what();
    err << ej.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    Json ej = Json::object();
    ej["error"] = Json::object();
    ej["error"]["code"] = "internal";
    ej["error"]["message"] = e.what();
    err << ej.dump(2) << "\n";
    return 1;
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"matrix Herglotz function toolkit"};
  app.name("wt");
  app.require_subcommand(0, 1);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand(
      "eval", "evaluate the function of a measure at points");
  eval_cmd->add_option("--measure", eval_args.measure, "measure spec (JSON file)")
      ->required();
  eval_cmd->add_option("--z", eval_args.zs,
                       "evaluation point like 1.5+2i (repeatable)");
  eval_cmd->add_option("--grid", eval_args.grid,
                       "standard | ten | dense | grid JSON file");
  eval_cmd->add_option("--csv", eval_args.csv,
                       "also write re_z,im_z,entry,re,im rows");
  eval_cmd->add_option("--out", eval_args.out, "report file (default stdout)");

  CheckArgs check_args;
  auto* check_cmd = app.add_subcommand(
      "check", "verify Herglotz class membership over a grid");
  check_cmd->add_option("--measure", check_args.measure, "measure spec (JSON file)")
      ->required();
  check_cmd->add_option("--grid", check_args.grid,
                        "standard | ten | dense | grid JSON file");
  check_cmd->add_option("--threads", check_args.threads, "worker threads");
  check_cmd->add_option("--out", check_args.out, "report file (default stdout)");
  check_cmd->add_option("--tol-override", check_args.tol_overrides,
                        "name=value (repeatable)");

  PeriodArgs period_args;
  auto* period_cmd = app.add_subcommand(
      "period", "test b-periodicity of the function of a measure");
  period_cmd
      ->add_option("--measure", period_args.measure, "measure spec (JSON file)")
      ->required();
  period_cmd->add_option("--b", period_args.b, "candidate period")->required();
  period_cmd->add_option("--grid", period_args.grid,
                         "standard | ten | dense | grid JSON file");
  period_cmd->add_option("--threads", period_args.threads, "worker threads");
  period_cmd->add_option("--out", period_args.out, "report file (default stdout)");
  period_cmd->add_option("--tol-override", period_args.tol_overrides,
                         "name=value (repeatable)");

  InvertArgs invert_args;
  auto* invert_cmd = app.add_subcommand(
      "invert", "recover interval mass from the Cauchy transform");
  invert_cmd
      ->add_option("--measure", invert_args.measure, "measure spec (JSON file)")
      ->required();
  invert_cmd->add_option("--alpha", invert_args.alpha, "interval left endpoint")
      ->required();
  invert_cmd->add_option("--beta", invert_args.beta, "interval right endpoint")
      ->required();
  invert_cmd->add_option("--eps0", invert_args.eps0, "first contour height");
  invert_cmd->add_option("--ratio", invert_args.ratio, "height shrink factor");
  invert_cmd->add_option("--count", invert_args.count, "number of heights");
  invert_cmd->add_option("--nodes", invert_args.nodes,
                         "trapezoid points per segment");
  invert_cmd->add_option("--phi", invert_args.phi,
                         "weight under the integral: one | linear | square");
  invert_cmd->add_option("--out", invert_args.out, "report file (default stdout)");

  OrbitArgs orbit_args;
  auto* orbit_cmd = app.add_subcommand(
      "orbit", "detect a cyclic orbit of the extension transport map");
  orbit_cmd->add_option("--ctx", orbit_args.ctx, "context spec (JSON file)")
      ->required();
  orbit_cmd->add_option("--v0", orbit_args.v0,
                        "starting unitary (JSON matrix file; default random)");
  orbit_cmd->add_option("--nmax", orbit_args.nmax, "largest step count tried");
  orbit_cmd->add_option("--out", orbit_args.out, "report file (default stdout)");
  orbit_cmd->add_option("--tol-override", orbit_args.tol_overrides,
                        "name=value (repeatable)");

  ModelArgs model_args;
  auto* model_cmd = app.add_subcommand(
      "model", "realize the finite multiplication model of an atomic measure");
  model_cmd->add_option("--measure", model_args.measure, "measure spec (JSON file)")
      ->required();
  model_cmd->add_option("--layers", model_args.layers,
                        "boundary layers peeled per side");
  double model_b = 0.0;
  auto* model_b_opt =
      model_cmd->add_option("--b", model_b, "shift step (default: lattice step)");
  model_cmd
      ->add_option("--delta", model_args.delta,
                   "spectral window lo hi for the shift check")
      ->expected(2);
  model_cmd->add_flag("--assert-shift", model_args.assert_shift,
                      "turn shift residuals into verdicts");
  model_cmd->add_option("--grid", model_args.grid,
                        "standard | ten | dense | grid JSON file");
  model_cmd->add_option("--out", model_args.out, "report file (default stdout)");
  model_cmd->add_option("--tol-override", model_args.tol_overrides,
                        "name=value (repeatable)");

  ExampleArgs example_args;
  auto* example_cmd = app.add_subcommand(
      "example", "run a named closed-form example");
  example_cmd
      ->add_option("--id", example_args.id,
                   "a | b | diag | const | schrodinger")
      ->required();
  example_cmd->add_option("--params", example_args.params,
                          "JSON object of example parameters");
  example_cmd->add_option("--grid", example_args.grid,
                          "standard | ten | dense | grid JSON file");
  example_cmd->add_option("--sweep-period", example_args.sweep,
                          "probe candidate periods n * 2pi for n = 1..N");
  example_cmd->add_option("--csv", example_args.csv,
                          "write the sweep as n,b,residual rows");
  example_cmd->add_option("--threads", example_args.threads, "worker threads");
  example_cmd->add_option("--out", example_args.out,
                          "report file (default stdout)");
  example_cmd->add_option("--tol-override", example_args.tol_overrides,
                          "name=value (repeatable)");

  std::vector<std::string> selftest_overrides;
  auto* selftest_cmd = app.add_subcommand(
      "selftest", "run the full acceptance ladder");
  selftest_cmd->add_option("--tol-override", selftest_overrides,
                           "name=value (repeatable)");

  try {
    std::vector<std::string> rev(argv.rbegin(), argv.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "wt: " << e.what() << "\n";
    return 1;
  }

  if (model_b_opt->count() > 0) model_args.b = model_b;

  if (eval_cmd->parsed())
    return guarded([&] { return run_eval(eval_args, out); }, err);
  if (check_cmd->parsed())
    return guarded([&] { return run_check(check_args, out); }, err);
  if (period_cmd->parsed())
    return guarded([&] { return run_period(period_args, out); }, err);
  if (invert_cmd->parsed())
    return guarded([&] { return run_invert(invert_args, out); }, err);
  if (orbit_cmd->parsed())
    return guarded([&] { return run_orbit(orbit_args, out); }, err);
  if (model_cmd->parsed())
    return guarded([&] { return run_model(model_args, out); }, err);
  if (example_cmd->parsed())
    return guarded([&] { return run_example(example_args, out); }, err);
  if (selftest_cmd->parsed())
    return guarded([&] { return run_selftest_cmd(selftest_overrides, out); },
                   err);

  err << app.help();
  return 1;
}

}  // namespace wtcli
