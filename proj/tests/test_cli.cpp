#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wt/errors.hpp"
#include "wt/herglotz.hpp"
#include "wt/measure_io.hpp"
#include "wt/types.hpp"
#include "wtcli/cli.hpp"

using namespace wt;

namespace {

template <typename F>
std::optional<Errc> code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// JSON-pointer of the first schema violation, or "<none>".
template <typename F>
std::string path_of(F&& f) {
  try {
    f();
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<none>";
}

const std::string& fixture_dir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/wtcli_test_XXXXXX";
    char* d = mkdtemp(tmpl);
    if (!d) std::abort();
    return std::string(d);
  }();
  return dir;
}

std::string write_fixture(const std::string& name, const std::string& body) {
  std::string path = fixture_dir() + "/" + name;
  std::ofstream f(path);
  f << body;
  return path;
}

const char* kOnesin =
    R"({"dim": 1, "kind": "sigma",
        "density": {"expr": "one_plus_sin_over_pi_1pl2"}})";

const char* kAtoms3 =
    R"({"dim": 1, "kind": "sigma", "atoms": [
        {"lambda": -1.0, "weight": [[[0.25, 0.0]]]},
        {"lambda": 0.0,  "weight": [[[0.5, 0.0]]]},
        {"lambda": 1.0,  "weight": [[[0.25, 0.0]]]}]})";

const char* kCtxCyclic =
    R"({"measure": {"dim": 2, "kind": "tau",
                    "density": {"expr": "lebesgue_over_pi"}},
        "b": 1.0,
        "D": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]]})";

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = wtcli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

// Drives the installed binary through a shell; used only for the
// process-level exit-code contract.
CliRun run_binary(const std::string& args) {
  std::string cmd = std::string(WT_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  CliRun r;
  char buf[512];
  while (size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

}  // namespace

TEST_CASE("complex literals parse in every written form") {
  CHECK(parse_complex("1") == Cplx(1, 0));
  CHECK(parse_complex("-2.5") == Cplx(-2.5, 0));
  CHECK(parse_complex("i") == Cplx(0, 1));
  CHECK(parse_complex("-i") == Cplx(0, -1));
  CHECK(parse_complex("2i") == Cplx(0, 2));
  CHECK(parse_complex("1+2i") == Cplx(1, 2));
  CHECK(parse_complex("1-2i") == Cplx(1, -2));
  CHECK(parse_complex("1e-3i") == Cplx(0, 1e-3));
  CHECK(parse_complex("2.5e-01+1e1i") == Cplx(0.25, 10.0));
  CHECK(parse_complex(" 1 + 2i ") == Cplx(1, 2));
  CHECK(parse_complex("-1.5-0.5i") == Cplx(-1.5, -0.5));

  CHECK(code_of([] { parse_complex(""); }) == Errc::InvalidInput);
  CHECK(code_of([] { parse_complex("abc"); }) == Errc::InvalidInput);
  CHECK(code_of([] { parse_complex("1+2j"); }) == Errc::InvalidInput);
  CHECK(code_of([] { parse_complex("1++2i"); }) == Errc::InvalidInput);
}

TEST_CASE("measure specs round trip through JSON") {
  MatrixMeasure atoms = measure_from_json(Json::parse(kAtoms3));
  MatrixMeasure atoms2 = measure_from_json(measure_to_json(atoms));
  REQUIRE(atoms2.stored_atoms().size() == 3);
  Cplx z(0.7, 1.3);
  CHECK(op_norm(eval_M(atoms, z) - eval_M(atoms2, z)) == 0.0);

  MatrixMeasure dens = measure_from_json(Json::parse(kOnesin));
  MatrixMeasure dens2 = measure_from_json(measure_to_json(dens));
  CHECK(op_norm(eval_M(dens, z) - eval_M(dens2, z)) == 0.0);

  // Parametrized named density keeps its parameters across the trip.
  Json box = Json::parse(
      R"({"dim": 1, "density": {"expr": "constant_on_interval",
          "params": {"a": -1.0, "b": 1.0, "value": 0.5}}})");
  MatrixMeasure flat = measure_from_json(box);
  Json again = measure_to_json(flat);
  CHECK(again["density"]["params"]["value"] == 0.5);
  MatrixMeasure flat2 = measure_from_json(again);
  CHECK(op_norm(eval_M(flat, z) - eval_M(flat2, z)) == 0.0);

  // Ad-hoc callables have no serialized form.
  DensitySpec adhoc;
  adhoc.density = [](double) { return Matrix::Identity(1, 1); };
  adhoc.smooth_windows = {{-1.0, 1.0}};
  MatrixMeasure raw =
      MatrixMeasure::make_raw(MeasureKind::Sigma, 1, {}, adhoc);
  CHECK(code_of([&] { measure_to_json(raw); }) == Errc::InvalidInput);
}

TEST_CASE("schema violations carry JSON-pointer paths") {
  auto parse = [](const char* text) {
    return [j = Json::parse(text)] { measure_from_json(j); };
  };
  CHECK(path_of(parse(R"({"atoms": []})")) == "/dim");
  CHECK(path_of(parse(R"({"dim": 1, "kind": "gamma"})")) == "/kind");
  CHECK(path_of(parse(R"({"dim": 1, "atoms": [{"lambda": 0.0}]})")) ==
        "/atoms/0/weight");
  CHECK(path_of(parse(
            R"({"dim": 2, "atoms": [{"lambda": 0.0,
                "weight": [[[1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}]})")) ==
        "/atoms/0/weight/1");
  CHECK(path_of(parse(R"({"dim": 1, "density": {"expr": "nope"}})")) ==
        "/density/expr");
  CHECK(path_of(parse(
            R"({"dim": 1,
                "density": {"expr": "one_plus_sin_over_pi_1pl2"},
                "tail": {"C": 1.0, "cutoff": 50.0}})")) == "/tail/p");
  CHECK(path_of(parse(R"({"dim": 1, "tail": {"C": 1, "p": 2, "cutoff": 1}})")) ==
        "/tail");

  CHECK(path_of([] {
          grid_from_json(Json::parse(R"([[0.5, 1.0], [0.5]])"));
        }) == "/1");

  CHECK(path_of([] {
          context_from_json(Json::parse(R"({"measure": {"dim": 1}})"));
        }) == "/b");
  // Nested measure failures keep the outer prefix.
  std::string nested = path_of([] {
    context_from_json(Json::parse(
        R"({"measure": {"dim": 1, "kind": "gamma"}, "b": 1.0,
            "D": [[[1.0, 0.0]]]})"));
  });
  CHECK(nested == "/measure/kind");
}

TEST_CASE("dispatch maps outcomes onto the exit-code contract") {
  std::string onesin = write_fixture("onesin.json", kOnesin);
  std::string atoms3 = write_fixture("atoms3.json", kAtoms3);
  std::string ctx = write_fixture("ctx_cyclic.json", kCtxCyclic);

  CHECK(run_cli({}).code == 1);
  CliRun help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("Subcommands") != std::string::npos);

  CliRun missing = run_cli({"eval", "--measure", "missingfile.json"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("missingfile.json") != std::string::npos);

  CliRun chk = run_cli({"check", "--measure", onesin});
  CHECK(chk.code == 0);
  CHECK(Json::parse(chk.out)["pass"] == true);

  CliRun good = run_cli(
      {"period", "--measure", onesin, "--b", "6.283185307179586"});
  CHECK(good.code == 0);
  CHECK(Json::parse(good.out)["verdicts"][0]["value"].get<double>() <= 1e-6);
  CHECK(run_cli({"period", "--measure", onesin, "--b", "3.15"}).code == 2);

  CHECK(run_cli({"check", "--measure", onesin, "--tol-override", "nope=1"})
            .code == 1);
  CHECK(run_cli({"check", "--measure", onesin, "--tol-override",
                 "period_residual=-1"})
            .code == 1);

  CliRun inv = run_cli({"invert", "--measure", atoms3, "--alpha", "-0.4",
                        "--beta", "0.6"});
  CHECK(inv.code == 0);
  double est = Json::parse(inv.out)["data"]["estimate"][0][0][0].get<double>();
  CHECK(std::abs(est - 0.5) <= 1e-4);

  CliRun orb = run_cli({"orbit", "--ctx", ctx, "--nmax", "10"});
  CHECK(orb.code == 0);
  CHECK(Json::parse(orb.out)["data"]["period"] == 4);

  CliRun ex = run_cli({"example", "--id", "a"});
  CHECK(ex.code == 0);
  CHECK(run_cli({"example", "--id", "zz"}).code == 1);

  CliRun model = run_cli({"model", "--measure", atoms3, "--layers", "0"});
  CHECK(model.code == 0);
  CHECK(Json::parse(model.out)["data"]["size"] == 3);
}

TEST_CASE("value dumps and sweeps land in CSV files") {
  std::string atoms3 = write_fixture("atoms3_csv.json", kAtoms3);
  std::string csv = fixture_dir() + "/vals.csv";
  CliRun r = run_cli(
      {"eval", "--measure", atoms3, "--z", "2i", "--csv", csv});
  CHECK(r.code == 0);
  std::ifstream f(csv);
  std::string header, row;
  std::getline(f, header);
  std::getline(f, row);
  CHECK(header == "re_z,im_z,entry,re,im");
  CHECK(row.substr(0, 4) == "0,2,");

  std::string sweep = fixture_dir() + "/sweep.csv";
  CliRun s = run_cli({"example", "--id", "diag", "--grid", "ten",
                      "--sweep-period", "2", "--csv", sweep});
  CHECK(s.code == 0);
  Json sj = Json::parse(s.out);
  REQUIRE(sj["data"]["period_sweep"].size() == 2);
  CHECK(sj["data"]["period_sweep"][0]["residual"].get<double>() >= 1e-3);
  std::ifstream sf(sweep);
  std::getline(sf, header);
  CHECK(header == "n,b,residual");

  // A sweep sink without a sweep is a usage error.
  CHECK(run_cli({"example", "--id", "a", "--csv", sweep}).code == 1);
}

TEST_CASE("reports are byte-stable across runs and thread counts") {
  std::string onesin = write_fixture("onesin_det.json", kOnesin);
  CliRun a = run_cli({"check", "--measure", onesin});
  CliRun b = run_cli({"check", "--measure", onesin});
  CliRun c = run_cli({"check", "--measure", onesin, "--threads", "4"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
}

TEST_CASE("installed binary honors the exit contract end to end") {
  std::string onesin = write_fixture("onesin_bin.json", kOnesin);
  CHECK(run_binary("period --measure " + onesin +
                   " --b 6.283185307179586").code == 0);
  CHECK(run_binary("period --measure " + onesin + " --b 3.15").code == 2);
  CHECK(run_binary("eval --measure missingfile.json").code == 1);

  CliRun self = run_binary("selftest");
  CHECK(self.code == 0);
  CHECK(self.out.find("selftest: 13/13 criteria passed") != std::string::npos);
}
