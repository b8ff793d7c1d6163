#include <benchmark/benchmark.h>

#include <cmath>

#include "wt/extension.hpp"
#include "wt/herglotz.hpp"
#include "wt/inversion.hpp"
#include "wt/measure.hpp"
#include "wt/model.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

wt::Matrix w1(double v) {
  wt::Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

wt::MatrixMeasure sine_density() {
  wt::DensitySpec d;
  d.density = [](double x) {
    return w1((1.0 + std::sin(x)) / (kPi * (1.0 + x * x)));
  };
  d.smooth_windows = {{-50.0, 50.0}};
  d.tail = wt::TailBound{2.0 / kPi, 2.0, 50.0};
  return wt::MatrixMeasure::sigma(1, {}, d);
}

wt::MatrixMeasure lattice(int half) {
  std::vector<wt::Atom> atoms;
  double norm = 0.0;
  for (int j = -half; j <= half; ++j) norm += 1.0 / (1.0 + double(j) * j);
  for (int j = -half; j <= half; ++j)
    atoms.push_back({double(j), w1(1.0 / ((1.0 + double(j) * j) * norm))});
  return wt::MatrixMeasure::sigma(1, std::move(atoms));
}

void BM_density_mass(benchmark::State& state) {
  auto m = sine_density();
  for (auto _ : state)
    benchmark::DoNotOptimize(wt::total_mass(m).value(0, 0));
}
BENCHMARK(BM_density_mass);

void BM_eval_density(benchmark::State& state) {
  auto m = sine_density();
  wt::Cplx z(0.8, 1.1);
  for (auto _ : state) benchmark::DoNotOptimize(wt::eval_M(m, z)(0, 0));
}
BENCHMARK(BM_eval_density);

void BM_eval_lattice(benchmark::State& state) {
  auto m = lattice(static_cast<int>(state.range(0)));
  wt::Cplx z(0.8, 1.1);
  for (auto _ : state) benchmark::DoNotOptimize(wt::eval_M(m, z)(0, 0));
}
BENCHMARK(BM_eval_lattice)->Arg(1000)->Arg(20000);

void BM_invert_interval(benchmark::State& state) {
  auto m = lattice(1);
  auto phi = [&m](wt::Cplx z) { return wt::cauchy_transform(m, z); };
  auto sched = wt::ContourSchedule::defaults(-0.4, 0.6);
  for (auto _ : state)
    benchmark::DoNotOptimize(wt::invert_interval(phi, sched).estimate(0, 0));
}
BENCHMARK(BM_invert_interval);

void BM_group_map(benchmark::State& state) {
  wt::DensitySpec d;
  d.density = [](double) { return wt::Matrix::Identity(2, 2) / kPi; };
  d.smooth_windows = {{-50.0, 50.0}};
  d.tail = wt::TailBound{1.0 / kPi, 0.0, 50.0};
  auto m = wt::MatrixMeasure::tau(2, {}, d);
  wt::Matrix mult = wt::Matrix::Zero(2, 2);
  mult(0, 0) = 1.0;
  mult(1, 1) = wt::Cplx(0.0, 1.0);
  auto ctx = wt::ExtensionContext::make(m, 1.0, mult);
  wt::Rng rng(7u);
  auto v0 = wt::UnitaryMatrix::checked(wt::random_unitary(2, rng));
  ctx.transition(1);  // warm the cache; the loop times the map itself
  for (auto _ : state)
    benchmark::DoNotOptimize(wt::group_map(ctx, v0, 1).V(0, 0));
}
BENCHMARK(BM_group_map);

void BM_model_realization(benchmark::State& state) {
  auto m = lattice(static_cast<int>(state.range(0)));
  wt::Cplx z(0.8, 1.1);
  for (auto _ : state) {
    wt::FiniteModel model = wt::build_model(m, 1);
    benchmark::DoNotOptimize(wt::wt_from_model(model, z)(0, 0));
  }
}
BENCHMARK(BM_model_realization)->Arg(20)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
