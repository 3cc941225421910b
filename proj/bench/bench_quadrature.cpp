// Serial reference against the OpenMP kernels: annulus cubature of 1/W and a
// rectified x-shell scan, both on the worked surface x*y/2 + x^2*y. The two
// variants produce bitwise-identical values; the counters report them so a
// run shows the agreement next to the timings.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "charpt/charlocus.hpp"
#include "charpt/quadrature.hpp"

using namespace charpt;

namespace {

const GraphSurface& worked() {
  static const GraphSurface s = GraphSurface::parse("x*y/2 + x^2*y");
  return s;
}

void BM_Annulus(benchmark::State& state) {
  CubatureOptions opt;
  opt.parallel = state.range(0) != 0;
  const double inner = 1.0 / static_cast<double>(state.range(1));
  const FrameModel frame = FrameModel::heisenberg();
  // DoNotOptimize takes the whole struct: benchmark 1.6's "+r,m" constraint
  // can bind a lone double to a general-purpose register and corrupt it.
  CubatureResult r;
  for (auto _ : state) {
    r = integrate_annulus(frame, worked(), {}, {0, 0}, inner, 0.25, opt);
    benchmark::DoNotOptimize(r);
  }
  state.counters["integral"] = r.value;
  state.counters["omp_threads"] = opt.parallel ? omp_get_max_threads() : 1;
}

void BM_RectifiedScan(benchmark::State& state) {
  const FrameModel frame = FrameModel::heisenberg();
  const CharPointRecord rec = classify(frame, worked(), {0, 0});
  const NormalForm nf = rotate_to_normal_form(worked(), rec);
  ScanOptions opt;
  opt.parallel = state.range(0) != 0;
  opt.eps_min = 1e-6;
  IntegrabilityReport r;
  for (auto _ : state) {
    r = scan_rectified(nf, {}, opt);
    benchmark::DoNotOptimize(r);
  }
  state.counters["limit"] = r.limit;
  state.counters["omp_threads"] = opt.parallel ? omp_get_max_threads() : 1;
}

} // namespace

// Args: {parallel, 1 / inner radius}.
BENCHMARK(BM_Annulus)->ArgNames({"parallel", "inv_inner"})->ArgsProduct({{0, 1}, {100, 10000}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RectifiedScan)->ArgNames({"parallel"})->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
