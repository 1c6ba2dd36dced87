#include <vector>

#include <benchmark/benchmark.h>

#include "fmt_engine/geometry.hpp"
#include "fmt_engine/identities.hpp"
#include "fmt_engine/kinematic.hpp"
#include "fmt_engine/planar_dft.hpp"
#include "fmt_engine/weights.hpp"

using namespace fmt_engine;

static void BM_OverlapTest(benchmark::State& state) {
  const ConvexBody a = ConvexBody::spheroid(1.0, 2.0);
  const TranslationBox box = TranslationBox::cube(3.0);
  RandomStream rng(1, 0);
  std::vector<Pose> poses(1024);
  for (Pose& p : poses) p = sample_pose(rng, box);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(intersects(a, Pose{}, a, poses[i++ % poses.size()]));
  }
}
BENCHMARK(BM_OverlapTest);

static void BM_SurfaceQuadrature(benchmark::State& state) {
  const ConvexBody a = ConvexBody::spheroid(1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(surface_quadrature(a, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SurfaceQuadrature)->Arg(64)->Arg(256);

static void BM_TwoBodyTensorForm(benchmark::State& state) {
  RandomStream rng(2, 0);
  SurfacePatch p, q;
  p.normal = random_unit_vector(rng);
  q.normal = random_unit_vector(rng);
  p.kappa1 = 1.0, p.kappa2 = 0.5, q.kappa1 = 2.0, q.kappa2 = 0.25;
  p.dir1 = p.normal.unitOrthogonal();
  p.dir2 = p.normal.cross(p.dir1);
  q.dir1 = q.normal.unitOrthogonal();
  q.dir2 = q.normal.cross(q.dir1);
  for (auto _ : state) benchmark::DoNotOptimize(two_body_euler_tensor_form(p, q));
}
BENCHMARK(BM_TwoBodyTensorForm);

static void BM_ExcludedVolumeMC(benchmark::State& state) {
  const ConvexBody a = ConvexBody::spheroid(1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(excluded_volume_mc(a, a, MCOptions{100'000, 42, 1}));
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_ExcludedVolumeMC)->Unit(benchmark::kMillisecond);

static void BM_WeightedDensityFields(benchmark::State& state) {
  const double r = 0.5;
  const int n = static_cast<int>(state.range(0));
  const Grid1D grid = Grid1D::make(r / 100.0, n);
  const PlanarKernels k = planar_kernels(r, grid);
  DensityProfile prof{grid, std::vector<double>(n, 0.5), 0.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(weighted_density_fields(prof, k));
}
BENCHMARK(BM_WeightedDensityFields)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_MuExField(benchmark::State& state) {
  const double r = 0.5;
  const Grid1D grid = Grid1D::make(r / 100.0, 2000);
  const PlanarKernels k = planar_kernels(r, grid);
  DensityProfile prof{grid, std::vector<double>(2000, 0.5), 0.0, 0.0};
  const PlanarFields f = weighted_density_fields(prof, k);
  const FreeEnergyModel m = FreeEnergyModel::rosenfeld_original();
  for (auto _ : state) benchmark::DoNotOptimize(mu_ex_field(f, m, k));
}
BENCHMARK(BM_MuExField)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
