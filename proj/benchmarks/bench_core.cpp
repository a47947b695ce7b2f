#include <benchmark/benchmark.h>

#include "coupled_levy/chains.hpp"
#include "coupled_levy/coupling.hpp"
#include "coupled_levy/levy.hpp"
#include "coupled_levy/oracle.hpp"

namespace cl = coupled_levy;

namespace {

cl::Distribution1D laplace01() { return cl::Distribution1D::from_family(cl::Laplace{0.0, 1.0}); }

void BM_AmrConstruction(benchmark::State& state) {
  const auto F = laplace01();
  const auto G = cl::shift(F, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(cl::AmrCoupling(F, G).p());
}
BENCHMARK(BM_AmrConstruction);

void BM_AmrSample(benchmark::State& state) {
  const auto F = laplace01();
  const cl::AmrCoupling c(F, cl::shift(F, 1.0));
  cl::UniformStream u(1);
  for (auto _ : state) benchmark::DoNotOptimize(c.sample(u()));
}
BENCHMARK(BM_AmrSample);

void BM_BandPayoff(benchmark::State& state) {
  const auto F = laplace01();
  const auto G = cl::shift(F, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(cl::band_payoff(F, G, 0.5));
}
BENCHMARK(BM_BandPayoff);

void BM_PsiN(benchmark::State& state) {
  const auto F = laplace01();
  const auto cost = cl::ConcaveCost::capped(1.0);
  const cl::Terminal phi = [&cost](double d) { return cost(d); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(cl::psi_n(F, 1.0, phi, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_PsiN)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_VerifyAmrOptimal(benchmark::State& state) {
  const auto F = laplace01();
  const auto cost = cl::ConcaveCost::power(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cl::verify_amr_optimal(F, 1.0, cost, static_cast<std::size_t>(state.range(0))).gap);
  }
}
BENCHMARK(BM_VerifyAmrOptimal)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LevyPath(benchmark::State& state) {
  const cl::CompoundPoissonSpec spec{2.0, laplace01(), 0.0, 1.0, 1.0};
  const auto kind = static_cast<cl::CouplingKind>(state.range(0));
  cl::PairSimulator sim(spec, kind);
  std::uint64_t r = 0;
  for (auto _ : state) {
    cl::UniformStream u(1, 0, r++);
    benchmark::DoNotOptimize(sim.run(u, false).separation);
  }
  state.SetLabel(cl::to_string(kind));
}
BENCHMARK(BM_LevyPath)->DenseRange(0, 4);

}  // namespace
BENCHMARK_MAIN();
