#include <benchmark/benchmark.h>

#include <vector>

#include "scalelab/datapipe.hpp"
#include "scalelab/fitting.hpp"
#include "scalelab/laws.hpp"
#include "scalelab/presets.hpp"
#include "scalelab/rng.hpp"
#include "scalelab/surrogate.hpp"

using namespace scalelab;
using laws::LawFamily;

namespace {

FitDataset arxiv_grid() {
  auto spec = surrogate::make_surrogate_spec(*presets::find_domain("arxiv"),
                                             0.005, 42);
  return surrogate::gen_grid(spec);
}

void BM_philox_block(benchmark::State& state) {
  std::array<uint32_t, 2> key{1, 2};
  std::array<uint32_t, 4> ctr{0, 0, 0, 0};
  for (auto _ : state) {
    ctr[0]++;
    benchmark::DoNotOptimize(rng::philox4x32(key, ctr));
  }
}
BENCHMARK(BM_philox_block);

void BM_substream_uniform(benchmark::State& state) {
  rng::SubStream s(42, "bench", 0);
  for (auto _ : state) benchmark::DoNotOptimize(s.uniform());
}
BENCHMARK(BM_substream_uniform);

void BM_eval_law(benchmark::State& state) {
  const auto* d = presets::find_domain("arxiv");
  laws::LawParams q = d->fg;
  q.l0_pt = 3.19;
  laws::Covariates c{41000000, 300000, 0.01};
  for (auto _ : state)
    benchmark::DoNotOptimize(laws::eval_law(LawFamily::forgetting_mult, q, c));
}
BENCHMARK(BM_eval_law);

void BM_objective_full_grid(benchmark::State& state) {
  FitDataset data = arxiv_grid();
  const auto* d = presets::find_domain("arxiv");
  auto cfg = fitting::default_fit_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fitting::objective(
        LawFamily::multiplicative_ft, d->ft, data.records, cfg));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(data.records.size()));
}
BENCHMARK(BM_objective_full_grid);

void BM_grad_law(benchmark::State& state) {
  const auto* d = presets::find_domain("arxiv");
  laws::LawParams q = d->fg;
  q.l0_pt = 3.19;
  laws::Covariates c{41000000, 300000, 0.01};
  std::vector<double> out(laws::param_layout(LawFamily::forgetting_mult).size());
  for (auto _ : state) {
    laws::grad_law(LawFamily::forgetting_mult, q, c, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_grad_law);

void BM_fit_single_start(benchmark::State& state) {
  FitDataset data = arxiv_grid();
  auto cfg = fitting::default_fit_config();
  // One start per kind keeps the multistart loop out of the measurement.
  for (auto& [kind, grid] : cfg.init_grid) grid = {grid[grid.size() / 2]};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fitting::fit(LawFamily::multiplicative_ft, data.records, cfg));
  }
}
BENCHMARK(BM_fit_single_start)->Unit(benchmark::kMillisecond);

void BM_mixture_sampling(benchmark::State& state) {
  datapipe::DomainStream ft{"ft", {{1}, {2}, {3}}, std::nullopt,
                            datapipe::CyclePolicy::repeat_epochs};
  datapipe::DomainStream pt{"pt", {{4}, {5}}, std::nullopt,
                            datapipe::CyclePolicy::repeat_epochs};
  const uint64_t n = static_cast<uint64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(datapipe::sample_mixture(ft, pt, 0.01, 42, n));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(BM_mixture_sampling)->Arg(1000)->Arg(100000);

void BM_gen_grid(benchmark::State& state) {
  auto spec = surrogate::make_surrogate_spec(*presets::find_domain("arxiv"),
                                             0.005, 42);
  for (auto _ : state) benchmark::DoNotOptimize(surrogate::gen_grid(spec));
}
BENCHMARK(BM_gen_grid);

} // namespace

BENCHMARK_MAIN();
