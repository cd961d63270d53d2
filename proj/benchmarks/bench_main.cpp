#include <benchmark/benchmark.h>

#include <vector>

#include "fasbeam/baselines.hpp"
#include "fasbeam/channel.hpp"
#include "fasbeam/gnn.hpp"
#include "fasbeam/portsel.hpp"
#include "fasbeam/rng.hpp"
#include "fasbeam/sched.hpp"

using namespace fasbeam;

namespace {

std::vector<FeatureMatrix> features(std::size_t count, std::size_t ues, std::size_t cols) {
  Rng rng(3);
  std::vector<FeatureMatrix> out;
  for (std::size_t b = 0; b < count; ++b) {
    FeatureMatrix x(ues, cols);
    for (double& v : x.data()) v = rng.normal();
    out.push_back(std::move(x));
  }
  return out;
}

EffectiveChannels channels(const NetworkConfig& cfg) {
  const auto corr = build_correlation(cfg.ports_per_fa, cfg.fa_length_wavelengths);
  const auto t = sample_channels(cfg, corr, 11);
  return select_ports(t, random_selection(cfg.num_cells, cfg.fas_per_bs, cfg.ports_per_fa, 12));
}

void BM_GnnSequential(benchmark::State& state) {
  const GnnDims dims = GnnDims::desk(4);
  const GnnParams p = GnnParams::init(dims, 0, 1);
  const auto x = features(state.range(0), 4, dims.input_dim());
  for (auto _ : state)
    for (const auto& f : x) benchmark::DoNotOptimize(gnn_forward(p, f, 2.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GnnSequential)->Arg(1)->Arg(8)->Arg(64);

void BM_GnnBatched(benchmark::State& state) {
  const GnnDims dims = GnnDims::desk(4);
  const GnnParams p = GnnParams::init(dims, 0, 1);
  const auto x = features(state.range(0), 4, dims.input_dim());
  for (auto _ : state) benchmark::DoNotOptimize(gnn_forward_batched(p, x, 2.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GnnBatched)->Arg(1)->Arg(8)->Arg(64);

void BM_Mrt(benchmark::State& state) {
  const NetworkConfig cfg;
  const auto h = channels(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(mrt(h, cfg));
}
BENCHMARK(BM_Mrt);

void BM_Zf(benchmark::State& state) {
  const NetworkConfig cfg;
  const auto h = channels(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(zf(h, cfg));
}
BENCHMARK(BM_Zf);

void BM_Mmse(benchmark::State& state) {
  const NetworkConfig cfg;
  const auto h = channels(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(mmse(h, cfg));
}
BENCHMARK(BM_Mmse);

void BM_ExhaustiveMmse(benchmark::State& state) {
  const NetworkConfig cfg = make_network(1, 2, 2, 6);
  const auto corr = build_correlation(6, 0.5);
  const auto t = sample_channels(cfg, corr, 5);
  const Solver s = mmse_solver(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive(t, cfg, s));
}
BENCHMARK(BM_ExhaustiveMmse);

void BM_SchedSweep(benchmark::State& state) {
  const std::size_t tasks[] = {1, 2, 4, 8, 16};
  for (auto _ : state)
    benchmark::DoNotOptimize(sweep_tasks(GnnDims::paper(4), 4, AcceleratorConfig{}, tasks));
}
BENCHMARK(BM_SchedSweep);

}  // namespace

BENCHMARK_MAIN();
