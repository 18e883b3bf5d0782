// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <vector>

#include "econet/dynamics.hpp"
#include "econet/experiments.hpp"
#include "econet/measures.hpp"
#include "econet/tail_stats.hpp"

using namespace econet;

namespace {

// A grown network with a realistic degree distribution.
const Network& grown_network() {
  static const Network net = [] {
    DynamicsParams p;
    p.agents = 2000;
    p.c_th = -0.70;
    Simulation sim(p, 42);
    for (int i = 0; i < 200'000; ++i) sim.step();
    return sim.network();
  }();
  return net;
}

std::vector<std::uint64_t> heavy_sample(std::size_t n) {
  Rng rng(3);
  std::vector<std::uint64_t> xs(n);
  for (auto& s : xs) s = sample_power_law(rng, 2.5, 1);
  return xs;
}

RunConfig small_run() {
  RunConfig c;
  c.total_steps = 20'000;
  c.transient = 2'000;
  c.measure = {2'000, 10};
  c.replicas = 2;
  c.audit_every = 0;
  return c;
}

void BM_overall_product(benchmark::State& state) {
  const auto& net = grown_network();
  for (auto _ : state) benchmark::DoNotOptimize(overall_product(net));
}

void BM_overall_product_serial(benchmark::State& state) {
  const auto& net = grown_network();
  for (auto _ : state) benchmark::DoNotOptimize(overall_product_serial(net));
}

void BM_select_cutoff(benchmark::State& state) {
  const auto xs = heavy_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(select_cutoff(xs));
}

void BM_select_cutoff_serial(benchmark::State& state) {
  const auto xs = heavy_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(select_cutoff_serial(xs));
}

const std::vector<std::uint32_t> kAgents{100, 200};
const std::vector<double> kThresholds{-0.72, -0.68};

void BM_sweep(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sweep(kAgents, kThresholds, small_run()));
}

void BM_sweep_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(kAgents, kThresholds, small_run()));
}

}  // namespace

BENCHMARK(BM_overall_product);
BENCHMARK(BM_overall_product_serial);
BENCHMARK(BM_select_cutoff)->Arg(10'000)->Arg(100'000);
BENCHMARK(BM_select_cutoff_serial)->Arg(10'000)->Arg(100'000);
BENCHMARK(BM_sweep)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
