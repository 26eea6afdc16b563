#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "forge/config.hpp"
#include "forge/env.hpp"
#include "forge/nn.hpp"
#include "forge/twin.hpp"

namespace {

void BM_TwinStep(benchmark::State& state) {
  forge::RunConfig cfg;
  forge::twin::LineState line =
      forge::env::build_line(cfg, forge::env::Mode::kNormal, 1);
  std::vector<double> powers;
  for (const auto& z : line.zones) {
    powers.push_back(z.learnable ? 0.2e6 : z.power);
  }
  for (auto _ : state) {
    forge::twin::LineState copy = line;
    forge::twin::step(copy, powers);
    benchmark::DoNotOptimize(copy.bars.front().segment_temps[0]);
  }
}
BENCHMARK(BM_TwinStep);

void BM_EnvEpisodeStep(benchmark::State& state) {
  forge::RunConfig cfg;
  forge::env::ForgingEnv env(cfg);
  env.reset(forge::env::Mode::kNormal, 1);
  for (auto _ : state) {
    if (env.done()) env.reset(forge::env::Mode::kNormal, 1);
    auto r = env.step({0.0, 0.0, 0.0});
    benchmark::DoNotOptimize(r.reward);
  }
}
BENCHMARK(BM_EnvEpisodeStep);

void BM_MlpForward(benchmark::State& state) {
  forge::nn::Mlp net({43, 64, 64, 3});
  std::mt19937_64 rng(7);
  net.init_uniform(rng);
  std::vector<double> x(43, 0.5);
  for (auto _ : state) {
    const std::vector<double>& y = net.forward(x);
    benchmark::DoNotOptimize(y[0]);
  }
}
BENCHMARK(BM_MlpForward);

void BM_MlpBackward(benchmark::State& state) {
  forge::nn::Mlp net({43, 64, 64, 3});
  std::mt19937_64 rng(7);
  net.init_uniform(rng);
  std::vector<double> x(43, 0.5);
  std::vector<double> dy(3, 1.0);
  net.forward(x);
  for (auto _ : state) {
    net.zero_grad();
    std::vector<double> dx = net.backward(dy);
    benchmark::DoNotOptimize(dx[0]);
  }
}
BENCHMARK(BM_MlpBackward);

}  // namespace

BENCHMARK_MAIN();
