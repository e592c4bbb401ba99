#include "chromainv/column.hpp"
#include "chromainv/fnn.hpp"
#include "chromainv/interpolation.hpp"
#include "chromainv/isotherm.hpp"
#include "chromainv/random.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

namespace {

using namespace chromainv;

const IsothermParams kParams{std::array<double, 8>{50, 15, 10, 5, 40, 12, 8, 4}};

void BM_IsothermEval(benchmark::State& state)
{
  Concentration2 c{1.0, 2.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(isotherm_eval(kParams, c));
    c.c1 += 1e-12;
  }
}
BENCHMARK(BM_IsothermEval);

// Full column solve at the default 800-point output grid; the argument is
// the number of finite-volume cells.
void BM_Simulate(benchmark::State& state)
{
  ColumnConfig config;
  config.n_cells = static_cast<int>(state.range(0));
  const InjectionProfile pulse{5.0, 15.0, 10.0};
  long steps = 0;
  for (auto _ : state) {
    const OutletSeries out = simulate(config, kParams, pulse);
    steps = out.steps;
    benchmark::DoNotOptimize(out.c1.data());
  }
  state.counters["steps"] = static_cast<double>(steps);
}
BENCHMARK(BM_Simulate)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

Batch random_batch(int inputs, int outputs, int samples, Rng& rng)
{
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 60.0);
  Batch batch{Eigen::MatrixXd(inputs, samples), Eigen::MatrixXd(outputs, samples)};
  for (Eigen::Index i = 0; i < batch.inputs.size(); ++i)
    batch.inputs.data()[i] = n(rng);
  for (Eigen::Index i = 0; i < batch.targets.size(); ++i)
    batch.targets.data()[i] = u(rng);
  return batch;
}

// Argument: batch size. Network: 802 inputs (800 response points plus
// both injection amounts), hidden (64, 48), 8 outputs.
void BM_FnnForward(benchmark::State& state)
{
  Rng rng = make_stream(1, "bench-fnn");
  const FnnModel model = FnnModel::initialized({802, 64, 48, 8}, Activation::sigmoid, rng);
  const Batch batch = random_batch(802, 8, static_cast<int>(state.range(0)), rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(model.forward(batch.inputs).data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FnnForward)->Arg(1)->Arg(32)->Arg(256);

void BM_FnnGradients(benchmark::State& state)
{
  Rng rng = make_stream(1, "bench-fnn");
  const FnnModel model = FnnModel::initialized({802, 64, 48, 8}, Activation::sigmoid, rng);
  const Batch batch = random_batch(802, 8, static_cast<int>(state.range(0)), rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(gradients(model, batch, LossNorm::l2, 1e-3, 1e-3).loss.total);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FnnGradients)->Arg(1)->Arg(32)->Arg(256);

// Argument: number of source points, regridded onto a grid twice as dense.
void BM_Regrid(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  Chromatogram peak;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 3.0 * static_cast<double>(i + 1);
    peak.time.push_back(t);
    peak.response.push_back(10.0 * std::exp(-std::pow((t - 0.4 * 3.0 * n) / (0.05 * 3.0 * n), 2)));
  }
  std::vector<double> target;
  for (std::size_t i = 0; i < 2 * n; ++i)
    target.push_back(peak.time.front() + (peak.time.back() - peak.time.front()) * i / (2.0 * n - 1.0));
  for (auto _ : state)
    benchmark::DoNotOptimize(regrid(peak, target).response.data());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(target.size()));
}
BENCHMARK(BM_Regrid)->Arg(100)->Arg(800)->Arg(4000);

} // namespace

BENCHMARK_MAIN();
