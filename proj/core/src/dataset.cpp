#include "chromainv/dataset.hpp"

#include "chromainv/error.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

namespace chromainv {

std::string to_string(Origin origin) { return origin == Origin::real ? "real" : "synthetic"; }

std::vector<double> Sample::features() const
{
  std::vector<double> x(response);
  x.push_back(injection[0]);
  x.push_back(injection[1]);
  return x;
}

IsothermParams sample_target(Rng& rng)
{
  std::uniform_real_distribution<double> dist(0.0, kTargetUpper);
  std::array<double, IsothermParams::size> v{};
  for (auto& x : v)
    x = dist(rng);
  return IsothermParams(v);
}

std::array<double, 2> sample_injection(Rng& rng)
{
  std::uniform_real_distribution<double> dist(0.0, kInjectionUpper);
  const double h1 = dist(rng);
  const double h2 = dist(rng);
  return {h1, h2};
}

IsothermParams canonical_site_order(const IsothermParams& params)
{
  const double site1 = params.b(0, 0) + params.b(0, 1);
  const double site2 = params.b(1, 0) + params.b(1, 1);
  if (site1 <= site2)
    return params;
  const auto& v = params.values();
  return IsothermParams(std::array<double, 8>{v[2], v[3], v[0], v[1], v[6], v[7], v[4], v[5]});
}

ColumnConfig dataset_column(const ColumnConfig& column)
{
  ColumnConfig c = column;
  if (!c.horizon)
    c.horizon = ColumnConfig::kMaxHorizonDeadTimes * c.dead_time();
  c.validate();
  return c;
}

Sample make_sample(const ColumnConfig& column, const DetectorSpec& detector, const IsothermParams& target,
                   std::array<double, 2> injection)
{
  const InjectionProfile profile{injection[0], injection[1], column.injection_duration};
  const OutletSeries outlet = simulate(column, target, profile);
  Sample s;
  s.response = total_response(outlet, detector).response;
  s.injection = injection;
  s.target = target;
  s.origin = Origin::synthetic;
  return s;
}

Dataset generate(std::size_t n, const ColumnConfig& column, const DetectorSpec& detector,
                 const GenerateOptions& options)
{
  if (n == 0)
    throw ValidationError("dataset size must be >= 1");
  detector.validate();

  Dataset ds;
  ds.meta.column = dataset_column(column);
  ds.meta.detector = detector;
  ds.meta.seed = options.seed;
  ds.meta.canonical_sites = options.canonical_sites;
  const int nt = ds.meta.column.n_time_points;
  ds.meta.time_grid.resize(nt);
  for (int i = 0; i < nt; ++i)
    ds.meta.time_grid[i] = *ds.meta.column.horizon * (i + 1) / nt;
  ds.samples.resize(n);

  auto build = [&](std::size_t k) {
    Rng rng = make_stream(options.seed, "sample", k);
    IsothermParams target = sample_target(rng);
    const auto injection = sample_injection(rng);
    if (options.canonical_sites)
      target = canonical_site_order(target);
    ds.samples[k] = make_sample(ds.meta.column, detector, target, injection);
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::size_t first_error_index = n;
  std::string first_error_message;
  bool first_error_numerical = false;

  auto worker = [&](unsigned tid) {
    for (std::size_t k = tid; k < n; k += threads) {
      try {
        build(k);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (k < first_error_index) {
          first_error_index = k;
          first_error_message = e.what();
          first_error_numerical = dynamic_cast<const NumericalError*>(&e) != nullptr;
          first_error = std::current_exception();
        }
        return;
      }
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(worker, t);
  }

  if (first_error) {
    const std::string msg = "sample " + std::to_string(first_error_index) + ": " + first_error_message;
    if (first_error_numerical)
      throw NumericalError(msg);
    throw ValidationError(msg);
  }
  return ds;
}

std::vector<double> shift_series(std::span<const double> series, int tau)
{
  const auto n = static_cast<long>(series.size());
  std::vector<double> out(series.size(), 0.0);
  for (long i = 0; i < n; ++i) {
    const long src = i - tau;
    if (src >= 0 && src < n)
      out[i] = series[src];
  }
  return out;
}

Dataset augment_shift(const Dataset& dataset, int max_shift, Rng& rng, std::vector<int>* drawn)
{
  if (max_shift < 0)
    throw ValidationError("max shift must be >= 0");
  Dataset out = dataset;
  if (max_shift == 0)
    return out;
  std::uniform_int_distribution<int> dist(-max_shift, max_shift);
  for (auto& s : out.samples) {
    if (s.origin != Origin::synthetic)
      continue;
    const int tau = dist(rng);
    if (drawn)
      drawn->push_back(tau);
    s.response = shift_series(s.response, tau);
  }
  return out;
}

} // namespace chromainv
