#include "chromainv/split.hpp"

#include "chromainv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chromainv {

void SplitSpec::validate() const
{
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ValidationError("test_fraction must lie in (0, 1)");
  if (!(train_fraction_of_rest > 0.0 && train_fraction_of_rest < 1.0))
    throw ValidationError("train_fraction_of_rest must lie in (0, 1)");
  if (!(real_ratio > 0.0) || !std::isfinite(real_ratio))
    throw ValidationError("real_ratio must be > 0");
}

std::size_t real_slot_count(std::size_t n_synthetic, std::size_t n_distinct_real, double real_ratio)
{
  if (n_distinct_real == 0)
    return 0;
  const auto slots = static_cast<std::size_t>(std::llround(static_cast<double>(n_synthetic) / real_ratio));
  return std::max(slots, n_distinct_real);
}

namespace {

std::vector<std::size_t> round_robin(std::span<const std::size_t> distinct, std::size_t slots)
{
  std::vector<std::size_t> out;
  out.reserve(slots);
  for (std::size_t i = 0; i < slots; ++i)
    out.push_back(distinct[i % distinct.size()]);
  return out;
}

} // namespace

SplitPlan split(std::size_t n_synthetic, std::size_t n_real, const SplitSpec& spec, Rng& rng)
{
  spec.validate();
  if (n_real > 0 && n_real < kMinRealSamples)
    throw ValidationError("real-data mode needs at least 5 real samples, got " + std::to_string(n_real));

  std::vector<std::size_t> order(n_synthetic);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(n_synthetic)));
  const std::size_t rest = n_synthetic - n_test;
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction_of_rest * static_cast<double>(rest)));

  SplitPlan plan;
  plan.test.assign(order.begin(), order.begin() + static_cast<long>(n_test));
  plan.train.assign(order.begin() + static_cast<long>(n_test), order.begin() + static_cast<long>(n_test + n_train));
  plan.validation.assign(order.begin() + static_cast<long>(n_test + n_train), order.end());

  if (n_real > 0) {
    std::vector<std::size_t> reals(n_real);
    std::iota(reals.begin(), reals.end(), std::size_t{0});
    std::shuffle(reals.begin(), reals.end(), rng);
    const std::span<const std::size_t> all(reals);
    const auto to_train = all.first(n_real - kRealValidationCount);
    const auto to_val = all.last(kRealValidationCount);
    plan.real_train = round_robin(to_train, real_slot_count(plan.train.size(), to_train.size(), spec.real_ratio));
    plan.real_validation =
        round_robin(to_val, real_slot_count(plan.validation.size(), to_val.size(), spec.real_ratio));
  }
  return plan;
}

SplitSets materialize(const SplitPlan& plan, std::span<const Sample> synthetic, std::span<const Sample> real)
{
  auto pick = [](std::span<const Sample> from, const std::vector<std::size_t>& idx, std::vector<Sample>& to) {
    for (std::size_t i : idx) {
      if (i >= from.size())
        throw ValidationError("split index out of range");
      to.push_back(from[i]);
    }
  };
  SplitSets sets;
  pick(synthetic, plan.train, sets.train);
  pick(real, plan.real_train, sets.train);
  pick(synthetic, plan.validation, sets.validation);
  pick(real, plan.real_validation, sets.validation);
  pick(synthetic, plan.test, sets.test);
  return sets;
}

} // namespace chromainv
