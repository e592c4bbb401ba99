#include "chromainv/normalization.hpp"

#include "chromainv/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <cstdio>

namespace chromainv {

std::string NormStats::fingerprint() const
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const std::vector<double>& v) {
    for (double x : v) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &x, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
  };
  mix(mean);
  mix(stddev);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

NormStats fit_norm(std::span<const Sample> training)
{
  if (training.empty())
    throw ValidationError("cannot fit normalization on an empty training set");
  const std::size_t m = training.front().feature_count();
  NormStats stats;
  stats.mean.assign(m, 0.0);
  stats.stddev.assign(m, 0.0);
  for (const auto& s : training) {
    if (s.feature_count() != m)
      throw ValidationError("training samples have differing feature counts");
    for (std::size_t i = 0; i < s.response.size(); ++i)
      stats.mean[i] += s.response[i];
    stats.mean[m - 2] += s.injection[0];
    stats.mean[m - 1] += s.injection[1];
  }
  const double n = static_cast<double>(training.size());
  for (auto& v : stats.mean)
    v /= n;
  for (const auto& s : training) {
    for (std::size_t i = 0; i < s.response.size(); ++i) {
      const double d = s.response[i] - stats.mean[i];
      stats.stddev[i] += d * d;
    }
    const double d1 = s.injection[0] - stats.mean[m - 2];
    const double d2 = s.injection[1] - stats.mean[m - 1];
    stats.stddev[m - 2] += d1 * d1;
    stats.stddev[m - 1] += d2 * d2;
  }
  for (auto& v : stats.stddev)
    v = std::sqrt(v / n);
  return stats;
}

std::vector<double> normalize(std::span<const double> features, const NormStats& stats)
{
  if (features.size() != stats.size())
    throw ValidationError("feature count " + std::to_string(features.size()) +
                          " does not match normalization statistics of size " + std::to_string(stats.size()));
  std::vector<double> out(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double centred = features[i] - stats.mean[i];
    out[i] = stats.stddev[i] > 0.0 ? centred / stats.stddev[i] : centred;
  }
  return out;
}

Sample normalize(const Sample& sample, const NormStats& stats)
{
  const std::vector<double> z = normalize(sample.features(), stats);
  Sample out = sample;
  const std::size_t nt = sample.response.size();
  std::copy(z.begin(), z.begin() + static_cast<long>(nt), out.response.begin());
  out.injection = {z[nt], z[nt + 1]};
  return out;
}

} // namespace chromainv
