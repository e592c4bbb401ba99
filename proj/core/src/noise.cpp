#include "chromainv/noise.hpp"

#include "chromainv/error.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace chromainv {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string> split_colon(std::string_view text)
{
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_number(const std::string& s)
{
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError("noise spec: '" + s + "' is not a number");
  }
  if (pos != s.size())
    throw ValidationError("noise spec: '" + s + "' is not a number");
  return v;
}

template <class Dist>
Sample multiplicative(const Sample& sample, Dist dist, Rng& rng, double divisor = 1.0)
{
  Sample out = sample;
  for (auto& x : out.response)
    x *= 1.0 + static_cast<double>(dist(rng)) / divisor;
  return out;
}

} // namespace

void validate(const NoiseSpec& spec)
{
  std::visit(overloaded{
                 [](const NormalNoise& n) {
                   if (!std::isfinite(n.mean) || !std::isfinite(n.stddev) || n.stddev < 0.0)
                     throw ValidationError("normal noise needs finite mean and stddev >= 0");
                 },
                 [](const UniformNoise& n) {
                   if (!std::isfinite(n.lo) || !std::isfinite(n.hi) || n.lo > n.hi)
                     throw ValidationError("uniform noise needs lo <= hi");
                 },
                 [](const PoissonNoise& n) {
                   if (!(n.lambda > 0.0) || !(n.divisor > 0.0) || !std::isfinite(n.lambda) || !std::isfinite(n.divisor))
                     throw ValidationError("poisson noise needs lambda > 0 and divisor > 0");
                 },
                 [](const TimeShiftNoise& n) {
                   if (n.max_shift < 0)
                     throw ValidationError("time shift needs max_shift >= 0");
                 },
             },
             spec);
}

NoiseSpec parse_noise_spec(std::string_view text)
{
  const auto parts = split_colon(text);
  const std::string& kind = parts[0];
  auto expect = [&](std::size_t n) {
    if (parts.size() != n)
      throw ValidationError("noise spec '" + std::string(text) + "' has the wrong number of fields");
  };
  NoiseSpec spec;
  if (kind == "normal") {
    expect(3);
    spec = NormalNoise{parse_number(parts[1]), parse_number(parts[2])};
  } else if (kind == "uniform") {
    expect(3);
    spec = UniformNoise{parse_number(parts[1]), parse_number(parts[2])};
  } else if (kind == "poisson") {
    expect(3);
    spec = PoissonNoise{parse_number(parts[1]), parse_number(parts[2])};
  } else if (kind == "shift") {
    expect(2);
    const double m = parse_number(parts[1]);
    if (m != std::floor(m))
      throw ValidationError("shift must be an integer");
    spec = TimeShiftNoise{static_cast<int>(m)};
  } else {
    throw ValidationError("unknown noise kind '" + kind + "' (normal, uniform, poisson, shift)");
  }
  validate(spec);
  return spec;
}

std::string to_string(const NoiseSpec& spec)
{
  std::ostringstream os;
  os.precision(9);
  std::visit(overloaded{
                 [&](const NormalNoise& n) { os << "normal:" << n.mean << ':' << n.stddev; },
                 [&](const UniformNoise& n) { os << "uniform:" << n.lo << ':' << n.hi; },
                 [&](const PoissonNoise& n) { os << "poisson:" << n.lambda << ':' << n.divisor; },
                 [&](const TimeShiftNoise& n) { os << "shift:" << n.max_shift; },
             },
             spec);
  return os.str();
}

Sample corrupt(const Sample& sample, const NoiseSpec& spec, Rng& rng)
{
  validate(spec);
  return std::visit(overloaded{
                        [&](const NormalNoise& n) {
                          if (n.stddev == 0.0) {
                            Sample out = sample;
                            for (auto& x : out.response)
                              x *= 1.0 + n.mean;
                            return out;
                          }
                          return multiplicative(sample, std::normal_distribution<double>(n.mean, n.stddev), rng);
                        },
                        [&](const UniformNoise& n) {
                          return multiplicative(sample, std::uniform_real_distribution<double>(n.lo, n.hi), rng);
                        },
                        [&](const PoissonNoise& n) {
                          return multiplicative(sample, std::poisson_distribution<long>(n.lambda), rng, n.divisor);
                        },
                        [&](const TimeShiftNoise& n) {
                          Sample out = sample;
                          if (n.max_shift == 0)
                            return out;
                          std::uniform_int_distribution<int> dist(-n.max_shift, n.max_shift);
                          out.response = shift_series(sample.response, dist(rng));
                          return out;
                        },
                    },
                    spec);
}

} // namespace chromainv
