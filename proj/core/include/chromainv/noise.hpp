#pragma once

#include "chromainv/dataset.hpp"

#include <string>
#include <string_view>
#include <variant>

namespace chromainv {

/// x_i -> x_i (1 + eps_i), eps ~ N(mean, stddev^2)
struct NormalNoise {
  double mean = 0.04;
  double stddev = 0.1;
};

/// x_i -> x_i (1 + eps_i), eps ~ U(lo, hi)
struct UniformNoise {
  double lo = -0.2;
  double hi = 0.1;
};

/// x_i -> x_i (1 + P_i / divisor), P ~ Poisson(lambda)
struct PoissonNoise {
  double lambda = 5.0;
  double divisor = 100.0;
};

/// Whole-series lag tau ~ U{-max_shift, ..., max_shift}, zero fill.
struct TimeShiftNoise {
  int max_shift = 1;
};

using NoiseSpec = std::variant<NormalNoise, UniformNoise, PoissonNoise, TimeShiftNoise>;

void validate(const NoiseSpec& spec);

/// Parses "normal:MEAN:STD", "uniform:LO:HI", "poisson:LAMBDA:DIVISOR" or
/// "shift:M".
NoiseSpec parse_noise_spec(std::string_view text);
std::string to_string(const NoiseSpec& spec);

/// Corrupts the response block only; injection entries are never touched.
Sample corrupt(const Sample& sample, const NoiseSpec& spec, Rng& rng);

} // namespace chromainv
