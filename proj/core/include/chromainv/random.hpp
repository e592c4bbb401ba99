#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chromainv {

using Rng = std::mt19937_64;

/// Derives an independent generator for a named purpose ("sampling",
/// "split", "noise", "init", ...) and an optional index, so that every
/// consumer of randomness is reproducible from one master seed and does
/// not depend on the order in which other consumers draw.
Rng make_stream(std::uint64_t master_seed, std::string_view purpose, std::uint64_t index = 0);

/// 64-bit seed derived the same way as make_stream.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose, std::uint64_t index = 0);

} // namespace chromainv
