#include "chromainv/random.hpp"

namespace chromainv {
namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose, std::uint64_t index)
{
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ fnv1a(purpose));
  return splitmix64(h ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

Rng make_stream(std::uint64_t master_seed, std::string_view purpose, std::uint64_t index)
{
  return Rng{derive_seed(master_seed, purpose, index)};
}

} // namespace chromainv
