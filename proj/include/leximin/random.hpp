#pragma once

// Named, splittable seeds: every consumer of randomness derives its own
// std::mt19937_64 from (parent seed, name), so adding a consumer never shifts
// the stream seen by another.

#include <cstdint>
#include <random>
#include <string_view>

namespace leximin {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view name) {
  // FNV-1a over the name, mixed into the parent.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(parent ^ splitmix64(h));
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(parent ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t parent, std::string_view name) {
  return std::mt19937_64(derive_seed(parent, name));
}

}  // namespace leximin
