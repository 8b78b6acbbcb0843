#include "glyphflow/rng.hpp"

namespace glyphflow {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

namespace {

// FNV-1a over the stream name.
std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

std::uint64_t SeedTree::derive(std::string_view name) const noexcept {
  return splitmix64(splitmix64(seed_) ^ hash_name(name));
}

std::uint64_t SeedTree::derive(std::string_view name, std::uint64_t index) const noexcept {
  return splitmix64(derive(name) ^ splitmix64(index + 1));
}

}  // namespace glyphflow
