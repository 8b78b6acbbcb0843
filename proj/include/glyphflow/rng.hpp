#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace glyphflow {

// Derives independent, reproducible streams from one root seed. The same
// (seed, name) pair always yields the same engine state.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t root() const noexcept { return seed_; }
  std::uint64_t derive(std::string_view name) const noexcept;
  std::uint64_t derive(std::string_view name, std::uint64_t index) const noexcept;
  SeedTree child(std::string_view name) const noexcept { return SeedTree(derive(name)); }

  std::mt19937_64 stream(std::string_view name) const {
    return std::mt19937_64(derive(name));
  }
  std::mt19937_64 stream(std::string_view name, std::uint64_t index) const {
    return std::mt19937_64(derive(name, index));
  }

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace glyphflow
