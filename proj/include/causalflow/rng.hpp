#pragma once

#include <cstdint>
#include <random>

namespace causalflow {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// All randomized sweeps derive their generators from a single 64-bit root
// seed through counted splitting, so independently numbered streams stay
// reproducible under any execution order.
class SeedStreams {
 public:
  explicit SeedStreams(std::uint64_t root) : root_(root) {}

  std::mt19937_64 stream(std::uint64_t index) const {
    std::uint64_t s = root_;
    std::uint64_t a = splitmix64(s);
    s = root_ ^ (index * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
    std::uint64_t b = splitmix64(s);
    return std::mt19937_64(a ^ (b + 0x2545F4914F6CDD1Dull + (index << 1)));
  }

  std::uint64_t root() const { return root_; }

 private:
  std::uint64_t root_;
};

}  // namespace causalflow
