#pragma once

#include <cstdint>
#include <random>

namespace tewa {

// Single deterministic stream. std::mt19937_64 output is fixed by the C++
// standard, and the conversion to [0,1) below avoids library-specific
// distributions, so a seed reproduces the same draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

  // 53 random bits scaled into [0, 1).
  double uniform() {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t draws() const { return draws_; }

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.engine_ == b.engine_ && a.draws_ == b.draws_;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace tewa
