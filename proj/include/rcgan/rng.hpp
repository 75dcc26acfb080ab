#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace rcgan {

// Seeded generator with an explicitly serializable state. Gaussian draws use
// Box-Muller on two uniforms so there is no hidden cached spare: the engine
// state alone reproduces the stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean = 0.0, double stddev = 1.0);

  // Uniform integer in [0, n).
  int below(int n);

  std::string serialize() const;
  void deserialize(const std::string& s);

  // SplitMix64-style mixing for deriving independent stream seeds.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

 private:
  std::mt19937_64 engine_;
};

}  // namespace rcgan
