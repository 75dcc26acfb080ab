#include "rcgan/rng.hpp"

#include <cmath>
#include <sstream>

namespace rcgan {

double Rng::normal(double mean, double stddev) {
  // Box-Muller; always consumes exactly two uniforms.
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
}

int Rng::below(int n) {
  if (n <= 0) return 0;
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return static_cast<int>(v % un);
}

std::string Rng::serialize() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::deserialize(const std::string& s) {
  std::istringstream is(s);
  std::mt19937_64 parsed;
  is >> parsed;
  if (is.fail()) throw std::invalid_argument("rng: malformed engine state");
  engine_ = parsed;
}

std::uint64_t Rng::mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull + b * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace rcgan
