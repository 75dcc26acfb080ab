#include "rcgan/tensor.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace rcgan {

bool Tensor::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string Tensor::dims_str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) os << ",";
    os << dims_[i];
  }
  os << ")";
  return os.str();
}

std::uint64_t fnv1a(const void* bytes, std::size_t n, std::uint64_t seed) {
  const unsigned char* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t tensor_checksum(const Tensor& t, std::uint64_t seed) {
  // Shape participates so transposed layouts of the same bytes differ.
  std::uint64_t h = seed;
  const std::uint64_t rank = t.rank();
  h = fnv1a(&rank, sizeof(rank), h);
  for (int d : t.dims()) {
    const std::int64_t dim = d;
    h = fnv1a(&dim, sizeof(dim), h);
  }
  return fnv1a(t.data(), t.size() * sizeof(double), h);
}

}  // namespace rcgan
