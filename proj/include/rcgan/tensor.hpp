#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "rcgan/errors.hpp"

namespace rcgan {

// Dense row-major tensor of doubles. Images are (channels, height, width),
// conv weights (out_c, in_c, kh, kw), scalars (1).
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> dims) : dims_(std::move(dims)) {
    std::size_t n = 1;
    for (int d : dims_) {
      if (d <= 0) throw ShapeError("Tensor: non-positive dimension");
      n *= static_cast<std::size_t>(d);
    }
    data_.assign(n, 0.0);
  }

  static Tensor zeros(std::vector<int> dims) { return Tensor(std::move(dims)); }

  static Tensor full(std::vector<int> dims, double v) {
    Tensor t(std::move(dims));
    for (double& x : t.data_) x = v;
    return t;
  }

  static Tensor scalar(double v) { return full({1}, v); }

  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }
  int rank() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  int dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // CHW accessors for rank-3 tensors.
  int channels() const { return dims_[0]; }
  int height() const { return dims_[1]; }
  int width() const { return dims_[2]; }

  double& at(int c, int y, int x) {
    return data_[(static_cast<std::size_t>(c) * dims_[1] + y) * dims_[2] + x];
  }
  double at(int c, int y, int x) const {
    return data_[(static_cast<std::size_t>(c) * dims_[1] + y) * dims_[2] + x];
  }

  bool same_dims(const Tensor& o) const { return dims_ == o.dims_; }

  void fill(double v) {
    for (double& x : data_) x = v;
  }

  double min() const {
    double m = data_.empty() ? 0.0 : data_[0];
    for (double x : data_) m = x < m ? x : m;
    return m;
  }
  double max() const {
    double m = data_.empty() ? 0.0 : data_[0];
    for (double x : data_) m = x > m ? x : m;
    return m;
  }
  double sum() const {
    double s = 0.0;
    for (double x : data_) s += x;
    return s;
  }
  double mean() const { return data_.empty() ? 0.0 : sum() / static_cast<double>(size()); }

  bool all_finite() const;

  std::string dims_str() const;

 private:
  std::vector<int> dims_;
  std::vector<double> data_;
};

inline void check_same_dims(const Tensor& a, const Tensor& b, const char* where) {
  if (!a.same_dims(b))
    throw ShapeError(std::string(where) + ": dims " + a.dims_str() + " vs " + b.dims_str());
}

// FNV-1a over the raw little-endian bytes of the payload.
std::uint64_t fnv1a(const void* bytes, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t tensor_checksum(const Tensor& t, std::uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace rcgan
