#include "doctest.h"
#include "rcgan/tensor.hpp"

#include <stdexcept>

using namespace rcgan;

TEST_CASE("tensor construction and shape accessors") {
  Tensor t({2, 3, 4});
  CHECK(t.rank() == 3);
  CHECK(t.size() == 24);
  CHECK(t.channels() == 2);
  CHECK(t.height() == 3);
  CHECK(t.width() == 4);
  CHECK(t.dim(1) == 3);
  CHECK_FALSE(t.empty());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == 0.0);
  CHECK(Tensor().empty());
}

TEST_CASE("full and fill") {
  Tensor t = Tensor::full({2, 2}, 3.5);
  CHECK(t.sum() == doctest::Approx(14.0));
  t.fill(-1.0);
  CHECK(t.min() == -1.0);
  CHECK(t.max() == -1.0);
  CHECK(t.mean() == doctest::Approx(-1.0));
}

TEST_CASE("channel-major indexing") {
  Tensor t({2, 2, 3});
  t.at(1, 0, 2) = 7.0;
  // Layout: channel stride = h*w, row stride = w.
  CHECK(t[1 * 6 + 0 * 3 + 2] == 7.0);
  const Tensor& ct = t;
  CHECK(ct.at(1, 0, 2) == 7.0);
}

TEST_CASE("same_dims and check_same_dims") {
  Tensor a({1, 4, 4}), b({1, 4, 4}), c({1, 4, 5});
  CHECK(a.same_dims(b));
  CHECK_FALSE(a.same_dims(c));
  CHECK_NOTHROW(check_same_dims(a, b, "test"));
  CHECK_THROWS_AS(check_same_dims(a, c, "test"), std::invalid_argument);
}

TEST_CASE("reductions and finiteness") {
  Tensor t({4});
  t[0] = 1.0; t[1] = -2.0; t[2] = 3.0; t[3] = 0.5;
  CHECK(t.sum() == doctest::Approx(2.5));
  CHECK(t.mean() == doctest::Approx(0.625));
  CHECK(t.min() == -2.0);
  CHECK(t.max() == 3.0);
  CHECK(t.all_finite());
  t[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("checksum is value- and shape-sensitive and stable") {
  Tensor a = Tensor::full({2, 3}, 1.0);
  Tensor b = Tensor::full({2, 3}, 1.0);
  CHECK(tensor_checksum(a) == tensor_checksum(b));
  b[5] = 1.0 + 1e-15;
  CHECK(tensor_checksum(a) != tensor_checksum(b));
  Tensor c = Tensor::full({3, 2}, 1.0);
  CHECK(tensor_checksum(a) != tensor_checksum(c));
}

TEST_CASE("dims_str formats the shape") {
  Tensor t({3, 8, 8});
  CHECK(t.dims_str() == "(3,8,8)");
}
