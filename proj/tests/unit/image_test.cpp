#include "doctest.h"
#include "rcgan/errors.hpp"
#include "rcgan/image.hpp"

#include <stdexcept>

using namespace rcgan;

TEST_CASE("intensity names round trip") {
  for (int i = 0; i < kNumIntensities; ++i) {
    const auto level = static_cast<RainIntensity>(i);
    CHECK(parse_intensity(intensity_name(level)) == level);
  }
  CHECK_THROWS_AS(parse_intensity("drizzle"), ConfigError);
}

TEST_CASE("label encoding is level/3") {
  CHECK(label_value(RainIntensity::Sunny) == 0.0);
  CHECK(label_value(RainIntensity::Light) == doctest::Approx(1.0 / 3.0));
  CHECK(label_value(RainIntensity::Medium) == doctest::Approx(2.0 / 3.0));
  CHECK(label_value(RainIntensity::Heavy) == 1.0);
}

TEST_CASE("label plane is a constant map of the encoded value") {
  Tensor p = label_plane(RainIntensity::Medium, 3, 5);
  CHECK(p.dims() == std::vector<int>{1, 3, 5});
  CHECK(p.min() == doctest::Approx(2.0 / 3.0));
  CHECK(p.max() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("space conversions round trip and are idempotent per tag") {
  ImageTensor px{Tensor::full({3, 2, 2}, 127.5), ImageSpace::Pixel};
  ImageTensor model = to_model_space(px);
  CHECK(model.space == ImageSpace::Model);
  CHECK(model.data[0] == doctest::Approx(0.0));
  ImageTensor back = to_pixel_space(model);
  CHECK(back.data[0] == doctest::Approx(127.5));
  // Converting to the space an image is already in changes nothing.
  ImageTensor same = to_model_space(model);
  CHECK(same.data[0] == model.data[0]);
}

TEST_CASE("extremes map to the range ends") {
  ImageTensor px{Tensor({3, 1, 2}), ImageSpace::Pixel};
  px.data[0] = 0.0;
  px.data[1] = 255.0;
  ImageTensor m = to_model_space(px);
  CHECK(m.data[0] == doctest::Approx(-1.0));
  CHECK(m.data[1] == doctest::Approx(1.0));
}

TEST_CASE("validate_image rejects out-of-range and non-finite values") {
  ImageTensor ok{Tensor::full({1, 2, 2}, 0.5), ImageSpace::Model};
  CHECK_NOTHROW(validate_image(ok, "t"));

  ImageTensor bad{Tensor::full({1, 2, 2}, 2.0), ImageSpace::Model};
  CHECK_THROWS_AS(validate_image(bad, "t"), std::invalid_argument);

  ImageTensor badpx{Tensor::full({1, 2, 2}, 300.0), ImageSpace::Pixel};
  CHECK_THROWS_AS(validate_image(badpx, "t"), std::invalid_argument);

  ImageTensor nan{Tensor::full({1, 2, 2}, 0.0), ImageSpace::Model};
  nan.data[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate_image(nan, "t"), std::invalid_argument);
}
