#include "rcgan/image.hpp"

#include <cmath>

namespace rcgan {

const char* intensity_name(RainIntensity level) {
  switch (level) {
    case RainIntensity::Sunny:
      return "sunny";
    case RainIntensity::Light:
      return "light";
    case RainIntensity::Medium:
      return "medium";
    case RainIntensity::Heavy:
      return "heavy";
  }
  return "?";
}

RainIntensity parse_intensity(const std::string& name) {
  if (name == "sunny") return RainIntensity::Sunny;
  if (name == "light") return RainIntensity::Light;
  if (name == "medium") return RainIntensity::Medium;
  if (name == "heavy") return RainIntensity::Heavy;
  throw ConfigError("unknown rain intensity: " + name);
}

Tensor label_plane(RainIntensity level, int height, int width) {
  return Tensor::full({1, height, width}, label_value(level));
}

ImageTensor to_model_space(const ImageTensor& img) {
  if (img.space == ImageSpace::Model) return img;
  ImageTensor out{Tensor(img.data.dims()), ImageSpace::Model};
  for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = img.data[i] / 127.5 - 1.0;
  return out;
}

ImageTensor to_pixel_space(const ImageTensor& img) {
  if (img.space == ImageSpace::Pixel) return img;
  ImageTensor out{Tensor(img.data.dims()), ImageSpace::Pixel};
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    double v = (img.data[i] + 1.0) * 127.5;
    out.data[i] = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
  }
  return out;
}

void validate_image(const ImageTensor& img, const char* where) {
  if (img.data.rank() != 3) throw ShapeError(std::string(where) + ": image must be (c,h,w)");
  const double lo = img.space == ImageSpace::Model ? -1.0 : 0.0;
  const double hi = img.space == ImageSpace::Model ? 1.0 : 255.0;
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const double v = img.data[i];
    if (!std::isfinite(v) || v < lo || v > hi)
      throw ShapeError(std::string(where) + ": value out of range for tagged space");
  }
}

}  // namespace rcgan
