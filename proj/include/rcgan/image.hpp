#pragma once

#include <string>

#include "rcgan/tensor.hpp"

namespace rcgan {

// Four-level rain class; strict ordering Sunny < Light < Medium < Heavy.
enum class RainIntensity : int { Sunny = 0, Light = 1, Medium = 2, Heavy = 3 };

constexpr int kNumIntensities = 4;

const char* intensity_name(RainIntensity level);
RainIntensity parse_intensity(const std::string& name);

// Scalar label encoding: level/3 in {0, 1/3, 2/3, 1}.
inline double label_value(RainIntensity level) { return static_cast<int>(level) / 3.0; }

// Constant-valued 1-channel conditioning plane.
Tensor label_plane(RainIntensity level, int height, int width);

enum class ImageSpace { Model, Pixel };

// Channel-major image with its value-range tag. Model space is [-1,1],
// pixel space [0,255].
struct ImageTensor {
  Tensor data;  // (c,h,w)
  ImageSpace space = ImageSpace::Model;

  int channels() const { return data.channels(); }
  int height() const { return data.height(); }
  int width() const { return data.width(); }
};

ImageTensor to_model_space(const ImageTensor& img);
ImageTensor to_pixel_space(const ImageTensor& img);

// Throws if values are non-finite or out of range for the tagged space.
void validate_image(const ImageTensor& img, const char* where);

}  // namespace rcgan
