#pragma once

#include <filesystem>

#include "rcgan/image.hpp"

namespace rcgan {

// Reads an 8-bit PNG into a pixel-space tensor: (3,h,w) for color inputs,
// (1,h,w) for grayscale. Palette/16-bit/alpha images are normalized to
// 8-bit RGB or gray on the way in.
ImageTensor read_png(const std::filesystem::path& path);

// Writes a pixel-space 1- or 3-channel image as an 8-bit PNG. Values are
// rounded to the nearest integer and clamped to [0,255]; output bytes are
// deterministic for identical inputs.
void write_png(const std::filesystem::path& path, const ImageTensor& img);

}  // namespace rcgan
