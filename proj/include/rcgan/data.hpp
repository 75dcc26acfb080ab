#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rcgan/image.hpp"
#include "rcgan/rng.hpp"

namespace rcgan {

enum class DatasetRole { Train, Test, Validation };

const char* role_name(DatasetRole r);
DatasetRole parse_role(const std::string& s);

struct PairRow {
  std::string sunny_file;  // paths relative to the dataset root
  std::string rain_file;
  RainIntensity intensity = RainIntensity::Light;
};

// Validated listing of a dataset root laid out as
//   root/{sunny,light,medium,heavy}/*.png  (+ pairs.csv and masks/ for
// synthetic/test data).
struct DatasetManifest {
  std::filesystem::path root;
  DatasetRole role = DatasetRole::Train;
  std::array<std::vector<std::string>, 4> files;  // per class, lexicographic
  std::vector<PairRow> pairs;                     // populated for test role
  std::vector<std::string> warnings;              // excluded undecodable files

  const std::vector<std::string>& class_files(RainIntensity level) const {
    return files[static_cast<std::size_t>(level)];
  }
  std::size_t count(RainIntensity level) const { return class_files(level).size(); }
};

// Lists and validates the root. Missing class directories and empty classes
// are validation errors; files that fail to decode are excluded with a
// warning. Test role additionally requires a complete pairs.csv.
DatasetManifest load_dataset(const std::filesystem::path& root, DatasetRole role);

// Center-crop to 1080x700 when the source is at least that large, bilinear
// resize to target_size^2, then map [0,255] to [-1,1]. Already-normalized
// inputs (model-space tag) skip the crop and range map, so the function is
// idempotent.
ImageTensor preprocess(const ImageTensor& raw, int target_size);

// Convenience: read a PNG and preprocess it.
ImageTensor load_image_model(const std::filesystem::path& path, int target_size);

// Rain streak/occlusion synthesis controls. The same seed draws the same
// geometry for every intensity; intensity only scales the mask.
struct StreakParams {
  int count = 64;
  double min_length_px = 6.0;
  double max_length_px = 14.0;
  double min_angle_deg = 60.0;
  double max_angle_deg = 110.0;
  double gain_light = 0.25;
  double gain_medium = 0.5;
  double gain_heavy = 0.8;
  double occlusion_density = 0.125;  // blobs per streak
  std::uint64_t rng_seed = 0;

  double gain(RainIntensity level) const;
  void validate() const;  // gains strictly increasing, count >= 0, ranges ordered
};

struct PairedSample {
  ImageTensor sunny;  // model space
  ImageTensor rain;   // model space
  Tensor mask;        // (1,h,w) in [0,1], quantized to the 8-bit grid
  RainIntensity intensity = RainIntensity::Light;
};

// Additive rain oracle: draws anti-aliased streaks plus occlusion blobs into
// a [0,1] mask, scales it by the intensity gain, and composes
// rain = clamp(background + 2*mask, -1, 1). The mask is quantized to the
// 8-bit grid so the additive identity survives PNG round trips exactly.
PairedSample synthesize_rain(const ImageTensor& background, const StreakParams& params,
                             RainIntensity intensity);

// Writes a fully paired synthetic dataset: n_per_class procedural
// backgrounds in sunny/, their rain composites in light/ medium/ heavy/,
// ground-truth masks in masks/, and pairs.csv. Returns the loaded manifest.
DatasetManifest make_synthetic_dataset(int n_per_class, int size, std::uint64_t seed,
                                       const std::filesystem::path& out_dir);

// Procedural background (gradient plus shape textures), pixel values on the
// 8-bit grid, returned in model space.
ImageTensor synthetic_background(int size, Rng& rng);

}  // namespace rcgan
