#include "rcgan/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rcgan/errors.hpp"
#include "rcgan/png_io.hpp"

namespace rcgan {

namespace {

constexpr const char* kClassNames[4] = {"sunny", "light", "medium", "heavy"};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Tensor resize_bilinear(const Tensor& src, int out_h, int out_w) {
  const int c = src.channels(), h = src.height(), w = src.width();
  if (h == out_h && w == out_w) return src;
  Tensor dst({c, out_h, out_w});
  const double sy = static_cast<double>(h) / out_h;
  const double sx = static_cast<double>(w) / out_w;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    fy = fy < 0.0 ? 0.0 : (fy > h - 1 ? h - 1 : fy);
    const int y0 = static_cast<int>(fy);
    const int y1 = y0 + 1 < h ? y0 + 1 : h - 1;
    const double wy = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      fx = fx < 0.0 ? 0.0 : (fx > w - 1 ? w - 1 : fx);
      const int x0 = static_cast<int>(fx);
      const int x1 = x0 + 1 < w ? x0 + 1 : w - 1;
      const double wx = fx - x0;
      for (int ch = 0; ch < c; ++ch) {
        const double top = (1.0 - wx) * src.at(ch, y0, x0) + wx * src.at(ch, y0, x1);
        const double bot = (1.0 - wx) * src.at(ch, y1, x0) + wx * src.at(ch, y1, x1);
        dst.at(ch, y, x) = (1.0 - wy) * top + wy * bot;
      }
    }
  }
  return dst;
}

Tensor center_crop(const Tensor& src, int crop_h, int crop_w) {
  const int c = src.channels(), h = src.height(), w = src.width();
  if (h < crop_h || w < crop_w) return src;
  const int y0 = (h - crop_h) / 2;
  const int x0 = (w - crop_w) / 2;
  Tensor dst({c, crop_h, crop_w});
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < crop_h; ++y)
      for (int x = 0; x < crop_w; ++x) dst.at(ch, y, x) = src.at(ch, y0 + y, x0 + x);
  return dst;
}

Tensor gray_to_rgb(const Tensor& src) {
  Tensor dst({3, src.height(), src.width()});
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < src.height(); ++y)
      for (int x = 0; x < src.width(); ++x) dst.at(c, y, x) = src.at(0, y, x);
  return dst;
}

void check_size_arg(int target_size, const char* where) {
  if (target_size <= 0 || target_size % 4 != 0)
    throw ConfigError(std::string(where) + ": target size must be positive and divisible by 4, got " +
                      std::to_string(target_size));
}

double point_segment_distance(double px, double py, double x0, double y0, double x1, double y1) {
  const double vx = x1 - x0, vy = y1 - y0;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((px - x0) * vx + (py - y0) * vy) / len2 : 0.0;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  const double dx = px - (x0 + t * vx), dy = py - (y0 + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

// Max-composites an anti-aliased segment with ~1px soft edge.
void draw_streak(Tensor& mask, double cx, double cy, double length, double angle_deg, double amp) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double dx = std::cos(a), dy = std::sin(a);
  const double x0 = cx - 0.5 * length * dx, y0 = cy - 0.5 * length * dy;
  const double x1 = cx + 0.5 * length * dx, y1 = cy + 0.5 * length * dy;
  const int h = mask.height(), w = mask.width();
  const int by0 = std::max(0, static_cast<int>(std::floor(std::min(y0, y1))) - 2);
  const int by1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(y0, y1))) + 2);
  const int bx0 = std::max(0, static_cast<int>(std::floor(std::min(x0, x1))) - 2);
  const int bx1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(x0, x1))) + 2);
  for (int y = by0; y <= by1; ++y)
    for (int x = bx0; x <= bx1; ++x) {
      const double d = point_segment_distance(x, y, x0, y0, x1, y1);
      const double cov = std::clamp(1.25 - d, 0.0, 1.0);
      if (cov <= 0.0) continue;
      double& m = mask.at(0, y, x);
      m = std::max(m, amp * cov);
    }
}

// Max-composites a soft disc (raindrop occlusion).
void draw_blob(Tensor& mask, double cx, double cy, double radius, double amp) {
  const int h = mask.height(), w = mask.width();
  const int by0 = std::max(0, static_cast<int>(std::floor(cy - radius)) - 1);
  const int by1 = std::min(h - 1, static_cast<int>(std::ceil(cy + radius)) + 1);
  const int bx0 = std::max(0, static_cast<int>(std::floor(cx - radius)) - 1);
  const int bx1 = std::min(w - 1, static_cast<int>(std::ceil(cx + radius)) + 1);
  const double r2 = radius * radius;
  for (int y = by0; y <= by1; ++y)
    for (int x = bx0; x <= bx1; ++x) {
      const double dx = x - cx, dy = y - cy;
      const double fall = 1.0 - (dx * dx + dy * dy) / r2;
      if (fall <= 0.0) continue;
      double& m = mask.at(0, y, x);
      m = std::max(m, amp * fall);
    }
}

}  // namespace

const char* role_name(DatasetRole r) {
  switch (r) {
    case DatasetRole::Train: return "train";
    case DatasetRole::Test: return "test";
    case DatasetRole::Validation: return "validation";
  }
  return "train";
}

DatasetRole parse_role(const std::string& s) {
  if (s == "train") return DatasetRole::Train;
  if (s == "test") return DatasetRole::Test;
  if (s == "validation") return DatasetRole::Validation;
  throw ConfigError("unknown dataset role '" + s + "' (expected train|test|validation)");
}

DatasetManifest load_dataset(const std::filesystem::path& root, DatasetRole role) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw ConfigError("dataset root is not a directory: " + root.string());

  DatasetManifest m;
  m.root = root;
  m.role = role;

  for (int cls = 0; cls < 4; ++cls) {
    const fs::path dir = root / kClassNames[cls];
    if (!fs::is_directory(dir))
      throw ConfigError("missing class directory '" + std::string(kClassNames[cls]) + "' under " +
                        root.string());
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".png")
        names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    for (const std::string& name : names) {
      try {
        read_png(dir / name);
        m.files[static_cast<std::size_t>(cls)].push_back(name);
      } catch (const std::exception& e) {
        m.warnings.push_back(std::string(kClassNames[cls]) + "/" + name + ": " + e.what());
      }
    }
    if (m.files[static_cast<std::size_t>(cls)].empty())
      throw ConfigError("class '" + std::string(kClassNames[cls]) + "' has no usable images under " +
                        root.string());
  }

  if (role == DatasetRole::Test) {
    const fs::path pairs_path = root / "pairs.csv";
    std::ifstream in(pairs_path);
    if (!in) throw ConfigError("test role requires pairs.csv under " + root.string());
    std::string line;
    if (!std::getline(in, line) || trim(line) != "sunny_file,rain_file,intensity")
      throw ConfigError("pairs.csv: expected header 'sunny_file,rain_file,intensity'");
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty()) continue;
      std::stringstream ss(t);
      std::string sunny, rain, level;
      if (!std::getline(ss, sunny, ',') || !std::getline(ss, rain, ',') ||
          !std::getline(ss, level, ','))
        throw ConfigError("pairs.csv line " + std::to_string(lineno) + ": expected 3 columns");
      PairRow row;
      row.sunny_file = trim(sunny);
      row.rain_file = trim(rain);
      row.intensity = parse_intensity(trim(level));
      if (!fs::is_regular_file(root / row.sunny_file))
        throw ConfigError("pairs.csv line " + std::to_string(lineno) + ": missing file " +
                          row.sunny_file);
      if (!fs::is_regular_file(root / row.rain_file))
        throw ConfigError("pairs.csv line " + std::to_string(lineno) + ": missing file " +
                          row.rain_file);
      m.pairs.push_back(std::move(row));
    }
    if (m.pairs.empty()) throw ConfigError("pairs.csv contains no pairs");
  }
  return m;
}

ImageTensor preprocess(const ImageTensor& raw, int target_size) {
  check_size_arg(target_size, "preprocess");
  validate_image(raw, "preprocess");

  Tensor t = raw.data;
  if (t.channels() == 1) t = gray_to_rgb(t);
  if (t.channels() != 3)
    throw IoError("preprocess: cannot convert " + std::to_string(t.channels()) +
                  "-channel image to RGB");

  if (raw.space == ImageSpace::Model) {
    // Already normalized: only the geometry may still differ.
    ImageTensor out;
    out.space = ImageSpace::Model;
    out.data = resize_bilinear(t, target_size, target_size);
    return out;
  }

  if (t.height() >= 700 && t.width() >= 1080) t = center_crop(t, 700, 1080);
  t = resize_bilinear(t, target_size, target_size);

  ImageTensor pixel;
  pixel.space = ImageSpace::Pixel;
  pixel.data = std::move(t);
  return to_model_space(pixel);
}

ImageTensor load_image_model(const std::filesystem::path& path, int target_size) {
  return preprocess(read_png(path), target_size);
}

double StreakParams::gain(RainIntensity level) const {
  switch (level) {
    case RainIntensity::Light: return gain_light;
    case RainIntensity::Medium: return gain_medium;
    case RainIntensity::Heavy: return gain_heavy;
    case RainIntensity::Sunny: break;
  }
  throw std::invalid_argument("StreakParams::gain: no gain for sunny");
}

void StreakParams::validate() const {
  if (count < 0) throw ConfigError("streak params: count must be >= 0");
  if (!(gain_light < gain_medium && gain_medium < gain_heavy))
    throw ConfigError("streak params: gains must be strictly increasing light < medium < heavy");
  if (gain_light <= 0.0 || gain_heavy > 1.0)
    throw ConfigError("streak params: gains must lie in (0, 1]");
  if (min_length_px <= 0.0 || max_length_px < min_length_px)
    throw ConfigError("streak params: invalid length range");
  if (max_angle_deg < min_angle_deg) throw ConfigError("streak params: invalid angle range");
  if (occlusion_density < 0.0) throw ConfigError("streak params: occlusion density must be >= 0");
}

PairedSample synthesize_rain(const ImageTensor& background, const StreakParams& params,
                             RainIntensity intensity) {
  if (intensity == RainIntensity::Sunny)
    throw std::invalid_argument("synthesize_rain: intensity must not be sunny");
  if (background.space != ImageSpace::Model)
    throw std::invalid_argument("synthesize_rain: background must be model space");
  params.validate();
  validate_image(background, "synthesize_rain");

  const int h = background.height(), w = background.width();
  Tensor base = Tensor::zeros({1, h, w});
  Rng rng(params.rng_seed);

  // Geometry is drawn once from the seed; intensity only scales it, so a
  // fixed seed yields strictly ordered mask means across intensities.
  for (int i = 0; i < params.count; ++i) {
    const double cx = rng.uniform(0.0, static_cast<double>(w));
    const double cy = rng.uniform(0.0, static_cast<double>(h));
    const double length = rng.uniform(params.min_length_px, params.max_length_px);
    const double angle = rng.uniform(params.min_angle_deg, params.max_angle_deg);
    const double amp = rng.uniform(0.6, 1.0);
    draw_streak(base, cx, cy, length, angle, amp);
  }
  const int blobs = static_cast<int>(std::floor(params.count * params.occlusion_density));
  for (int i = 0; i < blobs; ++i) {
    const double cx = rng.uniform(0.0, static_cast<double>(w));
    const double cy = rng.uniform(0.0, static_cast<double>(h));
    const double radius = rng.uniform(1.5, 1.5 + w / 16.0);
    const double amp = rng.uniform(0.3, 0.7);
    draw_blob(base, cx, cy, radius, amp);
  }

  const double g = params.gain(intensity);
  Tensor mask({1, h, w});
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double v = std::clamp(base[i] * g, 0.0, 1.0);
    mask[i] = std::round(v * 255.0) / 255.0;  // 8-bit grid, see header
  }

  PairedSample sample;
  sample.sunny = background;
  sample.intensity = intensity;
  sample.mask = mask;
  sample.rain.space = ImageSpace::Model;
  sample.rain.data = Tensor({3, h, w});
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        sample.rain.data.at(c, y, x) =
            std::clamp(background.data.at(c, y, x) + 2.0 * mask.at(0, y, x), -1.0, 1.0);
  return sample;
}

ImageTensor synthetic_background(int size, Rng& rng) {
  Tensor px({3, size, size});

  // Linear two-color gradient in a random direction.
  double c0[3], c1[3];
  for (int c = 0; c < 3; ++c) {
    c0[c] = rng.uniform(0.0, 255.0);
    c1[c] = rng.uniform(0.0, 255.0);
  }
  const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double gx = std::cos(theta), gy = std::sin(theta);
  const double diag = std::sqrt(2.0) * size;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double t = ((x * gx + y * gy) / diag + 0.5);
      for (int c = 0; c < 3; ++c) px.at(c, y, x) = (1.0 - t) * c0[c] + t * c1[c];
    }

  // A few blended shapes for structure.
  const int shapes = 3;
  for (int s = 0; s < shapes; ++s) {
    const bool rect = rng.uniform() < 0.5;
    double col[3];
    for (int c = 0; c < 3; ++c) col[c] = rng.uniform(0.0, 255.0);
    const double alpha = rng.uniform(0.4, 0.8);
    if (rect) {
      int x0 = rng.below(size), x1 = rng.below(size);
      int y0 = rng.below(size), y1 = rng.below(size);
      if (x0 > x1) std::swap(x0, x1);
      if (y0 > y1) std::swap(y0, y1);
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
          for (int c = 0; c < 3; ++c)
            px.at(c, y, x) = (1.0 - alpha) * px.at(c, y, x) + alpha * col[c];
    } else {
      const double cx = rng.uniform(0.0, static_cast<double>(size));
      const double cy = rng.uniform(0.0, static_cast<double>(size));
      const double r = rng.uniform(size / 8.0, size / 3.0);
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
          const double dx = x - cx, dy = y - cy;
          if (dx * dx + dy * dy <= r * r)
            for (int c = 0; c < 3; ++c)
              px.at(c, y, x) = (1.0 - alpha) * px.at(c, y, x) + alpha * col[c];
        }
    }
  }

  // Quantize to the 8-bit grid so PNG round trips are exact.
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = std::round(std::clamp(px[i], 0.0, 255.0));

  ImageTensor img;
  img.space = ImageSpace::Pixel;
  img.data = std::move(px);
  return to_model_space(img);
}

DatasetManifest make_synthetic_dataset(int n_per_class, int size, std::uint64_t seed,
                                       const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  if (n_per_class < 1) throw ConfigError("make_synthetic_dataset: n_per_class must be >= 1");
  check_size_arg(size, "make_synthetic_dataset");

  std::error_code ec;
  for (const char* sub : {"sunny", "light", "medium", "heavy", "masks"}) {
    fs::create_directories(out_dir / sub, ec);
    if (ec) throw IoError("cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }

  StreakParams params;
  params.count = std::max(8, size * size / 48);
  params.min_length_px = std::max(3.0, size / 6.0);
  params.max_length_px = std::max(6.0, size / 3.0);

  std::string pairs_csv = "sunny_file,rain_file,intensity\n";

  char name_buf[64];
  for (int i = 0; i < n_per_class; ++i) {
    std::snprintf(name_buf, sizeof(name_buf), "img_%04d.png", i);
    const std::string name = name_buf;

    Rng bg_rng(Rng::mix(seed, static_cast<std::uint64_t>(i)));
    const ImageTensor bg = synthetic_background(size, bg_rng);
    write_png(out_dir / "sunny" / name, to_pixel_space(bg));

    for (int cls = 1; cls < 4; ++cls) {
      const RainIntensity level = static_cast<RainIntensity>(cls);
      StreakParams p = params;
      p.rng_seed = Rng::mix(seed, static_cast<std::uint64_t>(1000 + cls * n_per_class + i));
      const PairedSample sample = synthesize_rain(bg, p, level);

      write_png(out_dir / kClassNames[cls] / name, to_pixel_space(sample.rain));

      ImageTensor mask_img;
      mask_img.space = ImageSpace::Pixel;
      mask_img.data = Tensor({1, size, size});
      for (std::size_t k = 0; k < sample.mask.size(); ++k)
        mask_img.data[k] = sample.mask[k] * 255.0;
      std::snprintf(name_buf, sizeof(name_buf), "img_%04d_%s.png", i, kClassNames[cls]);
      write_png(out_dir / "masks" / name_buf, mask_img);

      pairs_csv += std::string("sunny/") + name + "," + kClassNames[cls] + "/" + name + "," +
                   intensity_name(level) + "\n";
    }
  }

  std::ofstream out(out_dir / "pairs.csv", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (out_dir / "pairs.csv").string());
  out << pairs_csv;
  out.close();

  return load_dataset(out_dir, DatasetRole::Test);
}

}  // namespace rcgan
