#include "doctest.h"
#include "rcgan/errors.hpp"
#include "rcgan/metrics.hpp"
#include "rcgan/png_io.hpp"
#include "rcgan/rng.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rcgan;
namespace fs = std::filesystem;

namespace {

ImageTensor random_pixel_image(int c, int h, int w, Rng& rng) {
  ImageTensor img{Tensor({c, h, w}), ImageSpace::Pixel};
  for (std::size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = static_cast<double>(rng.below(256));
  return img;
}

// Independent brute-force reference: per-channel double loop, then mean.
double mse_bruteforce(const ImageTensor& a, const ImageTensor& b) {
  double acc = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    double ch = 0.0;
    for (int y = 0; y < a.height(); ++y)
      for (int x = 0; x < a.width(); ++x) {
        const double d = a.data.at(c, y, x) - b.data.at(c, y, x);
        ch += d * d;
      }
    acc += ch / (a.height() * a.width());
  }
  return acc / a.channels();
}

}  // namespace

TEST_CASE("mse equals the brute-force oracle exactly") {
  Rng rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    ImageTensor a = random_pixel_image(3, 8, 8, rng);
    ImageTensor b = random_pixel_image(3, 8, 8, rng);
    CHECK(mse(a, b) == mse_bruteforce(a, b));
  }
}

TEST_CASE("mse closed forms") {
  ImageTensor zero{Tensor::full({3, 4, 4}, 0.0), ImageSpace::Pixel};
  ImageTensor full{Tensor::full({3, 4, 4}, 255.0), ImageSpace::Pixel};
  CHECK(mse(zero, zero) == 0.0);
  CHECK(mse(zero, full) == 65025.0);
}

TEST_CASE("psnr formula, endpoints and monotonicity") {
  ImageTensor zero{Tensor::full({1, 4, 4}, 0.0), ImageSpace::Pixel};
  ImageTensor full{Tensor::full({1, 4, 4}, 255.0), ImageSpace::Pixel};
  CHECK(psnr(zero, full) == 0.0);
  CHECK(std::isinf(psnr(zero, zero)));
  CHECK(psnr(zero, zero) > 0.0);

  // MSE = 1 -> 20*log10(255).
  ImageTensor one{Tensor::full({1, 4, 4}, 1.0), ImageSpace::Pixel};
  CHECK(psnr(zero, one) == doctest::Approx(48.130803608679).epsilon(1e-10));

  // Lower MSE gives strictly higher PSNR.
  ImageTensor two{Tensor::full({1, 4, 4}, 2.0), ImageSpace::Pixel};
  CHECK(psnr(zero, one) > psnr(zero, two));

  // Other bit depths change the peak.
  CHECK(psnr(zero, one, 16) == doctest::Approx(20.0 * std::log10(65535.0)).epsilon(1e-10));
}

TEST_CASE("metric preconditions") {
  ImageTensor a{Tensor::full({1, 4, 4}, 0.0), ImageSpace::Pixel};
  ImageTensor b{Tensor::full({1, 4, 5}, 0.0), ImageSpace::Pixel};
  CHECK_THROWS_AS(mse(a, b), std::invalid_argument);
  ImageTensor m{Tensor::full({1, 4, 4}, 0.0), ImageSpace::Model};
  CHECK_THROWS_AS(mse(a, m), std::invalid_argument);
  CHECK_THROWS_AS(ssim(a, b), std::invalid_argument);
}

TEST_CASE("ssim fixed points and symmetry") {
  Rng rng(88);
  for (int trial = 0; trial < 5; ++trial) {
    ImageTensor x = random_pixel_image(3, 12, 12, rng);
    CHECK(std::fabs(ssim(x, x, SsimMode::Global) - 1.0) < 1e-9);
    CHECK(std::fabs(ssim(x, x, SsimMode::Windowed) - 1.0) < 1e-9);
    ImageTensor y = random_pixel_image(3, 12, 12, rng);
    CHECK(ssim(x, y, SsimMode::Global) == doctest::Approx(ssim(y, x, SsimMode::Global)));
    CHECK(ssim(x, y, SsimMode::Windowed) == doctest::Approx(ssim(y, x, SsimMode::Windowed)));
    CHECK(ssim(x, y, SsimMode::Global) <= 1.0);
  }
}

TEST_CASE("global ssim of flat extremes matches the closed form") {
  ImageTensor zero{Tensor::full({1, 8, 8}, 0.0), ImageSpace::Pixel};
  ImageTensor full{Tensor::full({1, 8, 8}, 255.0), ImageSpace::Pixel};
  const double c1 = 0.01 * 255.0 * 0.01 * 255.0;
  const double expect = c1 / (255.0 * 255.0 + c1);
  CHECK(std::fabs(ssim(zero, full, SsimMode::Global) - expect) < 1e-9);
}

TEST_CASE("gray conversion modes differ on saturated color images") {
  ImageTensor red{Tensor({3, 8, 8}), ImageSpace::Pixel};
  ImageTensor blue{Tensor({3, 8, 8}), ImageSpace::Pixel};
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      red.data.at(0, y, x) = 200.0 + (x % 3);
      blue.data.at(2, y, x) = 200.0 + (x % 3);
    }
  // Luma weights distinguish red from blue; the channel mean does not.
  const double luma = ssim(red, blue, SsimMode::Global, GrayMode::Luma601);
  const double mean = ssim(red, blue, SsimMode::Global, GrayMode::ChannelMean);
  CHECK(mean == doctest::Approx(1.0));
  CHECK(luma < 0.999);
}

TEST_CASE("windowed ssim falls back to global below the window size") {
  ImageTensor a{Tensor::full({1, 6, 6}, 10.0), ImageSpace::Pixel};
  ImageTensor b{Tensor::full({1, 6, 6}, 20.0), ImageSpace::Pixel};
  CHECK(ssim(a, b, SsimMode::Windowed) == doctest::Approx(ssim(a, b, SsimMode::Global)));
}

TEST_CASE("ssim mode names round trip") {
  CHECK(parse_ssim_mode(ssim_mode_name(SsimMode::Global)) == SsimMode::Global);
  CHECK(parse_ssim_mode(ssim_mode_name(SsimMode::Windowed)) == SsimMode::Windowed);
  CHECK_THROWS_AS(parse_ssim_mode("local"), ConfigError);
}

TEST_CASE("evaluate_pairs matches by name and reports skips") {
  Rng rng(99);
  const fs::path root = fs::temp_directory_path() / "rcgan_metrics_pairs";
  fs::remove_all(root);
  fs::create_directories(root / "gen");
  fs::create_directories(root / "ref");

  for (int i = 0; i < 3; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img_%02d.png", i);
    ImageTensor img = random_pixel_image(3, 8, 8, rng);
    write_png(root / "ref" / name, img);
    if (i < 2) write_png(root / "gen" / name, img);  // img_02 unmatched
  }
  write_png(root / "gen" / "extra.png", random_pixel_image(3, 8, 8, rng));

  MetricReport rep = evaluate_pairs(root / "gen", root / "ref");
  CHECK(rep.pairs.size() == 2);
  CHECK(rep.pairs[0].pair_id == "img_00.png");
  CHECK(rep.pairs[1].pair_id == "img_01.png");
  CHECK(rep.skipped.size() == 2);
  CHECK_FALSE(rep.complete());
  CHECK(std::isinf(rep.psnr_mean));
  CHECK(rep.ssim_mean == doctest::Approx(1.0));

  // Shape mismatches are skipped, not fatal.
  write_png(root / "gen" / "img_02.png", random_pixel_image(3, 4, 4, rng));
  MetricReport rep2 = evaluate_pairs(root / "gen", root / "ref");
  CHECK(rep2.pairs.size() == 2);
  CHECK(rep2.skipped.size() == 2);

  fs::remove_all(root);
}

TEST_CASE("csv report shape and infinite marker") {
  MetricReport rep;
  rep.pairs.push_back({"a.png", std::numeric_limits<double>::infinity(), 1.0});
  rep.pairs.push_back({"b.png", 31.25, 0.5});
  rep.psnr_mean = std::numeric_limits<double>::infinity();
  rep.ssim_mean = 0.75;
  const std::string csv = report_csv(rep);

  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "pair_id,psnr_db,ssim");
  std::getline(ss, line);
  CHECK(line == "a.png,inf,1");
  std::getline(ss, line);
  CHECK(line == "b.png,31.25,0.5");
  std::getline(ss, line);
  CHECK(line.substr(0, 14) == "aggregate,inf,");
}
