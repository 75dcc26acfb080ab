#include "doctest.h"
#include "rcgan/png_io.hpp"
#include "rcgan/errors.hpp"
#include "rcgan/rng.hpp"

#include <filesystem>
#include <fstream>

using namespace rcgan;
namespace fs = std::filesystem;

namespace {
fs::path temp_png(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "rcgan_png_test";
  fs::create_directories(dir);
  return dir / name;
}
}  // namespace

TEST_CASE("rgb write/read round trip is exact on the byte grid") {
  Rng rng(4);
  ImageTensor img{Tensor({3, 9, 7}), ImageSpace::Pixel};
  for (std::size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = static_cast<double>(rng.below(256));
  const fs::path p = temp_png("rgb.png");
  write_png(p, img);
  ImageTensor back = read_png(p);
  CHECK(back.space == ImageSpace::Pixel);
  REQUIRE(back.data.dims() == img.data.dims());
  for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(back.data[i] == img.data[i]);
}

TEST_CASE("grayscale write/read round trip") {
  Rng rng(5);
  ImageTensor img{Tensor({1, 5, 6}), ImageSpace::Pixel};
  for (std::size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = static_cast<double>(rng.below(256));
  const fs::path p = temp_png("gray.png");
  write_png(p, img);
  ImageTensor back = read_png(p);
  REQUIRE(back.data.dims() == img.data.dims());
  for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(back.data[i] == img.data[i]);
}

TEST_CASE("writer quantizes with round-half-away and clamps") {
  ImageTensor img{Tensor({1, 1, 4}), ImageSpace::Pixel};
  img.data[0] = 10.4;    // -> 10
  img.data[1] = 10.6;    // -> 11
  img.data[2] = 0.0;     // -> 0
  img.data[3] = 255.0;   // -> 255
  const fs::path p = temp_png("quant.png");
  write_png(p, img);
  ImageTensor back = read_png(p);
  CHECK(back.data[0] == 10.0);
  CHECK(back.data[1] == 11.0);
  CHECK(back.data[2] == 0.0);
  CHECK(back.data[3] == 255.0);
}

TEST_CASE("writes are byte-deterministic") {
  ImageTensor img{Tensor::full({3, 6, 6}, 42.0), ImageSpace::Pixel};
  const fs::path a = temp_png("det_a.png");
  const fs::path b = temp_png("det_b.png");
  write_png(a, img);
  write_png(b, img);
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  const std::string ba((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  const std::string bb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(ba == bb);
  CHECK_FALSE(ba.empty());
}

TEST_CASE("reading a missing file raises IoError") {
  CHECK_THROWS_AS(read_png(temp_png("missing_file.png")), IoError);
}

TEST_CASE("reading a non-png file raises IoError") {
  const fs::path p = temp_png("not_a_png.png");
  std::ofstream out(p, std::ios::binary);
  out << "this is just text, definitely not a png signature";
  out.close();
  CHECK_THROWS_AS(read_png(p), IoError);
}

TEST_CASE("writing into a missing directory raises IoError") {
  ImageTensor img{Tensor::full({1, 2, 2}, 0.0), ImageSpace::Pixel};
  CHECK_THROWS_AS(write_png(fs::path("/nonexistent_dir_xyz/file.png"), img), IoError);
}

TEST_CASE("writer rejects unsupported channel counts and model-space data") {
  ImageTensor bad{Tensor::full({2, 2, 2}, 0.0), ImageSpace::Pixel};
  CHECK_THROWS_AS(write_png(temp_png("bad.png"), bad), std::invalid_argument);
}
