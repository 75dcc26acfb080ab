#include "doctest.h"
#include "rcgan/checkpoint.hpp"
#include "rcgan/config.hpp"
#include "rcgan/errors.hpp"
#include "rcgan/rng.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>

using namespace rcgan;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "rcgan_ckpt_test";
  fs::create_directories(dir);
  return dir;
}

Checkpoint sample_checkpoint() {
  TrainConfig cfg;
  cfg.image_size = 16;
  cfg.epochs = 2;
  Checkpoint c;
  c.config_hash = config_hash(cfg);
  c.config_text = serialize_config(cfg);
  c.epoch = 2;
  c.global_step = 12;
  c.rng_state = Rng(42).serialize();
  Rng rng(1);
  for (int i = 0; i < 3; ++i) {
    Tensor t({2, 3});
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = rng.normal();
    c.tensors.push_back({"net.layer" + std::to_string(i) + ".w", t});
  }
  for (int i = 0; i < 10; ++i) c.opt_state.push_back(rng.uniform(-1, 1));
  c.gen_steps = 12;
  c.dis_steps = 4;
  LossBreakdown b;
  b.total = 3.25;
  b.cycle = 0.5;
  c.loss_tail.push_back(b);
  return c;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("save/load/save produces byte-identical files") {
  const fs::path dir = temp_dir();
  const Checkpoint c = sample_checkpoint();
  save_checkpoint(c, dir / "a.ckpt");
  Checkpoint d = load_checkpoint(dir / "a.ckpt");
  save_checkpoint(d, dir / "b.ckpt");
  CHECK(file_bytes(dir / "a.ckpt") == file_bytes(dir / "b.ckpt"));
  CHECK(file_bytes(dir / "a.json") == file_bytes(dir / "b.json"));
}

TEST_CASE("round trip preserves every field exactly") {
  const fs::path dir = temp_dir();
  const Checkpoint c = sample_checkpoint();
  save_checkpoint(c, dir / "rt.ckpt");
  Checkpoint d = load_checkpoint(dir / "rt.ckpt");
  CHECK(d.config_hash == c.config_hash);
  CHECK(d.config_text == c.config_text);
  CHECK(d.epoch == c.epoch);
  CHECK(d.global_step == c.global_step);
  CHECK(d.rng_state == c.rng_state);
  REQUIRE(d.tensors.size() == c.tensors.size());
  for (std::size_t i = 0; i < c.tensors.size(); ++i) {
    CHECK(d.tensors[i].name == c.tensors[i].name);
    CHECK(d.tensors[i].value.dims() == c.tensors[i].value.dims());
    CHECK(tensor_checksum(d.tensors[i].value) == tensor_checksum(c.tensors[i].value));
  }
  CHECK(d.opt_state == c.opt_state);
  CHECK(d.gen_steps == c.gen_steps);
  CHECK(d.dis_steps == c.dis_steps);
  REQUIRE(d.loss_tail.size() == 1);
  CHECK(d.loss_tail[0].total == 3.25);
  CHECK(d.loss_tail[0].cycle == 0.5);
  CHECK(d.params_checksum() == c.params_checksum());
}

TEST_CASE("sidecar is valid json with the expected metadata") {
  const fs::path dir = temp_dir();
  const Checkpoint c = sample_checkpoint();
  save_checkpoint(c, dir / "side.ckpt");
  std::ifstream f(dir / "side.json");
  REQUIRE(f.good());
  nlohmann::json j = nlohmann::json::parse(f);
  CHECK(j["epoch"].get<std::int64_t>() == 2);
  CHECK(j["global_step"].get<std::int64_t>() == 12);
  CHECK(j.contains("format"));
  CHECK(j.contains("config_hash"));
  CHECK(j.contains("params_checksum"));
  CHECK(j.contains("config"));
  CHECK(j.contains("rng_state"));
}

TEST_CASE("loader rejects corrupted and truncated containers") {
  const fs::path dir = temp_dir();
  const Checkpoint c = sample_checkpoint();
  save_checkpoint(c, dir / "victim.ckpt");

  // Wrong magic.
  std::string bytes = file_bytes(dir / "victim.ckpt");
  bytes[0] = 'X';
  std::ofstream(dir / "bad_magic.ckpt", std::ios::binary) << bytes;
  CHECK_THROWS_AS(load_checkpoint(dir / "bad_magic.ckpt"), IoError);

  // Truncated tail.
  std::ofstream(dir / "trunc.ckpt", std::ios::binary)
      << file_bytes(dir / "victim.ckpt").substr(0, 64);
  CHECK_THROWS_AS(load_checkpoint(dir / "trunc.ckpt"), IoError);

  CHECK_THROWS_AS(load_checkpoint(dir / "never_written.ckpt"), IoError);
}

TEST_CASE("params_checksum tracks tensor values") {
  Checkpoint a = sample_checkpoint();
  Checkpoint b = sample_checkpoint();
  CHECK(a.params_checksum() == b.params_checksum());
  b.tensors[1].value[0] += 1e-12;
  CHECK(a.params_checksum() != b.params_checksum());
}
