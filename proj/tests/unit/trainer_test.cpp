#include "doctest.h"
#include "rcgan/trainer.hpp"
#include "rcgan/errors.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rcgan;
namespace fs = std::filesystem;

namespace {

TrainConfig micro_config() {
  TrainConfig cfg;
  cfg.image_size = 8;
  cfg.epochs = 2;
  cfg.gen_width = 4;
  cfg.dis_width = 4;
  cfg.rmi_width = 3;
  cfg.feat_width = 3;
  cfg.n_rmi = 2;
  cfg.seed = 77;
  cfg.checkpoint_every = 1;
  cfg.sample_every = 1;
  return cfg;
}

Batch micro_batch(std::uint64_t seed, RainIntensity level = RainIntensity::Medium) {
  Rng rng(seed);
  Batch b;
  b.sunny = synthetic_background(8, rng);
  StreakParams params;
  params.rng_seed = seed;
  PairedSample s = synthesize_rain(b.sunny, params, level);
  b.rain = s.rain;
  b.intensity = level;
  return b;
}

bool breakdown_equal(const LossBreakdown& a, const LossBreakdown& b) {
  return a.dis == b.dis && a.gen == b.gen && a.cycle == b.cycle && a.ident_m == b.ident_m &&
         a.ident_f == b.ident_f && a.total == b.total;
}

}  // namespace

TEST_CASE("lr schedule has exactly the two decay breakpoints") {
  TrainConfig cfg;  // epochs=400, decay at 200/300
  CHECK(lr_at(0, 1e-4, cfg) == 1e-4);
  CHECK(lr_at(199, 1e-4, cfg) == 1e-4);
  CHECK(lr_at(200, 1e-4, cfg) == 5e-5);
  CHECK(lr_at(299, 1e-4, cfg) == 5e-5);
  CHECK(lr_at(300, 1e-4, cfg) == 2.5e-5);
  CHECK(lr_at(399, 1e-4, cfg) == 2.5e-5);
  CHECK_THROWS_AS(lr_at(-1, 1e-4, cfg), std::invalid_argument);
  CHECK_THROWS_AS(lr_at(400, 1e-4, cfg), std::invalid_argument);
}

TEST_CASE("discriminator updates once per suppression window") {
  TrainConfig cfg;
  cfg.suppression_ratio = 3;
  int updates = 0;
  for (long long s = 1; s <= 30; ++s) {
    UpdateDecision d = schedule_step(s, cfg);
    CHECK(d.update_generator);
    if (d.update_discriminator) ++updates;
  }
  CHECK(updates == 10);
  CHECK(schedule_step(3, cfg).update_discriminator);
  CHECK_FALSE(schedule_step(4, cfg).update_discriminator);

  cfg.suppression_ratio = 1;
  CHECK(schedule_step(1, cfg).update_discriminator);
  CHECK(schedule_step(2, cfg).update_discriminator);
}

TEST_CASE("label conditioning toggles network input channels") {
  TrainConfig cfg = micro_config();
  Networks with(cfg);
  CHECK(with.g_r.in_channels() == 5);  // image + mask + label
  CHECK(with.d_r.in_channels() == 4);  // image + label

  cfg.use_labels = false;
  Networks without(cfg);
  CHECK(without.g_r.in_channels() == 4);
  CHECK(without.d_r.in_channels() == 3);
}

TEST_CASE("network construction is seed-deterministic") {
  TrainConfig cfg = micro_config();
  Networks a(cfg), b(cfg);
  CHECK(a.generator_side_checksum() == b.generator_side_checksum());
  CHECK(a.discriminator_checksum() == b.discriminator_checksum());
  CHECK(a.feature_checksum() == b.feature_checksum());
  cfg.seed = 78;
  Networks c(cfg);
  CHECK(a.generator_side_checksum() != c.generator_side_checksum());
}

TEST_CASE("rmi network runs its configured number of refinement steps") {
  TrainConfig cfg = micro_config();
  cfg.n_rmi = 4;
  Networks nets(cfg);
  Batch b = micro_batch(5);
  nets.rmi.infer(b.rain.data);
  CHECK(nets.rmi.last_steps_executed() == 4);
  CHECK(nets.rmi.steps() == 4);
}

TEST_CASE("generator inference stays in model range with input shape") {
  TrainConfig cfg = micro_config();
  Networks nets(cfg);
  Batch b = micro_batch(6);
  Tensor mask = nets.rmi.infer(b.sunny.data);
  CHECK(mask.dims() == std::vector<int>{1, 8, 8});
  CHECK(mask.min() >= 0.0);
  CHECK(mask.max() <= 1.0);
  Tensor out = nets.g_r.infer(b.sunny.data, mask, RainIntensity::Heavy);
  CHECK(out.dims() == std::vector<int>{3, 8, 8});
  CHECK(out.min() >= -1.0);
  CHECK(out.max() <= 1.0);
}

TEST_CASE("conditioning label changes the generated image") {
  TrainConfig cfg = micro_config();
  Networks nets(cfg);
  Batch b = micro_batch(7);
  Tensor mask = nets.rmi.infer(b.sunny.data);
  Tensor light = nets.g_r.infer(b.sunny.data, mask, RainIntensity::Light);
  Tensor heavy = nets.g_r.infer(b.sunny.data, mask, RainIntensity::Heavy);
  CHECK(tensor_checksum(light) != tensor_checksum(heavy));
}

TEST_CASE("discriminator emits three patch map scales") {
  TrainConfig cfg = micro_config();
  Networks nets(cfg);
  Batch b = micro_batch(8);
  Var img = Var::leaf(b.rain.data);
  Var label = Var::leaf(label_plane(b.intensity, 8, 8));
  PatchMapSet maps = nets.d_r.forward(img, label);
  REQUIRE(maps.maps.size() == 3);
  for (const Var& m : maps.maps) {
    CHECK(m.value().channels() == 1);
    CHECK(m.value().min() >= 0.0);  // sigmoid default
    CHECK(m.value().max() <= 1.0);
  }
}

TEST_CASE("two trainers with the same config produce identical first steps") {
  TrainConfig cfg = micro_config();
  Trainer a(cfg), b(cfg);
  Batch batch = micro_batch(9);
  StepResult ra = a.step(batch);
  StepResult rb = b.step(batch);
  CHECK(breakdown_equal(ra.losses, rb.losses));
  CHECK(ra.losses.total > 0.0);
}

TEST_CASE("suppressed steps leave discriminator parameters untouched") {
  TrainConfig cfg = micro_config();
  cfg.suppression_ratio = 3;
  Trainer t(cfg);
  Batch batch = micro_batch(10);

  const std::uint64_t d0 = t.nets().discriminator_checksum();
  const std::uint64_t g0 = t.nets().generator_side_checksum();
  const std::uint64_t f0 = t.nets().feature_checksum();

  StepResult r1 = t.step(batch);  // step 1: suppressed
  CHECK_FALSE(r1.decision.update_discriminator);
  CHECK(t.nets().discriminator_checksum() == d0);
  CHECK(t.nets().generator_side_checksum() != g0);

  t.step(batch);                  // step 2: suppressed
  CHECK(t.nets().discriminator_checksum() == d0);

  StepResult r3 = t.step(batch);  // step 3: discriminator updates
  CHECK(r3.decision.update_discriminator);
  CHECK(t.nets().discriminator_checksum() != d0);

  // The frozen feature extractor never moves.
  CHECK(t.nets().feature_checksum() == f0);
}

TEST_CASE("checkpoint restore resumes the exact trajectory") {
  TrainConfig cfg = micro_config();
  Trainer a(cfg);
  Batch b1 = micro_batch(11, RainIntensity::Light);
  Batch b2 = micro_batch(12, RainIntensity::Heavy);
  a.step(b1);
  a.step(b2);
  a.step(b1);
  Checkpoint c = a.make_checkpoint(1);

  Trainer b(cfg);
  b.restore(c);
  CHECK(b.global_step() == a.global_step());
  StepResult na = a.step(b2);
  StepResult nb = b.step(b2);
  CHECK(breakdown_equal(na.losses, nb.losses));
  CHECK(a.nets().generator_side_checksum() == b.nets().generator_side_checksum());
  CHECK(a.nets().discriminator_checksum() == b.nets().discriminator_checksum());
}

TEST_CASE("restore refuses a checkpoint from a different configuration") {
  TrainConfig cfg = micro_config();
  Trainer a(cfg);
  Checkpoint c = a.make_checkpoint(0);
  TrainConfig other = cfg;
  other.gen_width = 6;
  Trainer b(other);
  CHECK_THROWS_AS(b.restore(c), ConfigError);
}

TEST_CASE("epoch lr application follows the schedule for both optimizers") {
  TrainConfig cfg = micro_config();
  cfg.epochs = 10;
  cfg.decay_epoch_half = 4;
  cfg.decay_epoch_quarter = 8;
  Trainer t(cfg);
  t.apply_epoch_lr(0);
  CHECK(t.current_lr_gen() == cfg.lr_gen);
  CHECK(t.current_lr_dis() == cfg.lr_dis);
  t.apply_epoch_lr(5);
  CHECK(t.current_lr_gen() == cfg.lr_gen / 2);
  CHECK(t.current_lr_dis() == cfg.lr_dis / 2);
  t.apply_epoch_lr(9);
  CHECK(t.current_lr_gen() == cfg.lr_gen / 4);
}

TEST_CASE("run_training writes the expected artifacts") {
  const fs::path root = fs::temp_directory_path() / "rcgan_trainer_run";
  fs::remove_all(root);
  DatasetManifest data = make_synthetic_dataset(2, 8, 21, root / "data");

  TrainConfig cfg = micro_config();
  cfg.epochs = 2;
  Checkpoint last = run_training(cfg, data, root / "out");
  CHECK(last.epoch == 2);
  // 6 rain images per epoch (2 per class, 3 classes).
  CHECK(last.global_step == 12);
  CHECK(fs::exists(root / "out" / "config.txt"));
  CHECK(fs::exists(root / "out" / "ckpt_epoch_0001.ckpt"));
  CHECK(fs::exists(root / "out" / "ckpt_epoch_0002.ckpt"));
  CHECK(fs::exists(root / "out" / "ckpt_epoch_0002.json"));
  CHECK(fs::exists(root / "out" / "sample_epoch_0002.png"));

  std::ifstream csv(root / "out" / "loss_log.csv");
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  CHECK(line == "step,epoch,dis,gen,cycle,ident_m,ident_f,total,lr_gen,lr_dis,d_updated");
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 12);

  // The echoed config reproduces the run module-exactly.
  TrainConfig echoed = load_config_file(root / "out" / "config.txt");
  CHECK(config_hash(echoed) == config_hash(cfg));
  fs::remove_all(root);
}

TEST_CASE("ablation ladder stages match the documented sequence") {
  const fs::path root = fs::temp_directory_path() / "rcgan_trainer_abl";
  fs::remove_all(root);
  DatasetManifest data = make_synthetic_dataset(2, 8, 22, root / "data");

  TrainConfig cfg = micro_config();
  cfg.epochs = 1;
  cfg.suppression_ratio = 3;
  AblationReport rep = run_ablation(cfg, data, root / "out");
  REQUIRE(rep.stages.size() == 3);

  CHECK(rep.stages[0].name == "stage1_labels");
  CHECK(rep.stages[0].config.use_labels);
  CHECK(rep.stages[0].config.activation == DisActivation::LeakyRelu);
  CHECK(rep.stages[0].config.suppression_ratio == 1);

  CHECK(rep.stages[1].name == "stage2_sigmoid");
  CHECK(rep.stages[1].config.use_labels);
  CHECK(rep.stages[1].config.activation == DisActivation::Sigmoid);
  CHECK(rep.stages[1].config.suppression_ratio == 1);

  CHECK(rep.stages[2].name == "stage3_suppression");
  CHECK(rep.stages[2].config.use_labels);
  CHECK(rep.stages[2].config.activation == DisActivation::Sigmoid);
  CHECK(rep.stages[2].config.suppression_ratio == 3);

  CHECK(fs::exists(rep.csv_path));
  // Paired synthetic data gives real metric aggregates.
  for (const AblationStageResult& s : rep.stages) {
    CHECK(std::isfinite(s.psnr_mean));
    CHECK(std::isfinite(s.ssim_mean));
    CHECK(fs::exists(root / "out" / s.name / "config.txt"));
  }
  fs::remove_all(root);
}

TEST_CASE("trainer rejects invalid configurations at construction") {
  TrainConfig cfg = micro_config();
  cfg.image_size = 10;  // not a multiple of 4
  CHECK_THROWS_AS(Trainer{cfg}, ConfigError);
}

TEST_CASE("feature network file round trip produces identical features") {
  const fs::path dir = fs::temp_directory_path() / "rcgan_feat_test";
  fs::create_directories(dir);
  TrainConfig cfg = micro_config();
  Networks a(cfg);
  a.feat.save_weights(dir / "feat.bin");

  TrainConfig file_cfg = cfg;
  file_cfg.feature_weights = (dir / "feat.bin").string();
  file_cfg.feature_seed = 999;  // ignored when a file is given
  FeatureNetwork loaded(file_cfg);
  CHECK(loaded.checksum() == a.feat.checksum());
  fs::remove_all(dir);
}
