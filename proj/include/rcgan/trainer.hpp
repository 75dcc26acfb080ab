#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rcgan/checkpoint.hpp"
#include "rcgan/config.hpp"
#include "rcgan/data.hpp"
#include "rcgan/losses.hpp"
#include "rcgan/models.hpp"
#include "rcgan/optim.hpp"

namespace rcgan {

struct UpdateDecision {
  bool update_generator = true;
  bool update_discriminator = false;
};

// Staged decay: base below decay_epoch_half, half up to decay_epoch_quarter,
// a quarter beyond. Throws on epoch outside [0, cfg.epochs).
double lr_at(int epoch, double base_lr, const TrainConfig& cfg);

// Generator updates every step; the discriminator only when the 1-based step
// index is a multiple of the suppression ratio.
UpdateDecision schedule_step(long long step, const TrainConfig& cfg);

// The five trainable networks plus the frozen feature extractor, seeded
// deterministically from the config.
struct Networks {
  Generator g_n;  // rain -> sunny
  Generator g_r;  // sunny -> rain
  Discriminator d_r;
  Discriminator d_n;
  RmiNetwork rmi;
  FeatureNetwork feat;

  explicit Networks(const TrainConfig& cfg);

  // Canonical checkpoint order: g_n, g_r, rmi, d_r, d_n, feat.
  std::vector<TensorRecord> named_tensors() const;
  void load_named_tensors(const std::vector<TensorRecord>& tensors);

  std::vector<Var> generator_side_params() const;  // g_n + g_r + rmi
  std::vector<Var> discriminator_params() const;   // d_r + d_n

  std::uint64_t generator_side_checksum() const;
  std::uint64_t discriminator_checksum() const;
  std::uint64_t feature_checksum() const { return feat.checksum(); }
};

// One training example: an unpaired sunny/rain image pair with the rain
// image's intensity label.
struct Batch {
  ImageTensor sunny;
  ImageTensor rain;
  RainIntensity intensity = RainIntensity::Medium;
};

struct StepResult {
  LossBreakdown losses;
  UpdateDecision decision;
};

class Trainer {
 public:
  explicit Trainer(const TrainConfig& cfg);

  // Runs one optimization step (generator side always, discriminators per
  // the suppression schedule) and advances the global step counter.
  StepResult step(const Batch& batch);

  // Applies the staged decay for this epoch to both optimizers.
  void apply_epoch_lr(int epoch);

  long long global_step() const { return global_step_; }
  double current_lr_gen() const { return gen_opt_.lr(); }
  double current_lr_dis() const { return dis_opt_.lr(); }

  Networks& nets() { return nets_; }
  const Networks& nets() const { return nets_; }
  const TrainConfig& config() const { return cfg_; }

  Checkpoint make_checkpoint(std::int64_t completed_epochs) const;
  void restore(const Checkpoint& c);

 private:
  TrainConfig cfg_;
  Networks nets_;
  Adam gen_opt_, dis_opt_;
  Rng master_rng_;
  long long global_step_ = 0;
  std::vector<LossBreakdown> loss_tail_;  // last few steps for the checkpoint
};

// Full training loop: per-epoch deterministic data order, staged decay,
// per-step CSV logging, periodic checkpoints and sample grids. Returns the
// final checkpoint. resume_from restarts from an epoch-boundary checkpoint
// written by the same config.
Checkpoint run_training(const TrainConfig& cfg, const DatasetManifest& dataset,
                        const std::filesystem::path& out_dir,
                        const std::optional<std::filesystem::path>& resume_from = std::nullopt);

struct AblationStageResult {
  std::string name;
  TrainConfig config;
  LossBreakdown final_losses;
  double psnr_mean = 0.0;  // NaN when the dataset has no pairing table
  double ssim_mean = 0.0;
};

struct AblationReport {
  std::vector<AblationStageResult> stages;
  std::filesystem::path csv_path;
};

// Three short runs stacking the enhancements in order: (1) intensity labels,
// (2) sigmoid discriminator activation, (3) discriminator suppression. The
// last stage matches the full default configuration.
AblationReport run_ablation(const TrainConfig& cfg, const DatasetManifest& dataset,
                            const std::filesystem::path& out_dir);

}  // namespace rcgan
