#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "rcgan/loss_types.hpp"

namespace rcgan {

enum class DisActivation { Sigmoid, LeakyRelu };
enum class IdentityMode { Pixel, Feature };

const char* activation_name(DisActivation a);
DisActivation parse_activation(const std::string& s);
const char* identity_mode_name(IdentityMode m);
IdentityMode parse_identity_mode(const std::string& s);

// Training hyperparameters. Defaults are the full-scale settings; desk-scale
// runs override size/width/epoch fields.
struct TrainConfig {
  int image_size = 256;
  int epochs = 400;
  int batch = 1;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double lr_gen = 1e-4;
  double lr_dis = 8e-5;
  int decay_epoch_half = 200;
  int decay_epoch_quarter = 300;
  int n_rmi = 6;
  int suppression_ratio = 3;
  DisActivation activation = DisActivation::Sigmoid;
  bool use_labels = true;
  IdentityMode identity_mode = IdentityMode::Pixel;
  LossWeights weights;
  std::uint64_t seed = 42;

  // Channel widths of the four networks.
  int gen_width = 64;
  int dis_width = 64;
  int rmi_width = 32;
  int feat_width = 16;

  // The frozen feature extractor either loads weights from this file or is
  // built from feature_seed.
  std::string feature_weights;
  std::uint64_t feature_seed = 1234;

  int checkpoint_every = 25;
  int sample_every = 25;

  // Run parameters, echoed so a config file alone reproduces a run.
  std::string data_dir;
  std::string out_dir;

  void validate() const;  // throws ConfigError
};

// Flat key = value text form. Serialization is canonical: fixed key order,
// round-trip exact doubles.
std::string serialize_config(const TrainConfig& cfg);
TrainConfig parse_config_text(const std::string& text);
TrainConfig load_config_file(const std::filesystem::path& path);
void write_config_file(const TrainConfig& cfg, const std::filesystem::path& path);

std::uint64_t config_hash(const TrainConfig& cfg);

}  // namespace rcgan
