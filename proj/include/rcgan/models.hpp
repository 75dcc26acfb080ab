#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "rcgan/config.hpp"
#include "rcgan/image.hpp"
#include "rcgan/nn.hpp"

namespace rcgan {

// Outputs of one discriminator forward pass: exactly three patch maps,
// scale i computed on the 2^i average-pooled input.
struct PatchMapSet {
  std::vector<Var> maps;  // size 3, each (1, h_i, w_i)
};

// Encoder (7x7 conv + two stride-2 convs), transformer of five residual
// blocks (ten 3x3 convs), decoder (two stride-2 upsampling layers + 7x7
// conv with tanh). Input channels: 3 image + 1 mask (+ 1 label).
class Generator {
 public:
  Generator() = default;
  Generator(const TrainConfig& cfg, std::uint64_t seed);

  // All inputs model space; mask and label are (1,H,W). The label is ignored
  // when the config disables label conditioning.
  Var forward(const Var& image, const Var& mask, const Var& label) const;
  Tensor infer(const Tensor& image, const Tensor& mask, RainIntensity level) const;

  int in_channels() const { return in_channels_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

 private:
  bool use_labels_ = true;
  int in_channels_ = 5;
  Conv2d enc1_, enc2_, enc3_;
  std::vector<ResidualBlock> blocks_;
  ConvTranspose2d dec1_, dec2_;
  Conv2d out_;
  ParamStore params_;
};

// Three shared-architecture, independent-parameter branches; branch i runs
// on the 2^i average-pooled input. Each branch: four stride-2 convs plus a
// 1-channel patch head. Hidden activation is sigmoid by default, LeakyReLU
// (0.2) for the ablation; with sigmoid the patch head is sigmoid too.
class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(const TrainConfig& cfg, std::uint64_t seed);

  PatchMapSet forward(const Var& image, const Var& label) const;

  // The pooled pyramid the three branches consume, exposed for inspection.
  std::vector<Var> pyramid(const Var& image, const Var& label) const;

  int in_channels() const { return in_channels_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

 private:
  struct Branch {
    Conv2d c1, c2, c3, c4, head;
  };
  bool use_labels_ = true;
  int in_channels_ = 4;
  DisActivation act_ = DisActivation::Sigmoid;
  std::array<Branch, 3> branches_;
  ParamStore params_;
};

// Recurrent rain-mask estimator. One input conv, one residual block, one
// ConvLSTM cell and a sigmoid head, applied n_rmi times with the cell state
// and current mask estimate carried across steps.
class RmiNetwork {
 public:
  RmiNetwork() = default;
  RmiNetwork(const TrainConfig& cfg, std::uint64_t seed);

  Var forward(const Var& image) const;
  Tensor infer(const Tensor& image) const;

  int steps() const { return n_steps_; }
  int last_steps_executed() const { return last_steps_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

 private:
  int n_steps_ = 6;
  Conv2d in_conv_;
  ResidualBlock res_;
  ConvLstmCell cell_;
  Conv2d head_;
  ParamStore params_;
  mutable int last_steps_ = 0;
};

// Frozen convolutional feature extractor. Either a fixed-seed random stack
// (the default stand-in) or weights loaded from a file; parameters never
// receive gradients.
class FeatureNetwork {
 public:
  FeatureNetwork() = default;
  explicit FeatureNetwork(const TrainConfig& cfg);

  Var forward(const Var& image) const;
  Tensor infer(const Tensor& image) const;

  void save_weights(const std::filesystem::path& path) const;
  std::uint64_t checksum() const { return params_.checksum(); }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

 private:
  Conv2d c1_, c2_, c3_;
  ParamStore params_;
};

}  // namespace rcgan
