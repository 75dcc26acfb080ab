#include "rcgan/models.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "rcgan/errors.hpp"

namespace rcgan {

namespace {

double conv_std(int in_c, int k) { return std::sqrt(2.0 / (static_cast<double>(in_c) * k * k)); }

Var image_leaf(const Tensor& t) { return Var::leaf(t, /*requires_grad=*/false); }

}  // namespace

// ---------------------------------------------------------------------------
// Generator

Generator::Generator(const TrainConfig& cfg, std::uint64_t seed) {
  use_labels_ = cfg.use_labels;
  in_channels_ = 4 + (use_labels_ ? 1 : 0);  // image + mask (+ label)
  const int w = cfg.gen_width;
  Rng rng(seed);

  enc1_ = Conv2d(params_, "enc1", in_channels_, w, 7, 1, 3, rng, conv_std(in_channels_, 7));
  enc2_ = Conv2d(params_, "enc2", w, 2 * w, 3, 2, 1, rng, conv_std(w, 3));
  enc3_ = Conv2d(params_, "enc3", 2 * w, 4 * w, 3, 2, 1, rng, conv_std(2 * w, 3));
  blocks_.reserve(5);
  for (int i = 0; i < 5; ++i)
    blocks_.emplace_back(params_, "res" + std::to_string(i + 1), 4 * w, Act::Relu, rng);
  dec1_ = ConvTranspose2d(params_, "dec1", 4 * w, 2 * w, 3, 2, 1, 1, rng, conv_std(4 * w, 3));
  dec2_ = ConvTranspose2d(params_, "dec2", 2 * w, w, 3, 2, 1, 1, rng, conv_std(2 * w, 3));
  out_ = Conv2d(params_, "out", w, 3, 7, 1, 3, rng, conv_std(w, 7));
}

Var Generator::forward(const Var& image, const Var& mask, const Var& label) const {
  std::vector<Var> parts{image, mask};
  if (use_labels_) parts.push_back(label);
  Var h = ops::concat_ch(parts);
  h = ops::relu(enc1_.forward(h));
  h = ops::relu(enc2_.forward(h));
  h = ops::relu(enc3_.forward(h));
  for (const ResidualBlock& b : blocks_) h = b.forward(h);
  h = ops::relu(dec1_.forward(h));
  h = ops::relu(dec2_.forward(h));
  return ops::tanh(out_.forward(h));
}

Tensor Generator::infer(const Tensor& image, const Tensor& mask, RainIntensity level) const {
  Var lbl = image_leaf(label_plane(level, image.height(), image.width()));
  return forward(image_leaf(image), image_leaf(mask), lbl).value();
}

// ---------------------------------------------------------------------------
// Discriminator

Discriminator::Discriminator(const TrainConfig& cfg, std::uint64_t seed) {
  use_labels_ = cfg.use_labels;
  act_ = cfg.activation;
  in_channels_ = 3 + (use_labels_ ? 1 : 0);
  const int w = cfg.dis_width;
  Rng rng(seed);

  for (int i = 0; i < 3; ++i) {
    const std::string p = "s" + std::to_string(i) + ".";
    Branch& br = branches_[static_cast<std::size_t>(i)];
    br.c1 = Conv2d(params_, p + "c1", in_channels_, w, 4, 2, 1, rng, conv_std(in_channels_, 4));
    br.c2 = Conv2d(params_, p + "c2", w, 2 * w, 4, 2, 1, rng, conv_std(w, 4));
    br.c3 = Conv2d(params_, p + "c3", 2 * w, 4 * w, 4, 2, 1, rng, conv_std(2 * w, 4));
    br.c4 = Conv2d(params_, p + "c4", 4 * w, 8 * w, 4, 2, 1, rng, conv_std(4 * w, 4));
    br.head = Conv2d(params_, p + "head", 8 * w, 1, 3, 1, 1, rng, conv_std(8 * w, 3));
  }
}

std::vector<Var> Discriminator::pyramid(const Var& image, const Var& label) const {
  std::vector<Var> parts{image};
  if (use_labels_) parts.push_back(label);
  Var x0 = use_labels_ ? ops::concat_ch(parts) : image;
  std::vector<Var> levels{x0};
  levels.push_back(ops::avg_pool2(levels.back()));
  levels.push_back(ops::avg_pool2(levels.back()));
  return levels;
}

PatchMapSet Discriminator::forward(const Var& image, const Var& label) const {
  const bool sig = act_ == DisActivation::Sigmoid;
  auto hidden = [&](const Var& x) {
    return sig ? ops::sigmoid(x) : ops::leaky_relu(x, 0.2);
  };
  // Downsampling conv; once a branch has shrunk to 1x1 the usual padding
  // would produce an empty map, so widen it to keep a 1x1 output and all
  // parameters engaged at tiny image sizes.
  auto down = [&](const Conv2d& conv, const Var& x) {
    const int pad = x.value().height() == 1 || x.value().width() == 1 ? 2 : 1;
    return hidden(conv.forward_with_pad(x, pad));
  };
  std::vector<Var> levels = pyramid(image, label);
  PatchMapSet out;
  out.maps.reserve(3);
  for (int i = 0; i < 3; ++i) {
    const Branch& br = branches_[static_cast<std::size_t>(i)];
    Var h = down(br.c1, levels[static_cast<std::size_t>(i)]);
    h = down(br.c2, h);
    h = down(br.c3, h);
    h = down(br.c4, h);
    h = br.head.forward(h);
    out.maps.push_back(sig ? ops::sigmoid(h) : h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// RmiNetwork

RmiNetwork::RmiNetwork(const TrainConfig& cfg, std::uint64_t seed) {
  n_steps_ = cfg.n_rmi;
  const int w = cfg.rmi_width;
  Rng rng(seed);
  in_conv_ = Conv2d(params_, "in", 4, w, 3, 1, 1, rng, conv_std(4, 3));
  res_ = ResidualBlock(params_, "res", w, Act::Tanh, rng);
  cell_ = ConvLstmCell(params_, "lstm", w, w, rng);
  head_ = Conv2d(params_, "head", w, 1, 3, 1, 1, rng, conv_std(w, 3));
}

Var RmiNetwork::forward(const Var& image) const {
  const int h = image.value().height();
  const int w = image.value().width();
  Var mask = Var::leaf(Tensor::zeros({1, h, w}), /*requires_grad=*/false);
  ConvLstmCell::State state = cell_.initial(h, w);
  int executed = 0;
  for (int i = 0; i < n_steps_; ++i) {
    Var x = ops::concat_ch({image, mask});
    Var t = ops::relu(in_conv_.forward(x));
    t = res_.forward(t);
    state = cell_.step(t, state);
    mask = ops::sigmoid(head_.forward(state.h));
    ++executed;
  }
  last_steps_ = executed;
  return mask;
}

Tensor RmiNetwork::infer(const Tensor& image) const { return forward(image_leaf(image)).value(); }

// ---------------------------------------------------------------------------
// FeatureNetwork

namespace {
constexpr char kFeatMagic[8] = {'R', 'C', 'F', 'E', 'A', 'T', '0', '1'};
}

FeatureNetwork::FeatureNetwork(const TrainConfig& cfg) {
  const int w = cfg.feat_width;
  Rng rng(cfg.feature_seed);
  c1_ = Conv2d(params_, "c1", 3, w, 3, 1, 1, rng, conv_std(3, 3), /*trainable=*/false);
  c2_ = Conv2d(params_, "c2", w, 2 * w, 3, 1, 1, rng, conv_std(w, 3), /*trainable=*/false);
  c3_ = Conv2d(params_, "c3", 2 * w, 2 * w, 3, 1, 1, rng, conv_std(2 * w, 3), /*trainable=*/false);

  if (!cfg.feature_weights.empty()) {
    std::ifstream in(cfg.feature_weights, std::ios::binary);
    if (!in) throw IoError("feature weights: cannot open " + cfg.feature_weights);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != std::string(kFeatMagic, 8))
      throw IoError("feature weights: bad magic in " + cfg.feature_weights);
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!in || count != params_.total_elements())
      throw IoError("feature weights: element count mismatch in " + cfg.feature_weights);
    for (Var var : params_.vars()) {
      Tensor& v = var.mutable_value();
      in.read(reinterpret_cast<char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
      if (!in) throw IoError("feature weights: truncated file " + cfg.feature_weights);
      if (!v.all_finite()) throw NumericError("feature weights: non-finite value in file");
    }
  }
}

Var FeatureNetwork::forward(const Var& image) const {
  Var h = ops::relu(c1_.forward(image));
  h = ops::avg_pool2(h);
  h = ops::relu(c2_.forward(h));
  h = ops::avg_pool2(h);
  return c3_.forward(h);
}

Tensor FeatureNetwork::infer(const Tensor& image) const {
  return forward(image_leaf(image)).value();
}

void FeatureNetwork::save_weights(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("feature weights: cannot write " + path.string());
  out.write(kFeatMagic, 8);
  const std::uint64_t count = params_.total_elements();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const ParamStore::Item& item : params_.items()) {
    const Tensor& v = item.var.value();
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!out) throw IoError("feature weights: write failed for " + path.string());
}

}  // namespace rcgan
