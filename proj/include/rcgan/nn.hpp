#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rcgan/ops.hpp"
#include "rcgan/rng.hpp"

namespace rcgan {

enum class Act { Relu, LeakyRelu02, Sigmoid, Tanh, None };

Var apply_act(const Var& x, Act a);

// Ordered registry of named parameter leaves. The order is the canonical
// serialization order for checkpoints and optimizer state.
class ParamStore {
 public:
  struct Item {
    std::string name;
    Var var;
  };

  Var add(const std::string& name, Tensor init, bool trainable = true);

  const std::vector<Item>& items() const { return items_; }
  std::vector<Var> vars() const;

  std::size_t total_elements() const;
  std::uint64_t checksum() const;
  void zero_grads();

  // Copies values by position; dims must agree.
  void load_values(const std::vector<std::pair<std::string, Tensor>>& named, std::size_t& cursor);
  void append_values(std::vector<std::pair<std::string, Tensor>>& out) const;

 private:
  std::vector<Item> items_;
};

class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(ParamStore& ps, const std::string& name, int in_c, int out_c, int k, int stride, int pad,
         Rng& rng, double init_std, bool trainable = true);
  Var forward(const Var& x) const { return ops::conv2d(x, w_, b_, stride_, pad_); }
  // Same weights, caller-chosen padding (tiny-input handling in the
  // discriminator pyramid).
  Var forward_with_pad(const Var& x, int pad) const {
    return ops::conv2d(x, w_, b_, stride_, pad);
  }

 private:
  Var w_, b_;
  int stride_ = 1, pad_ = 0;
};

class ConvTranspose2d {
 public:
  ConvTranspose2d() = default;
  ConvTranspose2d(ParamStore& ps, const std::string& name, int in_c, int out_c, int k, int stride,
                  int pad, int out_pad, Rng& rng, double init_std, bool trainable = true);
  Var forward(const Var& x) const {
    return ops::conv_transpose2d(x, w_, b_, stride_, pad_, out_pad_);
  }

 private:
  Var w_, b_;
  int stride_ = 2, pad_ = 1, out_pad_ = 1;
};

// x + conv2(act(conv1(x))), 3x3 kernels, shape preserving.
class ResidualBlock {
 public:
  ResidualBlock() = default;
  ResidualBlock(ParamStore& ps, const std::string& name, int channels, Act act, Rng& rng);
  Var forward(const Var& x) const;

 private:
  Conv2d c1_, c2_;
  Act act_ = Act::Relu;
};

// Convolutional LSTM cell: one 3x3 conv maps concat(x, h) to the four gates.
class ConvLstmCell {
 public:
  struct State {
    Var h, c;
  };

  ConvLstmCell() = default;
  ConvLstmCell(ParamStore& ps, const std::string& name, int in_c, int hidden, Rng& rng);

  State initial(int height, int width) const;
  State step(const Var& x, const State& s) const;
  int hidden() const { return hidden_; }

 private:
  Conv2d gates_;
  int hidden_ = 0;
};

}  // namespace rcgan
