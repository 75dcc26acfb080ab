#include "rcgan/nn.hpp"

#include <cmath>

namespace rcgan {

Var apply_act(const Var& x, Act a) {
  switch (a) {
    case Act::Relu:
      return ops::relu(x);
    case Act::LeakyRelu02:
      return ops::leaky_relu(x, 0.2);
    case Act::Sigmoid:
      return ops::sigmoid(x);
    case Act::Tanh:
      return ops::tanh(x);
    case Act::None:
      return x;
  }
  return x;
}

Var ParamStore::add(const std::string& name, Tensor init, bool trainable) {
  for (const Item& it : items_)
    if (it.name == name)
      throw std::invalid_argument("param store: duplicate parameter name '" + name + "'");
  Var v = Var::leaf(std::move(init), trainable);
  items_.push_back({name, v});
  return v;
}

std::vector<Var> ParamStore::vars() const {
  std::vector<Var> out;
  out.reserve(items_.size());
  for (const Item& it : items_) out.push_back(it.var);
  return out;
}

std::size_t ParamStore::total_elements() const {
  std::size_t n = 0;
  for (const Item& it : items_) n += it.var.value().size();
  return n;
}

std::uint64_t ParamStore::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const Item& it : items_) h = tensor_checksum(it.var.value(), h);
  return h;
}

void ParamStore::zero_grads() {
  for (Item& it : items_) it.var.zero_grad();
}

void ParamStore::load_values(const std::vector<std::pair<std::string, Tensor>>& named,
                             std::size_t& cursor) {
  for (Item& it : items_) {
    if (cursor >= named.size()) throw IoError("parameter blob shorter than model");
    const auto& [name, t] = named[cursor];
    if (name != it.name) throw IoError("parameter name mismatch: " + name + " vs " + it.name);
    check_same_dims(t, it.var.value(), "ParamStore::load_values");
    it.var.mutable_value() = t;
    ++cursor;
  }
}

void ParamStore::append_values(std::vector<std::pair<std::string, Tensor>>& out) const {
  for (const Item& it : items_) out.emplace_back(it.name, it.var.value());
}

namespace {

Tensor normal_tensor(std::vector<int> dims, Rng& rng, double stddev) {
  Tensor t(std::move(dims));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal(0.0, stddev);
  return t;
}

}  // namespace

Conv2d::Conv2d(ParamStore& ps, const std::string& name, int in_c, int out_c, int k, int stride,
               int pad, Rng& rng, double init_std, bool trainable)
    : stride_(stride), pad_(pad) {
  w_ = ps.add(name + ".w", normal_tensor({out_c, in_c, k, k}, rng, init_std), trainable);
  b_ = ps.add(name + ".b", Tensor::zeros({out_c}), trainable);
}

ConvTranspose2d::ConvTranspose2d(ParamStore& ps, const std::string& name, int in_c, int out_c,
                                 int k, int stride, int pad, int out_pad, Rng& rng,
                                 double init_std, bool trainable)
    : stride_(stride), pad_(pad), out_pad_(out_pad) {
  w_ = ps.add(name + ".w", normal_tensor({in_c, out_c, k, k}, rng, init_std), trainable);
  b_ = ps.add(name + ".b", Tensor::zeros({out_c}), trainable);
}

ResidualBlock::ResidualBlock(ParamStore& ps, const std::string& name, int channels, Act act,
                             Rng& rng)
    : act_(act) {
  const double std = std::sqrt(2.0 / (9.0 * channels));
  c1_ = Conv2d(ps, name + ".c1", channels, channels, 3, 1, 1, rng, std);
  c2_ = Conv2d(ps, name + ".c2", channels, channels, 3, 1, 1, rng, std);
}

Var ResidualBlock::forward(const Var& x) const {
  return ops::add(x, c2_.forward(apply_act(c1_.forward(x), act_)));
}

ConvLstmCell::ConvLstmCell(ParamStore& ps, const std::string& name, int in_c, int hidden, Rng& rng)
    : hidden_(hidden) {
  const double std = std::sqrt(1.0 / (9.0 * (in_c + hidden)));
  gates_ = Conv2d(ps, name + ".gates", in_c + hidden, 4 * hidden, 3, 1, 1, rng, std);
}

ConvLstmCell::State ConvLstmCell::initial(int height, int width) const {
  return {Var::leaf(Tensor::zeros({hidden_, height, width})),
          Var::leaf(Tensor::zeros({hidden_, height, width}))};
}

ConvLstmCell::State ConvLstmCell::step(const Var& x, const State& s) const {
  Var g = gates_.forward(ops::concat_ch({x, s.h}));
  Var i = ops::sigmoid(ops::slice_ch(g, 0, hidden_));
  Var f = ops::sigmoid(ops::slice_ch(g, hidden_, 2 * hidden_));
  Var o = ops::sigmoid(ops::slice_ch(g, 2 * hidden_, 3 * hidden_));
  Var u = ops::tanh(ops::slice_ch(g, 3 * hidden_, 4 * hidden_));
  Var c = ops::add(ops::mul(f, s.c), ops::mul(i, u));
  Var h = ops::mul(o, ops::tanh(c));
  return {h, c};
}

}  // namespace rcgan
