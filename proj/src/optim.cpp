#include "rcgan/optim.hpp"

#include <cmath>

#include "rcgan/errors.hpp"

namespace rcgan {

Adam::Adam(std::vector<Var> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Var& p : params_) {
    m_.push_back(Tensor::zeros(p.value().dims()));
    v_.push_back(Tensor::zeros(p.value().dims()));
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& value = params_[i].mutable_value();
    const Tensor& grad = params_[i].grad();
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    const bool has_grad = !grad.empty();
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = has_grad ? grad[k] : 0.0;
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g;
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g * g;
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      value[k] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
    if (!value.all_finite()) throw NumericError("Adam: non-finite parameter after update");
  }
  zero_grads();
}

void Adam::zero_grads() {
  for (Var& p : params_) p.zero_grad();
}

std::size_t Adam::state_elements() const {
  std::size_t n = 0;
  for (const Var& p : params_) n += 2 * p.value().size();
  return n;
}

void Adam::append_state(std::vector<double>& out) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    out.insert(out.end(), m_[i].data(), m_[i].data() + m_[i].size());
    out.insert(out.end(), v_[i].data(), v_[i].data() + v_[i].size());
  }
}

void Adam::load_state(const std::vector<double>& flat, std::size_t& cursor, std::uint64_t t) {
  if (cursor + state_elements() > flat.size())
    throw IoError("Adam: optimizer state shorter than expected");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    for (std::size_t k = 0; k < m_[i].size(); ++k) m_[i][k] = flat[cursor++];
    for (std::size_t k = 0; k < v_[i].size(); ++k) v_[i][k] = flat[cursor++];
  }
  t_ = t;
}

}  // namespace rcgan
