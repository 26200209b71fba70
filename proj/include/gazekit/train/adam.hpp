#pragma once

#include <map>
#include <string>

#include "gazekit/param_store.hpp"

namespace gazekit::train {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected adaptive moment update. Gradients are zeroed after each
// step. Moments are exposed so checkpoints can resume bitwise.
template <class S>
class Adam {
 public:
  explicit Adam(AdamConfig cfg = AdamConfig()) : cfg_(cfg) {}

  AdamConfig& config() { return cfg_; }
  const AdamConfig& config() const { return cfg_; }
  int64_t step_count() const { return step_; }
  void set_step_count(int64_t s) { step_ = s; }

  std::map<std::string, Tensor<S>>& moments1() { return m_; }
  std::map<std::string, Tensor<S>>& moments2() { return v_; }
  const std::map<std::string, Tensor<S>>& moments1() const { return m_; }
  const std::map<std::string, Tensor<S>>& moments2() const { return v_; }

  void step(ParameterStore<S>& store) {
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (auto& [name, p] : store) {
      if (!p.trainable) continue;
      for (int64_t i = 0; i < p.grad.size(); ++i) {
        require(is_finite(p.grad[i]), "adam: NaN/Inf gradient in parameter '", name, "'");
      }
      auto mit = m_.find(name);
      if (mit == m_.end()) {
        mit = m_.emplace(name, Tensor<S>(p.value.shape())).first;
        v_.emplace(name, Tensor<S>(p.value.shape()));
      }
      Tensor<S>& m = mit->second;
      Tensor<S>& v = v_.at(name);
      for (int64_t i = 0; i < p.value.size(); ++i) {
        const double g = static_cast<double>(p.grad[i]);
        const double mi = cfg_.beta1 * static_cast<double>(m[i]) + (1.0 - cfg_.beta1) * g;
        const double vi = cfg_.beta2 * static_cast<double>(v[i]) + (1.0 - cfg_.beta2) * g * g;
        m[i] = static_cast<S>(mi);
        v[i] = static_cast<S>(vi);
        const double mhat = mi / bc1;
        const double vhat = vi / bc2;
        p.value[i] = static_cast<S>(static_cast<double>(p.value[i]) -
                                    cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
      }
    }
    store.zero_grads();
  }

 private:
  AdamConfig cfg_;
  int64_t step_ = 0;
  std::map<std::string, Tensor<S>> m_, v_;
};

// Global-norm gradient clipping; returns the pre-clip norm.
template <class S>
double clip_gradients(ParameterStore<S>& store, double max_norm, bool* clipped = nullptr) {
  const double norm = std::sqrt(store.grad_sq_norm());
  const bool clip = max_norm > 0 && norm > max_norm;
  if (clip) store.scale_grads(static_cast<S>(max_norm / norm));
  if (clipped) *clipped = clip;
  return norm;
}

}  // namespace gazekit::train
