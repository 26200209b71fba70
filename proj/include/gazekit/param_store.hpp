#pragma once

#include <map>
#include <string>
#include <vector>

#include "gazekit/tensor.hpp"

namespace gazekit {

template <class S>
struct Param {
  Tensor<S> value;
  Tensor<S> grad;
  bool trainable = true;
};

// Named parameter collection with a gradient slot per entry. Ordered by name
// so that every iteration (optimizer step, serialization, gradient checks)
// is deterministic.
template <class S>
class ParameterStore {
 public:
  Tensor<S>& add(const std::string& name, std::vector<int64_t> shape, bool trainable = true) {
    require(!params_.count(name), "duplicate parameter name: ", name);
    Param<S> p;
    p.value = Tensor<S>(shape);
    p.grad = Tensor<S>(std::move(shape));
    p.trainable = trainable;
    auto [it, ok] = params_.emplace(name, std::move(p));
    (void)ok;
    return it->second.value;
  }

  bool has(const std::string& name) const { return params_.count(name) > 0; }

  Param<S>& param(const std::string& name) {
    auto it = params_.find(name);
    require(it != params_.end(), "unknown parameter: ", name);
    return it->second;
  }
  const Param<S>& param(const std::string& name) const {
    auto it = params_.find(name);
    require(it != params_.end(), "unknown parameter: ", name);
    return it->second;
  }

  Tensor<S>& value(const std::string& name) { return param(name).value; }
  const Tensor<S>& value(const std::string& name) const { return param(name).value; }
  Tensor<S>& grad(const std::string& name) { return param(name).grad; }
  const Tensor<S>& grad(const std::string& name) const { return param(name).grad; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(params_.size());
    for (const auto& [k, v] : params_) out.push_back(k);
    return out;
  }

  size_t count() const { return params_.size(); }

  void zero_grads() {
    for (auto& [k, p] : params_) p.grad.fill(S(0));
  }

  // Sum of squared gradient entries over trainable parameters.
  double grad_sq_norm() const {
    double acc = 0.0;
    for (const auto& [k, p] : params_) {
      if (!p.trainable) continue;
      for (int64_t i = 0; i < p.grad.size(); ++i) {
        double g = static_cast<double>(p.grad[i]);
        acc += g * g;
      }
    }
    return acc;
  }

  void scale_grads(S factor) {
    for (auto& [k, p] : params_) {
      if (!p.trainable) continue;
      for (int64_t i = 0; i < p.grad.size(); ++i) p.grad[i] *= factor;
    }
  }

  // Accumulate other's grads into this store (shapes and names must match
  // where present in both). Used for fixed-order batch reduction.
  void add_grads_from(const ParameterStore& other) {
    for (auto& [k, p] : params_) {
      auto it = other.params_.find(k);
      if (it == other.params_.end()) continue;
      axpy(S(1), it->second.grad, p.grad);
    }
  }

  template <class T>
  ParameterStore<T> cast() const {
    ParameterStore<T> out;
    for (const auto& [k, p] : params_) {
      auto& v = out.add(k, p.value.shape(), p.trainable);
      for (int64_t i = 0; i < p.value.size(); ++i) v[i] = static_cast<T>(p.value[i]);
    }
    return out;
  }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, Param<S>> params_;
};

template <class S>
bool bitwise_equal(const ParameterStore<S>& a, const ParameterStore<S>& b) {
  if (a.count() != b.count()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!bitwise_equal(ia->second.value, ib->second.value)) return false;
  }
  return true;
}

}  // namespace gazekit
