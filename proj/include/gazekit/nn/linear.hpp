#pragma once

#include <string>

#include "gazekit/param_store.hpp"
#include "gazekit/rng.hpp"

namespace gazekit::nn {

template <class S>
void init_uniform_fan_in(Tensor<S>& w, int64_t fan_in, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (int64_t i = 0; i < w.size(); ++i) w[i] = static_cast<S>(rng.uniform(-bound, bound));
}

// y = x W + b, parameters owned by a ParameterStore under <name>.W / <name>.b.
template <class S>
struct Linear {
  std::string w_name, b_name;
  int64_t in = 0, out = 0;

  static Linear create(ParameterStore<S>& store, const std::string& name, int64_t in, int64_t out,
                       Rng& rng) {
    Linear l;
    l.w_name = name + ".W";
    l.b_name = name + ".b";
    l.in = in;
    l.out = out;
    auto& w = store.add(l.w_name, {in, out});
    init_uniform_fan_in(w, in, rng);
    store.add(l.b_name, {out});
    return l;
  }

  // References an already-populated store (e.g. loaded from a checkpoint).
  static Linear attach(const ParameterStore<S>& store, const std::string& name) {
    Linear l;
    l.w_name = name + ".W";
    l.b_name = name + ".b";
    const auto& w = store.value(l.w_name);
    l.in = w.dim(0);
    l.out = w.dim(1);
    return l;
  }

  struct Cache {
    Tensor<S> x;
  };

  Tensor<S> forward(const ParameterStore<S>& store, const Tensor<S>& x, Cache* cache = nullptr) const {
    require(x.rank() == 2 && x.cols() == in, "linear ", w_name, ": input width ", x.cols(),
            " != ", in);
    const Tensor<S>& w = store.value(w_name);
    const Tensor<S>& b = store.value(b_name);
    Tensor<S> y = Tensor<S>::matrix(x.rows(), out);
    for (int64_t i = 0; i < y.rows(); ++i) {
      S* row = y.row_ptr(i);
      for (int64_t j = 0; j < out; ++j) row[j] = b[j];
    }
    matmul_acc(x, w, y);
    if (cache) cache->x = x;
    return y;
  }

  // Accumulates dW/db into the store, returns dx.
  Tensor<S> backward(ParameterStore<S>& store, const Tensor<S>& dy, const Cache& cache) const {
    require(dy.rank() == 2 && dy.cols() == out, "linear ", w_name, ": bad upstream gradient");
    Tensor<S>& dw = store.grad(w_name);
    Tensor<S>& db = store.grad(b_name);
    matmul_tn_acc(cache.x, dy, dw);
    for (int64_t i = 0; i < dy.rows(); ++i) {
      const S* row = dy.row_ptr(i);
      for (int64_t j = 0; j < out; ++j) db[j] += row[j];
    }
    Tensor<S> dx = Tensor<S>::matrix(dy.rows(), in);
    matmul_nt_acc(dy, store.value(w_name), dx);
    return dx;
  }
};

}  // namespace gazekit::nn
