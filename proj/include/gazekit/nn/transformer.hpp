#pragma once

#include <string>
#include <vector>

#include "gazekit/nn/attention.hpp"
#include "gazekit/nn/layer_norm.hpp"

namespace gazekit::nn {

template <class S>
inline S gelu(S x) {
  return static_cast<S>(0.5 * static_cast<double>(x) *
                        (1.0 + std::erf(static_cast<double>(x) / std::sqrt(2.0))));
}

template <class S>
inline S gelu_grad(S x) {
  double xd = static_cast<double>(x);
  double cdf = 0.5 * (1.0 + std::erf(xd / std::sqrt(2.0)));
  double pdf = std::exp(-0.5 * xd * xd) / std::sqrt(2.0 * 3.14159265358979323846);
  return static_cast<S>(cdf + xd * pdf);
}

// Pre-norm residual block: x + MHA(LN(x)), then x + FF(LN(x)) with GELU.
template <class S>
struct TransformerLayer {
  LayerNorm<S> ln1, ln2;
  MultiHeadAttention<S> mha;
  Linear<S> ff1, ff2;
  int64_t dim = 0;

  static TransformerLayer create(ParameterStore<S>& store, const std::string& name, int64_t dim,
                                 int64_t heads, int64_t ff_dim, Rng& rng) {
    TransformerLayer l;
    l.dim = dim;
    l.ln1 = LayerNorm<S>::create(store, name + ".ln1", dim);
    l.ln2 = LayerNorm<S>::create(store, name + ".ln2", dim);
    l.mha = MultiHeadAttention<S>::create(store, name + ".attn", dim, heads, rng);
    l.ff1 = Linear<S>::create(store, name + ".ff1", dim, ff_dim, rng);
    l.ff2 = Linear<S>::create(store, name + ".ff2", ff_dim, dim, rng);
    return l;
  }

  static TransformerLayer attach(const ParameterStore<S>& store, const std::string& name,
                                 int64_t heads) {
    TransformerLayer l;
    l.ln1 = LayerNorm<S>::attach(store, name + ".ln1");
    l.ln2 = LayerNorm<S>::attach(store, name + ".ln2");
    l.mha = MultiHeadAttention<S>::attach(store, name + ".attn", heads);
    l.ff1 = Linear<S>::attach(store, name + ".ff1");
    l.ff2 = Linear<S>::attach(store, name + ".ff2");
    l.dim = l.ln1.dim;
    return l;
  }

  struct Cache {
    typename LayerNorm<S>::Cache cln1, cln2;
    typename MultiHeadAttention<S>::Cache cmha;
    typename Linear<S>::Cache cff1, cff2;
    Tensor<S> ff_pre;  // pre-GELU activations
  };

  Tensor<S> forward(const ParameterStore<S>& store, const Tensor<S>& x, Cache* cache = nullptr) const {
    Cache local;
    Cache& c = cache ? *cache : local;
    Tensor<S> n1 = ln1.forward(store, x, cache ? &c.cln1 : nullptr);
    Tensor<S> a = mha.forward(store, n1, cache ? &c.cmha : nullptr);
    Tensor<S> y1 = x;
    axpy(S(1), a, y1);

    Tensor<S> n2 = ln2.forward(store, y1, cache ? &c.cln2 : nullptr);
    Tensor<S> h = ff1.forward(store, n2, cache ? &c.cff1 : nullptr);
    c.ff_pre = h;
    for (int64_t i = 0; i < h.size(); ++i) h[i] = gelu(h[i]);
    Tensor<S> f = ff2.forward(store, h, cache ? &c.cff2 : nullptr);
    axpy(S(1), f, y1);
    return y1;
  }

  Tensor<S> backward(ParameterStore<S>& store, const Tensor<S>& dy, const Cache& c) const {
    // feed-forward branch
    Tensor<S> dh = ff2.backward(store, dy, c.cff2);
    for (int64_t i = 0; i < dh.size(); ++i) dh[i] *= gelu_grad(c.ff_pre[i]);
    Tensor<S> dn2 = ff1.backward(store, dh, c.cff1);
    Tensor<S> dy1 = ln2.backward(store, dn2, c.cln2);
    axpy(S(1), dy, dy1);  // residual

    // attention branch
    Tensor<S> dn1 = mha.backward(store, dy1, c.cmha);
    Tensor<S> dx = ln1.backward(store, dn1, c.cln1);
    axpy(S(1), dy1, dx);  // residual
    return dx;
  }
};

// Stack of identical layers.
template <class S>
struct TransformerEncoder {
  std::vector<TransformerLayer<S>> layers;

  static TransformerEncoder create(ParameterStore<S>& store, const std::string& name, int64_t n_layers,
                                   int64_t dim, int64_t heads, int64_t ff_dim, Rng& rng) {
    TransformerEncoder e;
    for (int64_t i = 0; i < n_layers; ++i) {
      e.layers.push_back(
          TransformerLayer<S>::create(store, name + ".layer" + std::to_string(i), dim, heads, ff_dim, rng));
    }
    return e;
  }

  static TransformerEncoder attach(const ParameterStore<S>& store, const std::string& name,
                                   int64_t n_layers, int64_t heads) {
    TransformerEncoder e;
    for (int64_t i = 0; i < n_layers; ++i) {
      e.layers.push_back(
          TransformerLayer<S>::attach(store, name + ".layer" + std::to_string(i), heads));
    }
    return e;
  }

  struct Cache {
    std::vector<typename TransformerLayer<S>::Cache> layer_caches;
  };

  Tensor<S> forward(const ParameterStore<S>& store, const Tensor<S>& x, Cache* cache = nullptr) const {
    Tensor<S> cur = x;
    if (cache) cache->layer_caches.resize(layers.size());
    for (size_t i = 0; i < layers.size(); ++i) {
      cur = layers[i].forward(store, cur, cache ? &cache->layer_caches[i] : nullptr);
    }
    return cur;
  }

  Tensor<S> backward(ParameterStore<S>& store, const Tensor<S>& dy, const Cache& cache) const {
    Tensor<S> cur = dy;
    for (size_t i = layers.size(); i-- > 0;) {
      cur = layers[i].backward(store, cur, cache.layer_caches[i]);
    }
    return cur;
  }
};

}  // namespace gazekit::nn
