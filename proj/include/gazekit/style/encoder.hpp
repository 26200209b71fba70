#pragma once

#include <string>

#include "gazekit/motion/types.hpp"
#include "gazekit/nn/linear.hpp"
#include "gazekit/nn/temporal_encoding.hpp"
#include "gazekit/nn/transformer.hpp"

namespace gazekit::style {

struct StyleEncoderConfig {
  int64_t d_s = 64;       // embedding width; the encoder runs at this model dim
  int64_t n_layers = 2;
  int64_t n_heads = 4;
  int64_t ff_dim = 128;
  int64_t window = 25;    // M

  void validate() const {
    require(d_s >= 2 && d_s % 2 == 0, "style encoder: d_s must be even and >= 2");
    require(d_s % n_heads == 0, "style encoder: d_s ", d_s, " not divisible by heads ", n_heads);
    require(n_layers >= 1 && ff_dim >= 1 && window >= 2, "style encoder: bad config");
  }
};

// Window -> fixed-length style vector: mean over time of
// TransformerEncoder(TemporalEncoding(Linear(x))).
template <class S>
struct StyleEncoder {
  StyleEncoderConfig cfg;
  nn::Linear<S> input_proj;
  nn::TransformerEncoder<S> encoder;

  static StyleEncoder create(ParameterStore<S>& store, const StyleEncoderConfig& cfg, Rng& rng) {
    cfg.validate();
    StyleEncoder e;
    e.cfg = cfg;
    e.input_proj = nn::Linear<S>::create(store, "se.in", motion::kMotionDims, cfg.d_s, rng);
    e.encoder = nn::TransformerEncoder<S>::create(store, "se.enc", cfg.n_layers, cfg.d_s,
                                                  cfg.n_heads, cfg.ff_dim, rng);
    return e;
  }

  static StyleEncoder attach(const ParameterStore<S>& store, const StyleEncoderConfig& cfg) {
    cfg.validate();
    StyleEncoder e;
    e.cfg = cfg;
    e.input_proj = nn::Linear<S>::attach(store, "se.in");
    e.encoder = nn::TransformerEncoder<S>::attach(store, "se.enc", cfg.n_layers, cfg.n_heads);
    return e;
  }

  struct Cache {
    typename nn::Linear<S>::Cache cin;
    typename nn::TransformerEncoder<S>::Cache cenc;
    int64_t t_len = 0;
  };

  // x: M x 7 (normalized motion). Returns the d_s-wide style embedding.
  Tensor<S> encode_window(const ParameterStore<S>& store, const Tensor<S>& x,
                          Cache* cache = nullptr) const {
    require(x.rank() == 2 && x.cols() == motion::kMotionDims, "encode_window: want M x 7 input");
    require(x.rows() == cfg.window, "encode_window: window length ", x.rows(),
            " != configured M = ", cfg.window);
    Cache local;
    Cache& c = cache ? *cache : local;
    c.t_len = x.rows();
    Tensor<S> h = input_proj.forward(store, x, cache ? &c.cin : nullptr);
    nn::add_temporal_encoding(h);
    Tensor<S> enc = encoder.forward(store, h, cache ? &c.cenc : nullptr);
    Tensor<S> s = Tensor<S>::vector(cfg.d_s);
    for (int64_t t = 0; t < enc.rows(); ++t) {
      const S* row = enc.row_ptr(t);
      for (int64_t j = 0; j < cfg.d_s; ++j) s[j] += row[j];
    }
    const S inv = static_cast<S>(1.0 / static_cast<double>(enc.rows()));
    for (int64_t j = 0; j < cfg.d_s; ++j) s[j] *= inv;
    return s;
  }

  // ds: gradient w.r.t. the embedding. Returns gradient w.r.t. the window.
  Tensor<S> backward(ParameterStore<S>& store, const Tensor<S>& ds, const Cache& c) const {
    Tensor<S> denc = Tensor<S>::matrix(c.t_len, cfg.d_s);
    const S inv = static_cast<S>(1.0 / static_cast<double>(c.t_len));
    for (int64_t t = 0; t < c.t_len; ++t) {
      S* row = denc.row_ptr(t);
      for (int64_t j = 0; j < cfg.d_s; ++j) row[j] = ds[j] * inv;
    }
    Tensor<S> dh = encoder.backward(store, denc, c.cenc);
    return input_proj.backward(store, dh, c.cin);
  }
};

// a^T b / (|a| |b|); rejects zero vectors.
template <class S>
double cosine_sim(const Tensor<S>& a, const Tensor<S>& b) {
  require(a.shape() == b.shape(), "cosine_sim: shape mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    aa += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    bb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  require(aa > 0 && bb > 0, "cosine_sim: undefined similarity for zero vector");
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

}  // namespace gazekit::style
