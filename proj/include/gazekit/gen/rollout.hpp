#pragma once

#include <vector>

#include "gazekit/audio/features.hpp"
#include "gazekit/gen/generator.hpp"
#include "gazekit/motion/normalize.hpp"
#include "gazekit/motion/ops.hpp"
#include "gazekit/style/encoder.hpp"

namespace gazekit::gen {

enum class StyleMode { kRecompute, kFixed };

inline const char* style_mode_name(StyleMode m) {
  return m == StyleMode::kRecompute ? "recompute" : "fixed";
}

template <class S>
struct StyleSource {
  StyleMode mode = StyleMode::kRecompute;
  Tensor<S> fixed;  // used when mode == kFixed
  const style::StyleEncoder<S>* encoder = nullptr;
  const ParameterStore<S>* encoder_store = nullptr;
};

// Sliding-window autoregression with stride N: predict N frames from the
// current M-frame history (normalized space), append, slide. Consumes
// floor((T - M) / N) steps; output rows align with feature frames
// M .. M + steps * N - 1. Returned motion is denormalized.
template <class S>
Tensor<S> rollout(const Generator<S>& gen, const ParameterStore<S>& gen_store,
                  const Tensor<S>& seed_window, const Tensor<S>& feats,
                  const StyleSource<S>& style_src, const motion::NormalizationStats& stats) {
  const auto& cfg = gen.cfg;
  require(seed_window.rank() == 2 && seed_window.rows() == cfg.m_len &&
              seed_window.cols() == motion::kMotionDims,
          "rollout: seed window must be M x 7");
  require(feats.rank() == 2 && feats.cols() == cfg.feature_dim, "rollout: feature width mismatch");
  const int64_t t_total = feats.rows();
  require(t_total >= cfg.m_len + cfg.n_len, "rollout: features of ", t_total,
          " frames shorter than M + N = ", cfg.m_len + cfg.n_len);
  if (cfg.d_s > 0 && style_src.mode == StyleMode::kRecompute) {
    require(style_src.encoder && style_src.encoder_store, "rollout: recompute mode needs an encoder");
  }

  const int64_t steps = (t_total - cfg.m_len) / cfg.n_len;
  Tensor<S> history = seed_window;
  Tensor<S> out = Tensor<S>::matrix(steps * cfg.n_len, motion::kMotionDims);

  for (int64_t k = 0; k < steps; ++k) {
    Tensor<S> style;
    if (cfg.d_s > 0) {
      if (style_src.mode == StyleMode::kFixed) {
        style = style_src.fixed;
      } else {
        style = style_src.encoder->encode_window(*style_src.encoder_store, history);
      }
    }
    Tensor<S> audio_win = Tensor<S>::matrix(cfg.m_len, cfg.feature_dim);
    const int64_t a0 = k * cfg.n_len;
    for (int64_t i = 0; i < cfg.m_len; ++i) {
      for (int64_t j = 0; j < cfg.feature_dim; ++j) audio_win.at(i, j) = feats.at(a0 + i, j);
    }
    Tensor<S> z = gen.fuse_inputs(gen_store, audio_win, history, style);
    Tensor<S> pred = gen.predict_window(gen_store, z);

    for (int64_t i = 0; i < cfg.n_len; ++i) {
      for (int c = 0; c < motion::kMotionDims; ++c) out.at(k * cfg.n_len + i, c) = pred.at(i, c);
    }
    // slide: history <- last M frames of [history | pred]
    Tensor<S> next = Tensor<S>::matrix(cfg.m_len, motion::kMotionDims);
    for (int64_t i = 0; i < cfg.m_len; ++i) {
      const int64_t src = i + cfg.n_len;
      for (int c = 0; c < motion::kMotionDims; ++c) {
        next.at(i, c) = (src < cfg.m_len) ? history.at(src, c) : pred.at(src - cfg.m_len, c);
      }
    }
    history = std::move(next);
  }

  motion::denormalize_rows(out, stats);
  return out;
}

// Rollout with the style fixed to the mean embedding of the reference
// motion's windows (reference given in normalized space).
template <class S>
Tensor<S> style_transfer_rollout(const Generator<S>& gen, const ParameterStore<S>& gen_store,
                                 const Tensor<S>& seed_window, const Tensor<S>& feats,
                                 const style::StyleEncoder<S>& encoder,
                                 const ParameterStore<S>& encoder_store,
                                 const Tensor<S>& reference_motion,
                                 const motion::NormalizationStats& stats) {
  const int64_t m_len = gen.cfg.m_len;
  require(reference_motion.rank() == 2 && reference_motion.rows() >= m_len,
          "style transfer: reference motion shorter than M");
  int64_t n_windows = 0;
  Tensor<S> mean_style = Tensor<S>::vector(gen.cfg.d_s);
  for (int64_t s = 0; s + m_len <= reference_motion.rows(); s += m_len) {
    Tensor<S> win = Tensor<S>::matrix(m_len, motion::kMotionDims);
    for (int64_t i = 0; i < m_len; ++i) {
      for (int c = 0; c < motion::kMotionDims; ++c) win.at(i, c) = reference_motion.at(s + i, c);
    }
    Tensor<S> e = encoder.encode_window(encoder_store, win);
    axpy(S(1), e, mean_style);
    ++n_windows;
  }
  for (int64_t j = 0; j < mean_style.size(); ++j) {
    mean_style[j] /= static_cast<S>(n_windows);
  }
  StyleSource<S> src;
  src.mode = StyleMode::kFixed;
  src.fixed = std::move(mean_style);
  return rollout(gen, gen_store, seed_window, feats, src, stats);
}

}  // namespace gazekit::gen
