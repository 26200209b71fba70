#pragma once

#include <string>

#include "gazekit/motion/types.hpp"
#include "gazekit/nn/linear.hpp"
#include "gazekit/nn/lstm.hpp"

namespace gazekit::gen {

struct GenerationConfig {
  int64_t m_len = 25;       // past window length M (1 s at 25 fps)
  int64_t n_len = 10;       // prediction length N
  int64_t d = 64;           // fused projection width
  int64_t d_s = 64;         // style width; 0 disables style conditioning
  int64_t feature_dim = 26; // audio feature width F
  double lambda = 0.8;      // loss mix: lambda * mse + (1 - lambda) * vel
  nn::LstmStackConfig lstm{3, 128, 0};  // input_dim derived below

  int64_t fused_width() const { return 2 * d + d_s; }

  void validate() const {
    require(m_len >= 2 && n_len >= 1, "generator: need M >= 2, N >= 1");
    require(n_len <= m_len, "generator: prediction head reads the last N of M hidden states; need N <= M");
    require(lambda >= 0.0 && lambda <= 1.0, "generator: lambda must lie in [0, 1]");
    require(d >= 1 && d_s >= 0 && feature_dim >= 1, "generator: bad widths");
    require(lstm.n_layers >= 1 && lstm.hidden >= 1, "generator: bad LSTM config");
  }
};

// Audio + motion history + broadcast style, concatenated along features:
// Z = [Linear_a(audio) | Linear_x(motion) | s] with Z in M x (2d + d_s).
template <class S>
struct Generator {
  GenerationConfig cfg;
  nn::Linear<S> audio_proj;
  nn::Linear<S> motion_proj;
  nn::LstmStack<S> lstm;
  nn::Linear<S> head;

  static Generator create(ParameterStore<S>& store, GenerationConfig cfg, Rng& rng) {
    cfg.lstm.input_dim = cfg.fused_width();
    cfg.validate();
    Generator g;
    g.cfg = cfg;
    g.audio_proj = nn::Linear<S>::create(store, "gen.audio", cfg.feature_dim, cfg.d, rng);
    g.motion_proj = nn::Linear<S>::create(store, "gen.motion", motion::kMotionDims, cfg.d, rng);
    g.lstm = nn::LstmStack<S>::create(store, "gen.lstm", cfg.lstm, rng);
    g.head = nn::Linear<S>::create(store, "gen.head", cfg.lstm.hidden, motion::kMotionDims, rng);
    return g;
  }

  static Generator attach(const ParameterStore<S>& store, GenerationConfig cfg) {
    cfg.lstm.input_dim = cfg.fused_width();
    cfg.validate();
    Generator g;
    g.cfg = cfg;
    g.audio_proj = nn::Linear<S>::attach(store, "gen.audio");
    g.motion_proj = nn::Linear<S>::attach(store, "gen.motion");
    g.lstm = nn::LstmStack<S>::attach(store, "gen.lstm", cfg.lstm);
    g.head = nn::Linear<S>::attach(store, "gen.head");
    return g;
  }

  struct FuseCache {
    typename nn::Linear<S>::Cache ca, cx;
  };

  Tensor<S> fuse_inputs(const ParameterStore<S>& store, const Tensor<S>& audio_win,
                        const Tensor<S>& motion_win, const Tensor<S>& style,
                        FuseCache* cache = nullptr) const {
    require(audio_win.rank() == 2 && audio_win.cols() == cfg.feature_dim,
            "fuse: audio width ", audio_win.cols(), " != ", cfg.feature_dim);
    require(motion_win.rank() == 2 && motion_win.cols() == motion::kMotionDims, "fuse: motion width");
    require(audio_win.rows() == motion_win.rows(), "fuse: audio rows ", audio_win.rows(),
            " != motion rows ", motion_win.rows());
    if (cfg.d_s > 0) {
      require(style.rank() == 1 && style.dim(0) == cfg.d_s, "fuse: style width ",
              style.size(), " != ", cfg.d_s);
    }
    FuseCache local;
    FuseCache& c = cache ? *cache : local;
    const int64_t m_rows = audio_win.rows();
    Tensor<S> a = audio_proj.forward(store, audio_win, cache ? &c.ca : nullptr);
    Tensor<S> x = motion_proj.forward(store, motion_win, cache ? &c.cx : nullptr);
    Tensor<S> z = Tensor<S>::matrix(m_rows, cfg.fused_width());
    for (int64_t i = 0; i < m_rows; ++i) {
      S* row = z.row_ptr(i);
      const S* ar = a.row_ptr(i);
      const S* xr = x.row_ptr(i);
      for (int64_t j = 0; j < cfg.d; ++j) row[j] = ar[j];
      for (int64_t j = 0; j < cfg.d; ++j) row[cfg.d + j] = xr[j];
      for (int64_t j = 0; j < cfg.d_s; ++j) row[2 * cfg.d + j] = style[j];
    }
    return z;
  }

  // dz -> projection grads; returns gradient w.r.t. the broadcast style.
  Tensor<S> fuse_backward(ParameterStore<S>& store, const Tensor<S>& dz, const FuseCache& c) const {
    const int64_t m_rows = dz.rows();
    Tensor<S> da = Tensor<S>::matrix(m_rows, cfg.d);
    Tensor<S> dx = Tensor<S>::matrix(m_rows, cfg.d);
    Tensor<S> dstyle = Tensor<S>::vector(std::max<int64_t>(cfg.d_s, 1));
    for (int64_t i = 0; i < m_rows; ++i) {
      const S* row = dz.row_ptr(i);
      S* ar = da.row_ptr(i);
      S* xr = dx.row_ptr(i);
      for (int64_t j = 0; j < cfg.d; ++j) ar[j] = row[j];
      for (int64_t j = 0; j < cfg.d; ++j) xr[j] = row[cfg.d + j];
      for (int64_t j = 0; j < cfg.d_s; ++j) dstyle[j] += row[2 * cfg.d + j];
    }
    audio_proj.backward(store, da, c.ca);
    motion_proj.backward(store, dx, c.cx);
    return dstyle;
  }

  struct PredictCache {
    typename nn::LstmStack<S>::Cache clstm;
    typename nn::Linear<S>::Cache chead;
    int64_t m_rows = 0;
  };

  // Z (M x fused) -> N x 7 normalized motion via the last N hidden states.
  Tensor<S> predict_window(const ParameterStore<S>& store, const Tensor<S>& z,
                           PredictCache* cache = nullptr) const {
    require(z.rank() == 2 && z.cols() == cfg.fused_width(), "predict: fused width mismatch");
    require(z.rows() >= cfg.n_len, "predict: window of ", z.rows(),
            " rows cannot yield ", cfg.n_len, " outputs (M < N)");
    PredictCache local;
    PredictCache& c = cache ? *cache : local;
    c.m_rows = z.rows();
    Tensor<S> h = lstm.forward(store, z, cache ? &c.clstm : nullptr);
    Tensor<S> tail = Tensor<S>::matrix(cfg.n_len, cfg.lstm.hidden);
    const int64_t start = z.rows() - cfg.n_len;
    for (int64_t i = 0; i < cfg.n_len; ++i) {
      const S* src = h.row_ptr(start + i);
      S* dst = tail.row_ptr(i);
      for (int64_t j = 0; j < cfg.lstm.hidden; ++j) dst[j] = src[j];
    }
    return head.forward(store, tail, cache ? &c.chead : nullptr);
  }

  Tensor<S> predict_backward(ParameterStore<S>& store, const Tensor<S>& dpred,
                             const PredictCache& c) const {
    Tensor<S> dtail = head.backward(store, dpred, c.chead);
    Tensor<S> dh = Tensor<S>::matrix(c.m_rows, cfg.lstm.hidden);
    const int64_t start = c.m_rows - cfg.n_len;
    for (int64_t i = 0; i < cfg.n_len; ++i) {
      const S* src = dtail.row_ptr(i);
      S* dst = dh.row_ptr(start + i);
      for (int64_t j = 0; j < cfg.lstm.hidden; ++j) dst[j] = src[j];
    }
    return lstm.backward(store, dh, c.clstm);
  }
};

// ---- losses ----

// (1/T) sum_t |x_hat_t - x_t|^2 over the 7 components.
template <class S>
double mse_loss(const Tensor<S>& pred, const Tensor<S>& gt, Tensor<S>* grad = nullptr) {
  require(pred.shape() == gt.shape(), "mse_loss: shape mismatch");
  const int64_t t_len = pred.rows();
  double acc = 0.0;
  if (grad) *grad = Tensor<S>(pred.shape());
  for (int64_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(gt[i]);
    acc += d * d;
    if (grad) (*grad)[i] = static_cast<S>(2.0 * d / static_cast<double>(t_len));
  }
  return acc / static_cast<double>(t_len);
}

// (1/(T-1)) sum_{t>=2} |(x_hat_t - x_hat_{t-1}) - (x_t - x_{t-1})|^2
template <class S>
double velocity_loss(const Tensor<S>& pred, const Tensor<S>& gt, Tensor<S>* grad = nullptr) {
  require(pred.shape() == gt.shape(), "velocity_loss: shape mismatch");
  const int64_t t_len = pred.rows();
  require(t_len >= 2, "velocity_loss: need at least 2 frames");
  const int64_t c_len = pred.cols();
  double acc = 0.0;
  if (grad) *grad = Tensor<S>(pred.shape());
  const double inv = 1.0 / static_cast<double>(t_len - 1);
  for (int64_t t = 1; t < t_len; ++t) {
    for (int64_t c = 0; c < c_len; ++c) {
      const double dp = static_cast<double>(pred.at(t, c)) - static_cast<double>(pred.at(t - 1, c));
      const double dg = static_cast<double>(gt.at(t, c)) - static_cast<double>(gt.at(t - 1, c));
      const double e = dp - dg;
      acc += e * e;
      if (grad) {
        (*grad).at(t, c) += static_cast<S>(2.0 * e * inv);
        (*grad).at(t - 1, c) -= static_cast<S>(2.0 * e * inv);
      }
    }
  }
  return acc * inv;
}

// lambda * mse + (1 - lambda) * vel
template <class S>
double combined_loss(const Tensor<S>& pred, const Tensor<S>& gt, double lambda,
                     Tensor<S>* grad = nullptr) {
  require(lambda >= 0.0 && lambda <= 1.0, "combined_loss: lambda must lie in [0, 1]");
  Tensor<S> g_mse, g_vel;
  const double mse = mse_loss(pred, gt, grad ? &g_mse : nullptr);
  double vel = 0.0;
  if (lambda < 1.0) {
    vel = velocity_loss(pred, gt, grad ? &g_vel : nullptr);
  }
  if (grad) {
    *grad = Tensor<S>(pred.shape());
    axpy(static_cast<S>(lambda), g_mse, *grad);
    if (lambda < 1.0) axpy(static_cast<S>(1.0 - lambda), g_vel, *grad);
  }
  return lambda * mse + (1.0 - lambda) * vel;
}

}  // namespace gazekit::gen
