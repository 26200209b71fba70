#pragma once

#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gazekit/gen/generator.hpp"
#include "gazekit/motion/normalize.hpp"
#include "gazekit/motion/ops.hpp"
#include "gazekit/style/encoder.hpp"
#include "gazekit/style/ntxent.hpp"
#include "gazekit/style/pairs.hpp"
#include "gazekit/train/adam.hpp"
#include "gazekit/train/checkpoint.hpp"

namespace gazekit::train {

struct TrainConfig {
  int64_t batch = 16;
  int64_t epochs = 10;
  int64_t steps = 0;  // 0 = derive from epochs
  double lr = 0.0;    // 0 = stage default (1e-3 style, 3e-4 generator)
  uint64_t seed = 1;
  double lambda = 0.8;
  double tau = 0.1;
  int64_t threads = 1;
  double clip_norm = 5.0;
  int64_t gap_min_windows = 10;  // same-speaker negative gap, in units of M
};

struct TrainLogEntry {
  int64_t step = 0;
  std::string stage;
  double loss = 0.0;
  double mse = 0.0;
  double vel = 0.0;
  double grad_norm = 0.0;
  bool clipped = false;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["step"] = step;
    j["stage"] = stage;
    j["loss"] = loss;
    if (stage == "generator") {
      j["mse"] = mse;
      j["vel"] = vel;
    }
    j["grad_norm"] = grad_norm;
    j["clipped"] = clipped;
    return j;
  }
};

// One loaded session: motion at 25 fps, the contiguous runs surviving the
// extreme-angle filter, and features aligned 1:1 with the motion frames.
struct SessionData {
  motion::MotionSequence motion;
  std::vector<motion::MotionRun> runs;
  audio::FeatureSequence feats;
};

struct Corpus {
  std::vector<SessionData> sessions;

  std::vector<motion::MotionSequence> all_run_sequences() const {
    std::vector<motion::MotionSequence> out;
    for (const auto& s : sessions) {
      for (const auto& r : s.runs) out.push_back(r.seq);
    }
    return out;
  }
};

inline uint64_t mix_seed(uint64_t seed, const std::string& tag, uint64_t n) {
  return fnv1a(msg(tag, ":", seed, ":", n));
}

// ---- style stage ----

struct StyleTrainResult {
  ParameterStore<float> store;
  motion::NormalizationStats stats;
  std::vector<TrainLogEntry> logs;
  Adam<float> optimizer;
};

inline std::vector<style::StyleWindow> collect_style_windows(const Corpus& corpus,
                                                             const motion::NormalizationStats& stats,
                                                             int64_t m_len) {
  std::vector<style::StyleWindow> windows;
  for (const auto& s : corpus.sessions) {
    for (const auto& r : s.runs) {
      motion::MotionSequence norm = motion::normalize(r.seq, stats);
      style::enumerate_style_windows(norm, m_len, r.source_start, windows);
    }
  }
  return windows;
}

inline StyleTrainResult pretrain_style(const Corpus& corpus, const style::StyleEncoderConfig& se_cfg,
                                       const TrainConfig& tcfg) {
  require(tcfg.batch >= 2, "style stage: batch must be >= 2 (pairs required)");
  StyleTrainResult out;
  out.stats = motion::fit_normalization(corpus.all_run_sequences());
  std::vector<style::StyleWindow> windows = collect_style_windows(corpus, out.stats, se_cfg.window);
  require(!windows.empty(), "style stage: corpus yields no windows of length ", se_cfg.window);

  Rng init_rng(mix_seed(tcfg.seed, "style-init", 0));
  auto enc = style::StyleEncoder<float>::create(out.store, se_cfg, init_rng);

  AdamConfig acfg;
  acfg.lr = tcfg.lr > 0 ? tcfg.lr : 1e-3;
  out.optimizer = Adam<float>(acfg);

  int64_t steps = tcfg.steps;
  if (steps == 0) {
    const int64_t per_epoch =
        std::max<int64_t>(1, static_cast<int64_t>(windows.size()) / (2 * tcfg.batch));
    steps = tcfg.epochs * per_epoch;
  }
  const int64_t gap_min = tcfg.gap_min_windows * se_cfg.window;

  for (int64_t step = 0; step < steps; ++step) {
    Rng step_rng(mix_seed(tcfg.seed, "style-batch", static_cast<uint64_t>(step)));
    style::PairBatch batch = style::sample_pairs(windows, tcfg.batch, se_cfg.window, gap_min, step_rng);

    const int64_t n2 = 2 * batch.size();
    std::vector<typename style::StyleEncoder<float>::Cache> caches(static_cast<size_t>(n2));
    Tensor<float> emb = Tensor<float>::matrix(n2, se_cfg.d_s);
    auto encode_into = [&](int64_t row, int64_t window_idx) {
      Tensor<float> m = windows[static_cast<size_t>(window_idx)].motion;
      Tensor<float> e = enc.encode_window(out.store, m, &caches[static_cast<size_t>(row)]);
      for (int64_t j = 0; j < se_cfg.d_s; ++j) emb.at(row, j) = e[j];
    };
    for (int64_t i = 0; i < batch.size(); ++i) {
      encode_into(i, batch.anchor[static_cast<size_t>(i)]);
      encode_into(batch.size() + i, batch.partner[static_cast<size_t>(i)]);
    }

    auto res = style::nt_xent_loss(emb, tcfg.tau);
    require(std::isfinite(res.loss), "style stage: non-finite loss at step ", step);

    out.store.zero_grads();
    for (int64_t i = 0; i < n2; ++i) {
      Tensor<float> ds = Tensor<float>::vector(se_cfg.d_s);
      for (int64_t j = 0; j < se_cfg.d_s; ++j) ds[j] = res.grad.at(i, j);
      enc.backward(out.store, ds, caches[static_cast<size_t>(i)]);
    }

    TrainLogEntry log;
    log.step = step;
    log.stage = "style";
    log.loss = res.loss;
    log.grad_norm = clip_gradients(out.store, tcfg.clip_norm, &log.clipped);
    out.optimizer.step(out.store);
    out.logs.push_back(log);
  }
  return out;
}

// ---- generator stage ----

struct GenTrainResult {
  ParameterStore<float> store;
  motion::NormalizationStats stats;
  std::vector<TrainLogEntry> logs;
  Adam<float> optimizer;
  int64_t total_steps = 0;
};

struct GenWindowSet {
  std::vector<motion::WindowPair> windows;
  std::vector<Tensor<float>> styles;  // per window; empty when d_s == 0
};

inline GenWindowSet collect_generator_windows(const Corpus& corpus, const gen::GenerationConfig& cfg,
                                              const motion::NormalizationStats& stats,
                                              const style::StyleEncoder<float>* encoder,
                                              const ParameterStore<float>* encoder_store) {
  GenWindowSet out;
  for (const auto& s : corpus.sessions) {
    for (const auto& r : s.runs) {
      motion::MotionSequence norm = motion::normalize(r.seq, stats);
      audio::FeatureSequence run_feats =
          audio::slice_features(s.feats, r.source_start, r.seq.length());
      auto wins = motion::make_windows(norm, run_feats, cfg.m_len, cfg.n_len, cfg.n_len,
                                       r.source_start);
      for (auto& w : wins) out.windows.push_back(std::move(w));
    }
  }
  if (cfg.d_s > 0) {
    require(encoder && encoder_store, "generator stage: style conditioning needs an encoder");
    // The encoder is frozen; embeddings of teacher-forced past windows are
    // fixed for the whole stage, so compute them once.
    out.styles.reserve(out.windows.size());
    for (const auto& w : out.windows) {
      out.styles.push_back(encoder->encode_window(*encoder_store, w.past_motion));
    }
  }
  return out;
}

namespace detail {

struct WindowGrad {
  double loss = 0.0, mse = 0.0, vel = 0.0;
};

template <class S>
WindowGrad gen_window_backward(const gen::Generator<S>& g, ParameterStore<S>& store,
                               const motion::WindowPair& w, const Tensor<S>& style_vec,
                               double lambda) {
  typename gen::Generator<S>::FuseCache fc;
  typename gen::Generator<S>::PredictCache pc;
  Tensor<S> audio = w.audio_window.template cast<S>();
  Tensor<S> past = w.past_motion.template cast<S>();
  Tensor<S> future = w.future_motion.template cast<S>();
  Tensor<S> z = g.fuse_inputs(store, audio, past, style_vec, &fc);
  Tensor<S> pred = g.predict_window(store, z, &pc);

  WindowGrad res;
  Tensor<S> dpred;
  res.mse = gen::mse_loss(pred, future);
  res.vel = gen::velocity_loss(pred, future);
  res.loss = gen::combined_loss(pred, future, lambda, &dpred);
  Tensor<S> dz = g.predict_backward(store, dpred, pc);
  g.fuse_backward(store, dz, fc);
  return res;
}

}  // namespace detail

inline GenTrainResult train_generator(const Corpus& corpus, gen::GenerationConfig cfg,
                                      const TrainConfig& tcfg,
                                      const motion::NormalizationStats* stats_in = nullptr,
                                      const style::StyleEncoder<float>* encoder = nullptr,
                                      const ParameterStore<float>* encoder_store = nullptr,
                                      const Checkpoint* resume = nullptr) {
  cfg.lambda = tcfg.lambda;
  cfg.lstm.input_dim = cfg.fused_width();
  cfg.validate();

  GenTrainResult out;
  out.stats = stats_in ? *stats_in : motion::fit_normalization(corpus.all_run_sequences());

  GenWindowSet ws = collect_generator_windows(corpus, cfg, out.stats, encoder, encoder_store);
  const int64_t nw = static_cast<int64_t>(ws.windows.size());
  require(nw >= 1, "generator stage: corpus yields no training windows (need M+N = ",
          cfg.m_len + cfg.n_len, " frames)");

  gen::Generator<float> g;
  AdamConfig acfg;
  acfg.lr = tcfg.lr > 0 ? tcfg.lr : 3e-4;
  int64_t start_step = 0;
  if (resume) {
    out.store = resume->params;
    g = gen::Generator<float>::attach(out.store, cfg);
    out.optimizer = resume->optimizer;
    out.optimizer.config() = acfg;
    start_step = resume->optimizer.step_count();
  } else {
    Rng init_rng(mix_seed(tcfg.seed, "gen-init", 0));
    g = gen::Generator<float>::create(out.store, cfg, init_rng);
    out.optimizer = Adam<float>(acfg);
  }

  const int64_t steps_per_epoch = (nw + tcfg.batch - 1) / tcfg.batch;
  int64_t total_steps = tcfg.steps > 0 ? tcfg.steps : tcfg.epochs * steps_per_epoch;
  out.total_steps = total_steps;

  const int64_t n_threads =
      std::max<int64_t>(1, tcfg.threads > 0 ? tcfg.threads
                                            : static_cast<int64_t>(std::thread::hardware_concurrency()));

  std::vector<int64_t> order(static_cast<size_t>(nw));
  int64_t order_epoch = -1;

  for (int64_t step = start_step; step < total_steps; ++step) {
    const int64_t epoch = step / steps_per_epoch;
    const int64_t pos = step % steps_per_epoch;
    if (epoch != order_epoch) {
      // Epoch shuffles derive statelessly from (seed, epoch), so resuming a
      // checkpoint lands on the exact batch the uninterrupted run would see.
      for (int64_t i = 0; i < nw; ++i) order[static_cast<size_t>(i)] = i;
      Rng order_rng(mix_seed(tcfg.seed, "gen-order", static_cast<uint64_t>(epoch)));
      order_rng.shuffle(order);
      order_epoch = epoch;
    }
    const int64_t b0 = pos * tcfg.batch;
    const int64_t b1 = std::min<int64_t>(nw, b0 + tcfg.batch);
    const int64_t bsz = b1 - b0;

    out.store.zero_grads();
    std::vector<detail::WindowGrad> wres(static_cast<size_t>(bsz));
    const Tensor<float> empty_style;

    if (n_threads == 1 || bsz == 1) {
      for (int64_t k = 0; k < bsz; ++k) {
        const int64_t wi = order[static_cast<size_t>(b0 + k)];
        const Tensor<float>& sv = cfg.d_s > 0 ? ws.styles[static_cast<size_t>(wi)] : empty_style;
        wres[static_cast<size_t>(k)] =
            detail::gen_window_backward(g, out.store, ws.windows[static_cast<size_t>(wi)], sv,
                                        cfg.lambda);
      }
    } else {
      const int64_t used = std::min<int64_t>(n_threads, bsz);
      std::vector<ParameterStore<float>> clones(static_cast<size_t>(used));
      for (auto& c : clones) c = out.store;
      std::vector<std::thread> pool;
      for (int64_t t = 0; t < used; ++t) {
        pool.emplace_back([&, t]() {
          for (int64_t k = t; k < bsz; k += used) {
            const int64_t wi = order[static_cast<size_t>(b0 + k)];
            const Tensor<float>& sv = cfg.d_s > 0 ? ws.styles[static_cast<size_t>(wi)] : empty_style;
            wres[static_cast<size_t>(k)] =
                detail::gen_window_backward(g, clones[static_cast<size_t>(t)],
                                            ws.windows[static_cast<size_t>(wi)], sv, cfg.lambda);
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& c : clones) out.store.add_grads_from(c);  // fixed order
    }

    out.store.scale_grads(static_cast<float>(1.0 / static_cast<double>(bsz)));

    TrainLogEntry log;
    log.step = step;
    log.stage = "generator";
    for (const auto& r : wres) {
      log.loss += r.loss / static_cast<double>(bsz);
      log.mse += r.mse / static_cast<double>(bsz);
      log.vel += r.vel / static_cast<double>(bsz);
    }
    require(std::isfinite(log.loss), "generator stage: non-finite loss at step ", step);
    log.grad_norm = clip_gradients(out.store, tcfg.clip_norm, &log.clipped);
    out.optimizer.step(out.store);
    out.logs.push_back(log);
  }
  return out;
}

// ---- checkpoint glue ----

inline nlohmann::json style_meta(const style::StyleEncoderConfig& cfg,
                                 const motion::NormalizationStats& stats, const TrainConfig& tcfg) {
  nlohmann::json j;
  j["kind"] = "style";
  j["d_s"] = cfg.d_s;
  j["n_layers"] = cfg.n_layers;
  j["n_heads"] = cfg.n_heads;
  j["ff_dim"] = cfg.ff_dim;
  j["window"] = cfg.window;
  j["tau"] = tcfg.tau;
  j["seed"] = tcfg.seed;
  j["stats"] = stats_to_json(stats);
  return j;
}

inline nlohmann::json generator_meta(const gen::GenerationConfig& cfg,
                                     const motion::NormalizationStats& stats,
                                     const TrainConfig& tcfg) {
  nlohmann::json j;
  j["kind"] = "generator";
  j["m_len"] = cfg.m_len;
  j["n_len"] = cfg.n_len;
  j["d"] = cfg.d;
  j["d_s"] = cfg.d_s;
  j["feature_dim"] = cfg.feature_dim;
  j["lambda"] = cfg.lambda;
  j["lstm_layers"] = cfg.lstm.n_layers;
  j["lstm_hidden"] = cfg.lstm.hidden;
  j["seed"] = tcfg.seed;
  j["stats"] = stats_to_json(stats);
  return j;
}

inline style::StyleEncoderConfig style_config_from_meta(const nlohmann::json& meta) {
  require(meta.contains("kind") && meta["kind"] == "style",
          "checkpoint: expected a style-encoder checkpoint");
  style::StyleEncoderConfig cfg;
  cfg.d_s = meta.at("d_s").get<int64_t>();
  cfg.n_layers = meta.at("n_layers").get<int64_t>();
  cfg.n_heads = meta.at("n_heads").get<int64_t>();
  cfg.ff_dim = meta.at("ff_dim").get<int64_t>();
  cfg.window = meta.at("window").get<int64_t>();
  return cfg;
}

inline gen::GenerationConfig generator_config_from_meta(const nlohmann::json& meta) {
  require(meta.contains("kind") && meta["kind"] == "generator",
          "checkpoint: expected a generator checkpoint");
  gen::GenerationConfig cfg;
  cfg.m_len = meta.at("m_len").get<int64_t>();
  cfg.n_len = meta.at("n_len").get<int64_t>();
  cfg.d = meta.at("d").get<int64_t>();
  cfg.d_s = meta.at("d_s").get<int64_t>();
  cfg.feature_dim = meta.at("feature_dim").get<int64_t>();
  cfg.lambda = meta.at("lambda").get<double>();
  cfg.lstm.n_layers = meta.at("lstm_layers").get<int64_t>();
  cfg.lstm.hidden = meta.at("lstm_hidden").get<int64_t>();
  cfg.lstm.input_dim = cfg.fused_width();
  return cfg;
}

}  // namespace gazekit::train
