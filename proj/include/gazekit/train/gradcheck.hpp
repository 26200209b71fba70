#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazekit/gen/generator.hpp"
#include "gazekit/nn/attention.hpp"
#include "gazekit/nn/transformer.hpp"
#include "gazekit/style/encoder.hpp"
#include "gazekit/style/ntxent.hpp"

namespace gazekit::train {

struct GradCheckCase {
  std::string name;
  double threshold = 0.0;
  double max_rel_err = 0.0;
  bool pass = false;
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  double seconds = 0.0;

  bool all_pass() const {
    for (const auto& c : cases) {
      if (!c.pass) return false;
    }
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["seconds"] = seconds;
    j["all_pass"] = all_pass();
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : cases) {
      list.push_back({{"name", c.name},
                      {"threshold", c.threshold},
                      {"max_rel_err", c.max_rel_err},
                      {"pass", c.pass}});
    }
    j["cases"] = list;
    return j;
  }
};

// Central differences (h = 1e-5, f64) against the analytic gradients for
// every parameter in the store. `forward` computes the scalar loss from the
// current store values; `backward` must zero grads, run forward with caches
// and populate the analytic gradients.
inline double max_grad_rel_err(ParameterStore<double>& store,
                               const std::function<double()>& forward,
                               const std::function<void()>& backward, double h = 1e-5) {
  backward();
  std::map<std::string, Tensor<double>> analytic;
  for (const auto& [name, p] : store) analytic[name] = p.grad;

  double worst = 0.0;
  for (auto& [name, p] : store) {
    for (int64_t i = 0; i < p.value.size(); ++i) {
      const double orig = p.value[i];
      p.value[i] = orig + h;
      const double lp = forward();
      p.value[i] = orig - h;
      const double lm = forward();
      p.value[i] = orig;
      const double numeric = (lp - lm) / (2.0 * h);
      const double a = analytic[name][i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-3});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

namespace detail {

inline Tensor<double> random_tensor(std::vector<int64_t> shape, Rng& rng, double scale = 0.7) {
  Tensor<double> t(std::move(shape));
  for (int64_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-scale, scale);
  return t;
}

// Scalar readout: sum(y * R) with a fixed random projection R, so every
// output element contributes a distinct weight.
inline double readout(const Tensor<double>& y, const Tensor<double>& r) {
  double acc = 0.0;
  for (int64_t i = 0; i < y.size(); ++i) acc += y[i] * r[i];
  return acc;
}

}  // namespace detail

inline GradCheckCase check_linear(uint64_t seed) {
  Rng rng(seed);
  ParameterStore<double> store;
  auto lin = nn::Linear<double>::create(store, "lin", 4, 3, rng);
  Tensor<double> x = detail::random_tensor({3, 4}, rng);
  Tensor<double> r = detail::random_tensor({3, 3}, rng, 1.0);

  auto fwd = [&]() { return detail::readout(lin.forward(store, x), r); };
  auto bwd = [&]() {
    store.zero_grads();
    typename nn::Linear<double>::Cache cache;
    lin.forward(store, x, &cache);
    lin.backward(store, r, cache);
  };
  GradCheckCase c{"linear", 1e-6, max_grad_rel_err(store, fwd, bwd), false};
  c.pass = c.max_rel_err < c.threshold;
  return c;
}

inline GradCheckCase check_attention(uint64_t seed) {
  Rng rng(seed);
  ParameterStore<double> store;
  auto mha = nn::MultiHeadAttention<double>::create(store, "mha", 8, 2, rng);
  Tensor<double> x = detail::random_tensor({3, 8}, rng);
  Tensor<double> r = detail::random_tensor({3, 8}, rng, 1.0);

  auto fwd = [&]() { return detail::readout(mha.forward(store, x), r); };
  auto bwd = [&]() {
    store.zero_grads();
    typename nn::MultiHeadAttention<double>::Cache cache;
    mha.forward(store, x, &cache);
    mha.backward(store, r, cache);
  };
  GradCheckCase c{"attention", 1e-5, max_grad_rel_err(store, fwd, bwd), false};
  c.pass = c.max_rel_err < c.threshold;
  return c;
}

inline GradCheckCase check_transformer_layer(uint64_t seed) {
  Rng rng(seed);
  ParameterStore<double> store;
  auto layer = nn::TransformerLayer<double>::create(store, "tf", 8, 2, 16, rng);
  Tensor<double> x = detail::random_tensor({3, 8}, rng);
  Tensor<double> r = detail::random_tensor({3, 8}, rng, 1.0);

  auto fwd = [&]() { return detail::readout(layer.forward(store, x), r); };
  auto bwd = [&]() {
    store.zero_grads();
    typename nn::TransformerLayer<double>::Cache cache;
    layer.forward(store, x, &cache);
    layer.backward(store, r, cache);
  };
  GradCheckCase c{"transformer_layer", 1e-5, max_grad_rel_err(store, fwd, bwd), false};
  c.pass = c.max_rel_err < c.threshold;
  return c;
}

inline GradCheckCase check_lstm_stack(uint64_t seed) {
  Rng rng(seed);
  ParameterStore<double> store;
  nn::LstmStackConfig cfg{2, 3, 5};
  auto lstm = nn::LstmStack<double>::create(store, "lstm", cfg, rng);
  // exercise the learnable initial states away from zero
  for (int64_t l = 0; l < cfg.n_layers; ++l) {
    auto& h0 = store.value(nn::LstmStack<double>::h0_name("lstm", l));
    auto& c0 = store.value(nn::LstmStack<double>::c0_name("lstm", l));
    for (int64_t i = 0; i < h0.size(); ++i) h0[i] = rng.uniform(-0.5, 0.5);
    for (int64_t i = 0; i < c0.size(); ++i) c0[i] = rng.uniform(-0.5, 0.5);
  }
  Tensor<double> z = detail::random_tensor({4, 5}, rng);
  Tensor<double> r = detail::random_tensor({4, 3}, rng, 1.0);

  auto fwd = [&]() { return detail::readout(lstm.forward(store, z), r); };
  auto bwd = [&]() {
    store.zero_grads();
    typename nn::LstmStack<double>::Cache cache;
    lstm.forward(store, z, &cache);
    lstm.backward(store, r, cache);
  };
  GradCheckCase c{"lstm_stack", 1e-5, max_grad_rel_err(store, fwd, bwd), false};
  c.pass = c.max_rel_err < c.threshold;
  return c;
}

inline GradCheckCase check_style_encoder_ntxent(uint64_t seed) {
  Rng rng(seed);
  ParameterStore<double> store;
  style::StyleEncoderConfig cfg;
  cfg.d_s = 8;
  cfg.n_layers = 1;
  cfg.n_heads = 2;
  cfg.ff_dim = 16;
  cfg.window = 6;
  auto enc = style::StyleEncoder<double>::create(store, cfg, rng);
  const int64_t n_pairs = 3;
  std::vector<Tensor<double>> windows;
  for (int64_t i = 0; i < 2 * n_pairs; ++i) {
    windows.push_back(detail::random_tensor({cfg.window, motion::kMotionDims}, rng));
  }
  const double tau = 0.5;

  auto embed_all = [&](std::vector<typename style::StyleEncoder<double>::Cache>* caches) {
    Tensor<double> e = Tensor<double>::matrix(2 * n_pairs, cfg.d_s);
    if (caches) caches->resize(windows.size());
    for (size_t i = 0; i < windows.size(); ++i) {
      Tensor<double> s =
          enc.encode_window(store, windows[i], caches ? &(*caches)[i] : nullptr);
      for (int64_t j = 0; j < cfg.d_s; ++j) e.at(static_cast<int64_t>(i), j) = s[j];
    }
    return e;
  };
  auto fwd = [&]() { return style::nt_xent_loss(embed_all(nullptr), tau).loss; };
  auto bwd = [&]() {
    store.zero_grads();
    std::vector<typename style::StyleEncoder<double>::Cache> caches;
    Tensor<double> e = embed_all(&caches);
    auto res = style::nt_xent_loss(e, tau);
    for (size_t i = 0; i < windows.size(); ++i) {
      Tensor<double> ds = Tensor<double>::vector(cfg.d_s);
      for (int64_t j = 0; j < cfg.d_s; ++j) ds[j] = res.grad.at(static_cast<int64_t>(i), j);
      enc.backward(store, ds, caches[i]);
    }
  };
  GradCheckCase c{"style_encoder_ntxent", 1e-5, max_grad_rel_err(store, fwd, bwd), false};
  c.pass = c.max_rel_err < c.threshold;
  return c;
}

inline GradCheckCase check_generator_full(uint64_t seed) {
  Rng rng(seed);
  ParameterStore<double> store;
  gen::GenerationConfig cfg;
  cfg.m_len = 6;
  cfg.n_len = 3;
  cfg.d = 6;
  cfg.d_s = 4;
  cfg.feature_dim = 5;
  cfg.lambda = 0.6;
  cfg.lstm = nn::LstmStackConfig{2, 8, 0};
  auto g = gen::Generator<double>::create(store, cfg, rng);

  Tensor<double> audio = detail::random_tensor({cfg.m_len, cfg.feature_dim}, rng);
  Tensor<double> past = detail::random_tensor({cfg.m_len, motion::kMotionDims}, rng);
  Tensor<double> style = detail::random_tensor({cfg.d_s}, rng);
  Tensor<double> gt = detail::random_tensor({cfg.n_len, motion::kMotionDims}, rng);

  auto fwd = [&]() {
    Tensor<double> z = g.fuse_inputs(store, audio, past, style);
    Tensor<double> pred = g.predict_window(store, z);
    return gen::combined_loss(pred, gt, cfg.lambda);
  };
  auto bwd = [&]() {
    store.zero_grads();
    typename gen::Generator<double>::FuseCache fc;
    typename gen::Generator<double>::PredictCache pc;
    Tensor<double> z = g.fuse_inputs(store, audio, past, style, &fc);
    Tensor<double> pred = g.predict_window(store, z, &pc);
    Tensor<double> dpred;
    gen::combined_loss(pred, gt, cfg.lambda, &dpred);
    Tensor<double> dz = g.predict_backward(store, dpred, pc);
    g.fuse_backward(store, dz, fc);
  };
  GradCheckCase c{"generator_full", 1e-4, max_grad_rel_err(store, fwd, bwd), false};
  c.pass = c.max_rel_err < c.threshold;
  return c;
}

inline GradCheckReport run_gradcheck(uint64_t seed) {
  GradCheckReport report;
  const auto t0 = std::chrono::steady_clock::now();
  report.cases.push_back(check_linear(seed));
  report.cases.push_back(check_attention(seed + 1));
  report.cases.push_back(check_transformer_layer(seed + 2));
  report.cases.push_back(check_lstm_stack(seed + 3));
  report.cases.push_back(check_style_encoder_ntxent(seed + 4));
  report.cases.push_back(check_generator_full(seed + 5));
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace gazekit::train
