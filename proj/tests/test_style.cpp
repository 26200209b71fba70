#include <catch_amalgamated.hpp>

#include "gazekit/style/encoder.hpp"
#include "gazekit/style/ntxent.hpp"
#include "gazekit/style/pairs.hpp"
#include "gazekit/train/gradcheck.hpp"

using namespace gazekit;

namespace {

Tensor<double> random_window(int64_t m, Rng& rng) {
  Tensor<double> w({m, motion::kMotionDims});
  for (int64_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-1, 1);
  return w;
}

style::StyleEncoderConfig toy_config() {
  style::StyleEncoderConfig cfg;
  cfg.d_s = 8;
  cfg.n_layers = 1;
  cfg.n_heads = 2;
  cfg.ff_dim = 16;
  cfg.window = 6;
  return cfg;
}

}  // namespace

TEST_CASE("mean pooling is permutation invariant under identity encoder") {
  Rng rng(1);
  ParameterStore<double> store;
  auto cfg = toy_config();
  auto enc = style::StyleEncoder<double>::create(store, cfg, rng);
  // zero the residual-branch output projections: the layer becomes identity
  store.value("se.enc.layer0.attn.o.W").fill(0.0);
  store.value("se.enc.layer0.attn.o.b").fill(0.0);
  store.value("se.enc.layer0.ff2.W").fill(0.0);
  store.value("se.enc.layer0.ff2.b").fill(0.0);

  auto w = random_window(cfg.window, rng);
  Tensor<double> permuted = w;
  // reverse the rows
  for (int64_t i = 0; i < cfg.window; ++i) {
    for (int c = 0; c < motion::kMotionDims; ++c) {
      permuted.at(i, c) = w.at(cfg.window - 1 - i, c);
    }
  }
  auto e1 = enc.encode_window(store, w);
  auto e2 = enc.encode_window(store, permuted);
  for (int64_t j = 0; j < cfg.d_s; ++j) REQUIRE(e1[j] == Catch::Approx(e2[j]).margin(1e-12));
}

TEST_CASE("embedding width and window validation") {
  Rng rng(2);
  ParameterStore<double> store;
  auto cfg = toy_config();
  auto enc = style::StyleEncoder<double>::create(store, cfg, rng);
  auto e = enc.encode_window(store, random_window(cfg.window, rng));
  REQUIRE(e.rank() == 1);
  REQUIRE(e.dim(0) == cfg.d_s);
  REQUIRE_THROWS_WITH(enc.encode_window(store, random_window(cfg.window + 1, rng)),
                      Catch::Matchers::ContainsSubstring("window length"));
}

TEST_CASE("encode_window full gradient check") {
  Rng rng(3);
  ParameterStore<double> store;
  auto cfg = toy_config();
  auto enc = style::StyleEncoder<double>::create(store, cfg, rng);
  auto x = random_window(cfg.window, rng);
  Tensor<double> r({cfg.d_s});
  for (int64_t i = 0; i < r.size(); ++i) r[i] = rng.uniform(-1, 1);

  auto fwd = [&]() { return dot(enc.encode_window(store, x), r); };
  auto bwd = [&]() {
    store.zero_grads();
    style::StyleEncoder<double>::Cache c;
    enc.encode_window(store, x, &c);
    enc.backward(store, r, c);
  };
  REQUIRE(train::max_grad_rel_err(store, fwd, bwd) < 1e-5);
}

TEST_CASE("encode_window small-perturbation smoke") {
  Rng rng(4);
  ParameterStore<double> store;
  auto cfg = toy_config();
  auto enc = style::StyleEncoder<double>::create(store, cfg, rng);
  auto x = random_window(cfg.window, rng);
  Tensor<double> xp = x;
  for (int64_t i = 0; i < xp.size(); ++i) xp[i] += 1e-4 * ((i % 2) ? 1.0 : -1.0);
  auto e1 = enc.encode_window(store, x);
  auto e2 = enc.encode_window(store, xp);
  double diff = 0;
  for (int64_t j = 0; j < e1.size(); ++j) diff += (e1[j] - e2[j]) * (e1[j] - e2[j]);
  REQUIRE(std::sqrt(diff) < 1.0);
}

TEST_CASE("cosine similarity") {
  Tensor<double> a({2});
  Tensor<double> b({2});
  a[0] = 1;
  a[1] = 0;
  b[0] = 1;
  b[1] = 0;
  REQUIRE(style::cosine_sim(a, b) == Catch::Approx(1.0));
  b[0] = 0;
  b[1] = 1;
  REQUIRE(style::cosine_sim(a, b) == Catch::Approx(0.0).margin(1e-12));
  b[0] = 1;
  b[1] = 1;
  REQUIRE(style::cosine_sim(a, b) == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  REQUIRE(style::cosine_sim(a, b) == Catch::Approx(0.70711).margin(1e-5));
  Tensor<double> z({2});
  REQUIRE_THROWS_WITH(style::cosine_sim(a, z), Catch::Matchers::ContainsSubstring("zero vector"));
}

TEST_CASE("nt-xent closed form for orthogonal pairs") {
  // 2 pairs, identical within pair, orthogonal across pairs, tau = 1
  Tensor<float> emb({4, 4});
  emb.at(0, 0) = 1;  // s1a
  emb.at(1, 1) = 1;  // s2a
  emb.at(2, 0) = 1;  // s1b
  emb.at(3, 1) = 1;  // s2b
  auto res = style::nt_xent_loss(emb, 1.0);
  const double expect = 4.0 * std::log(1.0 + 2.0 / std::exp(1.0));
  REQUIRE(res.loss == Catch::Approx(expect).margin(1e-6));
  REQUIRE(expect == Catch::Approx(2.20574).margin(1e-4));
}

TEST_CASE("nt-xent is invariant to permuting pair order") {
  Rng rng(5);
  const int64_t n = 3, d = 4;
  Tensor<double> emb({2 * n, d});
  for (int64_t i = 0; i < emb.size(); ++i) emb[i] = rng.uniform(-1, 1);
  const double base = style::nt_xent_loss(emb, 0.5).loss;

  // swap pair 0 and pair 2 (anchors and partners together)
  Tensor<double> swapped = emb;
  for (int64_t j = 0; j < d; ++j) {
    std::swap(swapped.at(0, j), swapped.at(2, j));
    std::swap(swapped.at(n + 0, j), swapped.at(n + 2, j));
  }
  REQUIRE(style::nt_xent_loss(swapped, 0.5).loss == Catch::Approx(base).epsilon(1e-12));
}

TEST_CASE("nt-xent gradient vs finite differences") {
  Rng rng(6);
  const int64_t n = 3, d = 4;
  Tensor<double> emb({2 * n, d});
  for (int64_t i = 0; i < emb.size(); ++i) emb[i] = rng.uniform(-1, 1);
  const double tau = 0.7;

  auto res = style::nt_xent_loss(emb, tau);
  const double h = 1e-6;
  for (int64_t i = 0; i < emb.size(); ++i) {
    const double orig = emb[i];
    emb[i] = orig + h;
    const double lp = style::nt_xent_loss(emb, tau).loss;
    emb[i] = orig - h;
    const double lm = style::nt_xent_loss(emb, tau).loss;
    emb[i] = orig;
    const double numeric = (lp - lm) / (2 * h);
    const double rel = std::abs(res.grad[i] - numeric) /
                       std::max({std::abs(res.grad[i]), std::abs(numeric), 1e-3});
    REQUIRE(rel < 1e-5);
  }
}

TEST_CASE("nt-xent rejects bad inputs") {
  Tensor<float> emb({4, 2}, 1.0f);
  REQUIRE_THROWS_WITH(style::nt_xent_loss(emb, 0.0), Catch::Matchers::ContainsSubstring("temperature"));
  REQUIRE_THROWS_WITH(style::nt_xent_loss(emb, -1.0), Catch::Matchers::ContainsSubstring("temperature"));
  Tensor<float> two({2, 2}, 1.0f);
  REQUIRE_THROWS_AS(style::nt_xent_loss(two, 1.0), Error);
  Tensor<float> with_zero({4, 2}, 1.0f);
  with_zero.at(2, 0) = 0;
  with_zero.at(2, 1) = 0;
  REQUIRE_THROWS_WITH(style::nt_xent_loss(with_zero, 1.0),
                      Catch::Matchers::ContainsSubstring("zero embedding"));
}

TEST_CASE("decreasing positive-pair similarities strictly increases the loss") {
  Rng rng(7);
  const int64_t n = 4;
  Tensor<double> emb({2 * n, 6});
  for (int64_t i = 0; i < emb.size(); ++i) emb[i] = rng.uniform(-1, 1);
  Tensor<double> sim = style::pairwise_cosine(emb);
  const double base = style::nt_xent_from_sims(sim, 0.4);
  for (double delta : {0.01, 0.05, 0.2}) {
    Tensor<double> worse = sim;
    for (int64_t i = 0; i < 2 * n; ++i) {
      const int64_t p = (i + n) % (2 * n);
      worse.at(i, p) = sim.at(i, p) - delta;
    }
    REQUIRE(style::nt_xent_from_sims(worse, 0.4) > base);
  }
}

TEST_CASE("nt-xent invariant under a common orthogonal rotation") {
  Rng rng(8);
  const int64_t n = 3, d = 6;
  Tensor<double> emb({2 * n, d});
  for (int64_t i = 0; i < emb.size(); ++i) emb[i] = rng.uniform(-1, 1);
  const double base = style::nt_xent_loss(emb, 0.3).loss;

  // random rotation from composed Givens rotations
  Tensor<double> rot = emb;
  for (int g = 0; g < 12; ++g) {
    const int64_t a = rng.uniform_int(0, d - 1);
    int64_t b = rng.uniform_int(0, d - 1);
    if (a == b) b = (b + 1) % d;
    const double ang = rng.uniform(0, 2 * 3.14159265358979323846);
    const double c = std::cos(ang), s = std::sin(ang);
    for (int64_t i = 0; i < 2 * n; ++i) {
      const double va = rot.at(i, a), vb = rot.at(i, b);
      rot.at(i, a) = c * va - s * vb;
      rot.at(i, b) = s * va + c * vb;
    }
  }
  REQUIRE(style::nt_xent_loss(rot, 0.3).loss == Catch::Approx(base).epsilon(1e-9));
}

// ---- pair sampling ----

namespace {

std::vector<style::StyleWindow> windows_for(const std::vector<std::tuple<std::string, std::string, int64_t>>& provenance,
                                            int64_t m) {
  std::vector<style::StyleWindow> out;
  Rng rng(9);
  for (const auto& [spk, ses, t] : provenance) {
    style::StyleWindow w;
    w.motion = Tensor<float>({m, motion::kMotionDims});
    for (int64_t i = 0; i < w.motion.size(); ++i) w.motion[i] = static_cast<float>(rng.uniform(-1, 1));
    w.speaker_id = spk;
    w.session_id = ses;
    w.t_index = t;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

TEST_CASE("sample_pairs forced unique pairing") {
  // one 2M-frame session per speaker: windows at t = 0..M, adjacency only at t=0
  const int64_t m = 10;
  std::vector<std::tuple<std::string, std::string, int64_t>> prov;
  for (int spk = 0; spk < 3; ++spk) {
    for (int64_t t = 0; t <= m; ++t) {
      prov.emplace_back("spk" + std::to_string(spk), "s0", t);
    }
  }
  auto windows = windows_for(prov, m);
  Rng rng(11);
  auto batch = style::sample_pairs(windows, 3, m, 10 * m, rng);
  REQUIRE(batch.size() == 3);
  for (int64_t i = 0; i < 3; ++i) {
    const auto& a = windows[static_cast<size_t>(batch.anchor[static_cast<size_t>(i)])];
    const auto& b = windows[static_cast<size_t>(batch.partner[static_cast<size_t>(i)])];
    REQUIRE(a.speaker_id == b.speaker_id);
    REQUIRE(a.t_index == 0);  // only valid anchor
    REQUIRE(b.t_index == m);
  }
}

TEST_CASE("sample_pairs deterministic in seed") {
  const int64_t m = 5;
  std::vector<std::tuple<std::string, std::string, int64_t>> prov;
  for (int spk = 0; spk < 4; ++spk) {
    for (int64_t t = 0; t < 200; ++t) prov.emplace_back("spk" + std::to_string(spk), "s0", t);
  }
  auto windows = windows_for(prov, m);
  Rng r1(42), r2(42);
  auto b1 = style::sample_pairs(windows, 4, m, 10 * m, r1);
  auto b2 = style::sample_pairs(windows, 4, m, 10 * m, r2);
  REQUIRE(b1.anchor == b2.anchor);
  REQUIRE(b1.partner == b2.partner);
}

TEST_CASE("sampled batches pass an independent validity checker") {
  const int64_t m = 5;
  const int64_t gap_min = 10 * m;
  std::vector<std::tuple<std::string, std::string, int64_t>> prov;
  for (int spk = 0; spk < 3; ++spk) {
    for (int ses = 0; ses < 2; ++ses) {
      for (int64_t t = 0; t < 300; ++t) {
        prov.emplace_back("spk" + std::to_string(spk), "s" + std::to_string(ses), t);
      }
    }
  }
  auto windows = windows_for(prov, m);

  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    auto batch = style::sample_pairs(windows, 5, m, gap_min, rng);
    REQUIRE(batch.size() == 5);
    // independent brute-force validation over provenance tags
    std::vector<int64_t> all;
    for (int64_t i = 0; i < batch.size(); ++i) {
      const auto& a = windows[static_cast<size_t>(batch.anchor[static_cast<size_t>(i)])];
      const auto& b = windows[static_cast<size_t>(batch.partner[static_cast<size_t>(i)])];
      REQUIRE(a.speaker_id == b.speaker_id);
      REQUIRE(a.session_id == b.session_id);
      REQUIRE(b.t_index - a.t_index == m);
      all.push_back(batch.anchor[static_cast<size_t>(i)]);
      all.push_back(batch.partner[static_cast<size_t>(i)]);
    }
    for (size_t x = 0; x < all.size(); ++x) {
      for (size_t y = 0; y < all.size(); ++y) {
        if (x / 2 == y / 2) continue;  // same pair
        const auto& wx = windows[static_cast<size_t>(all[x])];
        const auto& wy = windows[static_cast<size_t>(all[y])];
        const bool ok = wx.speaker_id != wy.speaker_id || wx.session_id != wy.session_id ||
                        std::abs(wx.t_index - wy.t_index) >= gap_min;
        REQUIRE(ok);
      }
    }
  }
}

TEST_CASE("sample_pairs reports insufficient windows") {
  const int64_t m = 10;
  std::vector<std::tuple<std::string, std::string, int64_t>> prov;
  for (int64_t t = 0; t <= m; ++t) prov.emplace_back("spk0", "s0", t);
  auto windows = windows_for(prov, m);
  Rng rng(1);
  REQUIRE_THROWS_WITH(style::sample_pairs(windows, 4, m, 10 * m, rng),
                      Catch::Matchers::ContainsSubstring("insufficient"));
}
