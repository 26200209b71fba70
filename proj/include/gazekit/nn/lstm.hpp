#pragma once

#include <string>
#include <vector>

#include "gazekit/nn/linear.hpp"

namespace gazekit::nn {

struct LstmStackConfig {
  int64_t n_layers = 1;
  int64_t hidden = 1;
  int64_t input_dim = 1;
};

template <class S>
inline S sigmoid(S x) {
  return static_cast<S>(1.0 / (1.0 + std::exp(-static_cast<double>(x))));
}

// Multi-layer LSTM. Gate blocks in W/b are ordered [i | f | g | o]; layer l
// consumes layer l-1's hidden sequence. Initial (h0, c0) per layer live in
// the ParameterStore and are trained like any other weight.
template <class S>
struct LstmStack {
  LstmStackConfig cfg;
  std::string prefix;

  static std::string wih_name(const std::string& p, int64_t l) {
    return p + ".l" + std::to_string(l) + ".W_ih";
  }
  static std::string whh_name(const std::string& p, int64_t l) {
    return p + ".l" + std::to_string(l) + ".W_hh";
  }
  static std::string b_name(const std::string& p, int64_t l) {
    return p + ".l" + std::to_string(l) + ".b";
  }
  static std::string h0_name(const std::string& p, int64_t l) {
    return p + ".l" + std::to_string(l) + ".h0";
  }
  static std::string c0_name(const std::string& p, int64_t l) {
    return p + ".l" + std::to_string(l) + ".c0";
  }

  static LstmStack create(ParameterStore<S>& store, const std::string& name, const LstmStackConfig& cfg,
                          Rng& rng) {
    require(cfg.n_layers >= 1 && cfg.hidden >= 1, "lstm: bad config");
    LstmStack s;
    s.cfg = cfg;
    s.prefix = name;
    const int64_t h = cfg.hidden;
    for (int64_t l = 0; l < cfg.n_layers; ++l) {
      const int64_t in = (l == 0) ? cfg.input_dim : h;
      auto& wih = store.add(wih_name(name, l), {in, 4 * h});
      init_uniform_fan_in(wih, in, rng);
      auto& whh = store.add(whh_name(name, l), {h, 4 * h});
      init_uniform_fan_in(whh, h, rng);
      auto& b = store.add(b_name(name, l), {4 * h});
      for (int64_t j = h; j < 2 * h; ++j) b[j] = S(1);  // forget gate bias
      store.add(h0_name(name, l), {h});
      store.add(c0_name(name, l), {h});
    }
    return s;
  }

  static LstmStack attach(const ParameterStore<S>& store, const std::string& name,
                          const LstmStackConfig& cfg) {
    (void)store;
    LstmStack s;
    s.cfg = cfg;
    s.prefix = name;
    return s;
  }

  struct LayerCache {
    Tensor<S> input;   // T x in
    Tensor<S> gates;   // T x 4H, post-activation (i, f, g, o)
    Tensor<S> c;       // T x H cell states
    Tensor<S> tanh_c;  // T x H
    Tensor<S> h;       // T x H hidden states
  };

  struct Cache {
    std::vector<LayerCache> layers;
  };

  // Returns the top layer's hidden sequence (T x hidden).
  Tensor<S> forward(const ParameterStore<S>& store, const Tensor<S>& z, Cache* cache = nullptr) const {
    require(z.rank() == 2 && z.cols() == cfg.input_dim, "lstm ", prefix, ": input width ", z.cols(),
            " != ", cfg.input_dim);
    const int64_t t_len = z.rows();
    const int64_t h_dim = cfg.hidden;

    Cache local;
    Cache& c = cache ? *cache : local;
    c.layers.assign(static_cast<size_t>(cfg.n_layers), LayerCache{});

    Tensor<S> cur = z;
    for (int64_t l = 0; l < cfg.n_layers; ++l) {
      LayerCache& lc = c.layers[static_cast<size_t>(l)];
      const Tensor<S>& wih = store.value(wih_name(prefix, l));
      const Tensor<S>& whh = store.value(whh_name(prefix, l));
      const Tensor<S>& b = store.value(b_name(prefix, l));
      const Tensor<S>& h0 = store.value(h0_name(prefix, l));
      const Tensor<S>& c0 = store.value(c0_name(prefix, l));
      const int64_t in_dim = cur.cols();

      lc.input = cur;
      lc.gates = Tensor<S>::matrix(t_len, 4 * h_dim);
      lc.c = Tensor<S>::matrix(t_len, h_dim);
      lc.tanh_c = Tensor<S>::matrix(t_len, h_dim);
      lc.h = Tensor<S>::matrix(t_len, h_dim);

      const S* h_prev = h0.data();
      const S* c_prev = c0.data();
      for (int64_t t = 0; t < t_len; ++t) {
        S* g = lc.gates.row_ptr(t);
        for (int64_t j = 0; j < 4 * h_dim; ++j) g[j] = b[j];
        const S* x = lc.input.row_ptr(t);
        for (int64_t p = 0; p < in_dim; ++p) {
          const S xv = x[p];
          if (xv == S(0)) continue;
          const S* wrow = wih.row_ptr(p);
          for (int64_t j = 0; j < 4 * h_dim; ++j) g[j] += xv * wrow[j];
        }
        for (int64_t p = 0; p < h_dim; ++p) {
          const S hv = h_prev[p];
          if (hv == S(0)) continue;
          const S* wrow = whh.row_ptr(p);
          for (int64_t j = 0; j < 4 * h_dim; ++j) g[j] += hv * wrow[j];
        }
        S* ct = lc.c.row_ptr(t);
        S* tct = lc.tanh_c.row_ptr(t);
        S* ht = lc.h.row_ptr(t);
        for (int64_t j = 0; j < h_dim; ++j) {
          const S gi = sigmoid(g[j]);
          const S gf = sigmoid(g[h_dim + j]);
          const S gg = static_cast<S>(std::tanh(static_cast<double>(g[2 * h_dim + j])));
          const S go = sigmoid(g[3 * h_dim + j]);
          g[j] = gi;
          g[h_dim + j] = gf;
          g[2 * h_dim + j] = gg;
          g[3 * h_dim + j] = go;
          ct[j] = gf * c_prev[j] + gi * gg;
          tct[j] = static_cast<S>(std::tanh(static_cast<double>(ct[j])));
          ht[j] = go * tct[j];
        }
        h_prev = ht;
        c_prev = ct;
      }
      require(lc.h.all_finite(), "lstm ", prefix, ": non-finite hidden state in layer ", l);
      cur = lc.h;
    }
    return cur;
  }

  // dtop: gradient w.r.t. the top layer hidden sequence. Accumulates into the
  // store (including h0/c0) and returns the gradient w.r.t. the input z.
  Tensor<S> backward(ParameterStore<S>& store, const Tensor<S>& dtop, const Cache& cache) const {
    const int64_t h_dim = cfg.hidden;
    const int64_t t_len = dtop.rows();

    Tensor<S> dcur = dtop;  // gradient w.r.t. layer l's hidden sequence
    for (int64_t l = cfg.n_layers; l-- > 0;) {
      const LayerCache& lc = cache.layers[static_cast<size_t>(l)];
      const Tensor<S>& wih = store.value(wih_name(prefix, l));
      const Tensor<S>& whh = store.value(whh_name(prefix, l));
      const Tensor<S>& h0 = store.value(h0_name(prefix, l));
      const Tensor<S>& c0 = store.value(c0_name(prefix, l));
      Tensor<S>& dwih = store.grad(wih_name(prefix, l));
      Tensor<S>& dwhh = store.grad(whh_name(prefix, l));
      Tensor<S>& db = store.grad(b_name(prefix, l));
      Tensor<S>& dh0 = store.grad(h0_name(prefix, l));
      Tensor<S>& dc0 = store.grad(c0_name(prefix, l));
      const int64_t in_dim = lc.input.cols();

      Tensor<S> dinput = Tensor<S>::matrix(t_len, in_dim);
      std::vector<S> dh(static_cast<size_t>(h_dim), S(0));
      std::vector<S> dc(static_cast<size_t>(h_dim), S(0));
      std::vector<S> dz(static_cast<size_t>(4 * h_dim), S(0));

      for (int64_t t = t_len; t-- > 0;) {
        const S* g = lc.gates.row_ptr(t);
        const S* tct = lc.tanh_c.row_ptr(t);
        const S* c_prev = (t == 0) ? c0.data() : lc.c.row_ptr(t - 1);
        const S* h_prev = (t == 0) ? h0.data() : lc.h.row_ptr(t - 1);
        const S* dout = dcur.row_ptr(t);

        for (int64_t j = 0; j < h_dim; ++j) {
          const S gi = g[j], gf = g[h_dim + j], gg = g[2 * h_dim + j], go = g[3 * h_dim + j];
          const S dh_total = dh[static_cast<size_t>(j)] + dout[j];
          const S d_o = dh_total * tct[j];
          S d_c = dc[static_cast<size_t>(j)] + dh_total * go * (S(1) - tct[j] * tct[j]);
          const S d_i = d_c * gg;
          const S d_f = d_c * c_prev[j];
          const S d_g = d_c * gi;
          dz[static_cast<size_t>(j)] = d_i * gi * (S(1) - gi);
          dz[static_cast<size_t>(h_dim + j)] = d_f * gf * (S(1) - gf);
          dz[static_cast<size_t>(2 * h_dim + j)] = d_g * (S(1) - gg * gg);
          dz[static_cast<size_t>(3 * h_dim + j)] = d_o * go * (S(1) - go);
          dc[static_cast<size_t>(j)] = d_c * gf;
        }

        const S* x = lc.input.row_ptr(t);
        S* dx = dinput.row_ptr(t);
        for (int64_t j = 0; j < 4 * h_dim; ++j) db[j] += dz[static_cast<size_t>(j)];
        for (int64_t p = 0; p < in_dim; ++p) {
          const S* wrow = wih.row_ptr(p);
          S* dwrow = dwih.row_ptr(p);
          const S xv = x[p];
          S acc = S(0);
          for (int64_t j = 0; j < 4 * h_dim; ++j) {
            const S dzj = dz[static_cast<size_t>(j)];
            acc += dzj * wrow[j];
            dwrow[j] += xv * dzj;
          }
          dx[p] = acc;
        }
        for (int64_t p = 0; p < h_dim; ++p) {
          const S* wrow = whh.row_ptr(p);
          S* dwrow = dwhh.row_ptr(p);
          const S hv = h_prev[p];
          S acc = S(0);
          for (int64_t j = 0; j < 4 * h_dim; ++j) {
            const S dzj = dz[static_cast<size_t>(j)];
            acc += dzj * wrow[j];
            dwrow[j] += hv * dzj;
          }
          dh[static_cast<size_t>(p)] = acc;
        }
      }
      for (int64_t j = 0; j < h_dim; ++j) {
        dh0[j] += dh[static_cast<size_t>(j)];
        dc0[j] += dc[static_cast<size_t>(j)];
      }
      dcur = std::move(dinput);
    }
    return dcur;
  }
};

}  // namespace gazekit::nn
