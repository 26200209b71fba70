#pragma once

#include <string>
#include <vector>

#include "gazekit/nn/linear.hpp"

namespace gazekit::nn {

// Scaled dot-product multi-head self-attention over a T x d sequence.
// Heads are contiguous column blocks of the Q/K/V projections.
template <class S>
struct MultiHeadAttention {
  Linear<S> q, k, v, o;
  int64_t dim = 0;
  int64_t heads = 0;

  static MultiHeadAttention create(ParameterStore<S>& store, const std::string& name, int64_t dim,
                                   int64_t heads, Rng& rng) {
    require(heads >= 1 && dim % heads == 0, "attention: model dim ", dim,
            " not divisible by heads ", heads);
    MultiHeadAttention m;
    m.dim = dim;
    m.heads = heads;
    m.q = Linear<S>::create(store, name + ".q", dim, dim, rng);
    m.k = Linear<S>::create(store, name + ".k", dim, dim, rng);
    m.v = Linear<S>::create(store, name + ".v", dim, dim, rng);
    m.o = Linear<S>::create(store, name + ".o", dim, dim, rng);
    return m;
  }

  static MultiHeadAttention attach(const ParameterStore<S>& store, const std::string& name,
                                   int64_t heads) {
    MultiHeadAttention m;
    m.q = Linear<S>::attach(store, name + ".q");
    m.k = Linear<S>::attach(store, name + ".k");
    m.v = Linear<S>::attach(store, name + ".v");
    m.o = Linear<S>::attach(store, name + ".o");
    m.dim = m.q.in;
    m.heads = heads;
    return m;
  }

  struct Cache {
    typename Linear<S>::Cache cq, ck, cv, co;
    Tensor<S> qm, km, vm;            // T x d projections
    std::vector<Tensor<S>> attn;     // per head, T x T softmax rows
    Tensor<S> concat;                // T x d pre-output-projection
  };

  Tensor<S> forward(const ParameterStore<S>& store, const Tensor<S>& x, Cache* cache = nullptr) const {
    require(x.rank() == 2 && x.cols() == dim, "attention: input width ", x.cols(), " != ", dim);
    const int64_t t_len = x.rows();
    const int64_t dh = dim / heads;
    const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(dh)));

    Cache local;
    Cache& c = cache ? *cache : local;
    c.qm = q.forward(store, x, cache ? &c.cq : nullptr);
    c.km = k.forward(store, x, cache ? &c.ck : nullptr);
    c.vm = v.forward(store, x, cache ? &c.cv : nullptr);

    c.concat = Tensor<S>::matrix(t_len, dim);
    c.attn.assign(static_cast<size_t>(heads), Tensor<S>());
    for (int64_t h = 0; h < heads; ++h) {
      const int64_t off = h * dh;
      Tensor<S> scores = Tensor<S>::matrix(t_len, t_len);
      for (int64_t i = 0; i < t_len; ++i) {
        const S* qi = c.qm.row_ptr(i) + off;
        for (int64_t j = 0; j < t_len; ++j) {
          const S* kj = c.km.row_ptr(j) + off;
          S acc = S(0);
          for (int64_t p = 0; p < dh; ++p) acc += qi[p] * kj[p];
          scores.at(i, j) = acc * scale;
        }
      }
      // row softmax
      for (int64_t i = 0; i < t_len; ++i) {
        S* row = scores.row_ptr(i);
        S mx = row[0];
        for (int64_t j = 1; j < t_len; ++j) mx = std::max(mx, row[j]);
        S sum = S(0);
        for (int64_t j = 0; j < t_len; ++j) {
          row[j] = static_cast<S>(std::exp(static_cast<double>(row[j] - mx)));
          sum += row[j];
        }
        for (int64_t j = 0; j < t_len; ++j) row[j] /= sum;
      }
      for (int64_t i = 0; i < t_len; ++i) {
        const S* arow = scores.row_ptr(i);
        S* out = c.concat.row_ptr(i) + off;
        for (int64_t j = 0; j < t_len; ++j) {
          const S av = arow[j];
          const S* vj = c.vm.row_ptr(j) + off;
          for (int64_t p = 0; p < dh; ++p) out[p] += av * vj[p];
        }
      }
      c.attn[static_cast<size_t>(h)] = std::move(scores);
    }
    return o.forward(store, c.concat, cache ? &c.co : nullptr);
  }

  Tensor<S> backward(ParameterStore<S>& store, const Tensor<S>& dy, const Cache& c) const {
    const int64_t t_len = dy.rows();
    const int64_t dh = dim / heads;
    const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(dh)));

    Tensor<S> dconcat = o.backward(store, dy, c.co);
    Tensor<S> dq = Tensor<S>::matrix(t_len, dim);
    Tensor<S> dk = Tensor<S>::matrix(t_len, dim);
    Tensor<S> dv = Tensor<S>::matrix(t_len, dim);

    for (int64_t h = 0; h < heads; ++h) {
      const int64_t off = h * dh;
      const Tensor<S>& attn = c.attn[static_cast<size_t>(h)];
      // dV and dA
      Tensor<S> dattn = Tensor<S>::matrix(t_len, t_len);
      for (int64_t i = 0; i < t_len; ++i) {
        const S* doi = dconcat.row_ptr(i) + off;
        const S* arow = attn.row_ptr(i);
        S* darow = dattn.row_ptr(i);
        for (int64_t j = 0; j < t_len; ++j) {
          const S* vj = c.vm.row_ptr(j) + off;
          S* dvj = dv.row_ptr(j) + off;
          S acc = S(0);
          for (int64_t p = 0; p < dh; ++p) {
            acc += doi[p] * vj[p];
            dvj[p] += arow[j] * doi[p];
          }
          darow[j] = acc;
        }
      }
      // softmax backward: dS_ij = A_ij (dA_ij - sum_k A_ik dA_ik)
      for (int64_t i = 0; i < t_len; ++i) {
        const S* arow = attn.row_ptr(i);
        S* darow = dattn.row_ptr(i);
        S inner = S(0);
        for (int64_t j = 0; j < t_len; ++j) inner += arow[j] * darow[j];
        for (int64_t j = 0; j < t_len; ++j) darow[j] = arow[j] * (darow[j] - inner);
      }
      // dQ, dK through the scaled dot products
      for (int64_t i = 0; i < t_len; ++i) {
        const S* darow = dattn.row_ptr(i);
        const S* qi = c.qm.row_ptr(i) + off;
        S* dqi = dq.row_ptr(i) + off;
        for (int64_t j = 0; j < t_len; ++j) {
          const S ds = darow[j] * scale;
          const S* kj = c.km.row_ptr(j) + off;
          S* dkj = dk.row_ptr(j) + off;
          for (int64_t p = 0; p < dh; ++p) {
            dqi[p] += ds * kj[p];
            dkj[p] += ds * qi[p];
          }
        }
      }
    }

    Tensor<S> dx = q.backward(store, dq, c.cq);
    axpy(S(1), k.backward(store, dk, c.ck), dx);
    axpy(S(1), v.backward(store, dv, c.cv), dx);
    return dx;
  }
};

}  // namespace gazekit::nn
