#pragma once

#include <string>

#include "gazekit/param_store.hpp"

namespace gazekit::nn {

// Per-row layer normalization with learned gain/bias.
template <class S>
struct LayerNorm {
  std::string g_name, b_name;
  int64_t dim = 0;
  static constexpr double kEps = 1e-5;

  static LayerNorm create(ParameterStore<S>& store, const std::string& name, int64_t dim) {
    LayerNorm ln;
    ln.g_name = name + ".gamma";
    ln.b_name = name + ".beta";
    ln.dim = dim;
    auto& g = store.add(ln.g_name, {dim});
    g.fill(S(1));
    store.add(ln.b_name, {dim});
    return ln;
  }

  static LayerNorm attach(const ParameterStore<S>& store, const std::string& name) {
    LayerNorm ln;
    ln.g_name = name + ".gamma";
    ln.b_name = name + ".beta";
    ln.dim = store.value(ln.g_name).dim(0);
    return ln;
  }

  struct Cache {
    Tensor<S> xhat;     // normalized rows
    Tensor<S> inv_std;  // per row
  };

  Tensor<S> forward(const ParameterStore<S>& store, const Tensor<S>& x, Cache* cache = nullptr) const {
    require(x.rank() == 2 && x.cols() == dim, "layer_norm ", g_name, ": width mismatch");
    const Tensor<S>& gamma = store.value(g_name);
    const Tensor<S>& beta = store.value(b_name);
    const int64_t rows = x.rows();
    Tensor<S> y = Tensor<S>::matrix(rows, dim);
    Tensor<S> xhat = Tensor<S>::matrix(rows, dim);
    Tensor<S> inv_std = Tensor<S>::vector(rows);
    for (int64_t i = 0; i < rows; ++i) {
      const S* row = x.row_ptr(i);
      double mean = 0.0;
      for (int64_t j = 0; j < dim; ++j) mean += static_cast<double>(row[j]);
      mean /= static_cast<double>(dim);
      double var = 0.0;
      for (int64_t j = 0; j < dim; ++j) {
        double d = static_cast<double>(row[j]) - mean;
        var += d * d;
      }
      var /= static_cast<double>(dim);
      double istd = 1.0 / std::sqrt(var + kEps);
      inv_std[i] = static_cast<S>(istd);
      S* xh = xhat.row_ptr(i);
      S* yr = y.row_ptr(i);
      for (int64_t j = 0; j < dim; ++j) {
        xh[j] = static_cast<S>((static_cast<double>(row[j]) - mean) * istd);
        yr[j] = gamma[j] * xh[j] + beta[j];
      }
    }
    if (cache) {
      cache->xhat = std::move(xhat);
      cache->inv_std = std::move(inv_std);
    }
    return y;
  }

  Tensor<S> backward(ParameterStore<S>& store, const Tensor<S>& dy, const Cache& cache) const {
    const Tensor<S>& gamma = store.value(g_name);
    Tensor<S>& dgamma = store.grad(g_name);
    Tensor<S>& dbeta = store.grad(b_name);
    const int64_t rows = dy.rows();
    Tensor<S> dx = Tensor<S>::matrix(rows, dim);
    for (int64_t i = 0; i < rows; ++i) {
      const S* dyr = dy.row_ptr(i);
      const S* xh = cache.xhat.row_ptr(i);
      double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
      for (int64_t j = 0; j < dim; ++j) {
        double dxh = static_cast<double>(dyr[j]) * static_cast<double>(gamma[j]);
        sum_dxhat += dxh;
        sum_dxhat_xhat += dxh * static_cast<double>(xh[j]);
        dgamma[j] += dyr[j] * xh[j];
        dbeta[j] += dyr[j];
      }
      double inv_n = 1.0 / static_cast<double>(dim);
      double istd = static_cast<double>(cache.inv_std[i]);
      S* dxr = dx.row_ptr(i);
      for (int64_t j = 0; j < dim; ++j) {
        double dxh = static_cast<double>(dyr[j]) * static_cast<double>(gamma[j]);
        dxr[j] = static_cast<S>(istd * (dxh - inv_n * sum_dxhat -
                                        static_cast<double>(xh[j]) * inv_n * sum_dxhat_xhat));
      }
    }
    return dx;
  }
};

}  // namespace gazekit::nn
