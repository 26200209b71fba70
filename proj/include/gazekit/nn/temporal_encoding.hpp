#pragma once

#include "gazekit/tensor.hpp"

namespace gazekit::nn {

// Sinusoidal position code: PE[t,2i] = sin(t / 10000^(2i/d)),
// PE[t,2i+1] = cos(t / 10000^(2i/d)). Added to projected inputs to mark time.
template <class S>
Tensor<S> temporal_encoding(int64_t steps, int64_t dim) {
  require(dim >= 2 && dim % 2 == 0, "temporal encoding width must be even, got ", dim);
  Tensor<S> pe = Tensor<S>::matrix(steps, dim);
  for (int64_t t = 0; t < steps; ++t) {
    for (int64_t i = 0; i < dim / 2; ++i) {
      double freq = std::pow(10000.0, -2.0 * static_cast<double>(i) / static_cast<double>(dim));
      double angle = static_cast<double>(t) * freq;
      pe.at(t, 2 * i) = static_cast<S>(std::sin(angle));
      pe.at(t, 2 * i + 1) = static_cast<S>(std::cos(angle));
    }
  }
  return pe;
}

template <class S>
void add_temporal_encoding(Tensor<S>& x) {
  Tensor<S> pe = temporal_encoding<S>(x.rows(), x.cols());
  axpy(S(1), pe, x);
}

}  // namespace gazekit::nn
