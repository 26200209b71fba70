#pragma once

#include <vector>

#include "gazekit/tensor.hpp"

namespace gazekit::style {

// NT-Xent over a batch of 2N embeddings laid out as rows
// [s_1^a ... s_N^a, s_1^b ... s_N^b]; the positive for row i is its pair
// partner p(i) = (i + N) mod 2N. The value is the unaveraged sum over all
// 2N anchors, with the self-term excluded from each denominator.

template <class S>
Tensor<double> pairwise_cosine(const Tensor<S>& embeddings) {
  const int64_t n = embeddings.rows();
  const int64_t d = embeddings.cols();
  std::vector<double> norms(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const S* row = embeddings.row_ptr(i);
    for (int64_t j = 0; j < d; ++j) acc += static_cast<double>(row[j]) * static_cast<double>(row[j]);
    require(acc > 0, "nt_xent: zero embedding at row ", i);
    norms[static_cast<size_t>(i)] = std::sqrt(acc);
  }
  Tensor<double> sim = Tensor<double>::matrix(n, n);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      double acc = 0.0;
      const S* ri = embeddings.row_ptr(i);
      const S* rj = embeddings.row_ptr(j);
      for (int64_t p = 0; p < d; ++p) acc += static_cast<double>(ri[p]) * static_cast<double>(rj[p]);
      sim.at(i, j) = acc / (norms[static_cast<size_t>(i)] * norms[static_cast<size_t>(j)]);
    }
  }
  return sim;
}

// Loss from a precomputed similarity matrix; also the diagnostic hook the
// property tests perturb directly.
inline double nt_xent_from_sims(const Tensor<double>& sim, double tau) {
  require(tau > 0, "nt_xent: temperature must be positive");
  const int64_t n2 = sim.rows();
  require(n2 >= 4 && n2 % 2 == 0, "nt_xent: need 2N >= 4 embeddings, got ", n2);
  const int64_t n = n2 / 2;
  double loss = 0.0;
  for (int64_t i = 0; i < n2; ++i) {
    const int64_t p = (i + n) % n2;
    double denom = 0.0;
    for (int64_t k = 0; k < n2; ++k) {
      if (k == i) continue;
      denom += std::exp(sim.at(i, k) / tau);
    }
    loss += -(sim.at(i, p) / tau) + std::log(denom);
  }
  return loss;
}

template <class S>
struct NtXentResult {
  double loss = 0.0;
  Tensor<S> grad;  // 2N x d_s, d loss / d embeddings
};

template <class S>
NtXentResult<S> nt_xent_loss(const Tensor<S>& embeddings, double tau) {
  require(tau > 0, "nt_xent: temperature must be positive");
  require(embeddings.rank() == 2, "nt_xent: embeddings must be 2N x d");
  const int64_t n2 = embeddings.rows();
  require(n2 >= 4 && n2 % 2 == 0, "nt_xent: need 2N >= 4 embeddings, got ", n2);
  const int64_t n = n2 / 2;
  const int64_t d = embeddings.cols();

  Tensor<double> sim = pairwise_cosine(embeddings);

  NtXentResult<S> out;
  out.loss = nt_xent_from_sims(sim, tau);

  // dL/dsim, then chain through the cosine.
  Tensor<double> dsim = Tensor<double>::matrix(n2, n2);
  for (int64_t i = 0; i < n2; ++i) {
    const int64_t p = (i + n) % n2;
    double denom = 0.0;
    for (int64_t k = 0; k < n2; ++k) {
      if (k == i) continue;
      denom += std::exp(sim.at(i, k) / tau);
    }
    for (int64_t k = 0; k < n2; ++k) {
      if (k == i) continue;
      const double soft = std::exp(sim.at(i, k) / tau) / denom;
      dsim.at(i, k) += soft / tau;
    }
    dsim.at(i, p) -= 1.0 / tau;
  }

  std::vector<double> norms(static_cast<size_t>(n2));
  for (int64_t i = 0; i < n2; ++i) {
    double acc = 0.0;
    const S* row = embeddings.row_ptr(i);
    for (int64_t j = 0; j < d; ++j) acc += static_cast<double>(row[j]) * static_cast<double>(row[j]);
    norms[static_cast<size_t>(i)] = std::sqrt(acc);
  }

  out.grad = Tensor<S>::matrix(n2, d);
  // d sim(i,k) / d e_i = e_k / (|e_i||e_k|) - sim(i,k) e_i / |e_i|^2
  for (int64_t i = 0; i < n2; ++i) {
    const S* ei = embeddings.row_ptr(i);
    S* gi = out.grad.row_ptr(i);
    const double ni = norms[static_cast<size_t>(i)];
    for (int64_t k = 0; k < n2; ++k) {
      if (k == i) continue;
      const double w = dsim.at(i, k) + dsim.at(k, i);  // sim is symmetric in (i,k)
      if (w == 0.0) continue;
      const S* ek = embeddings.row_ptr(k);
      const double nk = norms[static_cast<size_t>(k)];
      const double s_ik = sim.at(i, k);
      for (int64_t j = 0; j < d; ++j) {
        gi[j] += static_cast<S>(w * (static_cast<double>(ek[j]) / (ni * nk) -
                                     s_ik * static_cast<double>(ei[j]) / (ni * ni)));
      }
    }
  }
  return out;
}

}  // namespace gazekit::style
