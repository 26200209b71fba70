#pragma once

#include <map>
#include <string>
#include <vector>

#include "gazekit/style/encoder.hpp"

namespace gazekit::metrics {

// Mean over aligned windows of 1 - cos(enc(gt_win), enc(pred_win)). Both
// sequences must be in the encoder's (normalized) input space and are
// windowed identically, non-overlapping with stride M.
template <class S>
double style_cosine_error(const Tensor<S>& pred, const Tensor<S>& gt,
                          const style::StyleEncoder<S>& encoder, const ParameterStore<S>& store,
                          int64_t stride = 0) {
  require(pred.rank() == 2 && gt.rank() == 2 && pred.cols() == motion::kMotionDims &&
              gt.cols() == motion::kMotionDims,
          "style_cosine_error: want T x 7 inputs");
  const int64_t m_len = encoder.cfg.window;
  const int64_t t_total = std::min(pred.rows(), gt.rows());
  require(t_total >= m_len, "style_cosine_error: sequence of ", t_total,
          " frames shorter than window M = ", m_len);
  if (stride <= 0) stride = m_len;

  auto window_of = [&](const Tensor<S>& src, int64_t start) {
    Tensor<S> w = Tensor<S>::matrix(m_len, motion::kMotionDims);
    for (int64_t i = 0; i < m_len; ++i) {
      for (int c = 0; c < motion::kMotionDims; ++c) w.at(i, c) = src.at(start + i, c);
    }
    return w;
  };

  double acc = 0.0;
  int64_t n = 0;
  for (int64_t s = 0; s + m_len <= t_total; s += stride) {
    Tensor<S> e_gt = encoder.encode_window(store, window_of(gt, s));
    Tensor<S> e_pred = encoder.encode_window(store, window_of(pred, s));
    acc += 1.0 - style::cosine_sim(e_gt, e_pred);
    ++n;
  }
  return acc / static_cast<double>(n);
}

// Standard mean silhouette coefficient with Euclidean distance.
template <class S>
double silhouette(const Tensor<S>& points, const std::vector<std::string>& labels) {
  require(points.rank() == 2, "silhouette: want N x d points");
  const int64_t n = points.rows();
  require(static_cast<int64_t>(labels.size()) == n, "silhouette: label count mismatch");

  std::map<std::string, std::vector<int64_t>> clusters;
  for (int64_t i = 0; i < n; ++i) clusters[labels[static_cast<size_t>(i)]].push_back(i);
  require(clusters.size() >= 2, "silhouette: need at least 2 labels");
  for (const auto& [name, members] : clusters) {
    require(members.size() >= 2, "silhouette: singleton cluster '", name, "'");
  }

  auto dist = [&](int64_t a, int64_t b) {
    double acc = 0.0;
    for (int64_t j = 0; j < points.cols(); ++j) {
      const double d = static_cast<double>(points.at(a, j)) - static_cast<double>(points.at(b, j));
      acc += d * d;
    }
    return std::sqrt(acc);
  };

  double total = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const std::string& own = labels[static_cast<size_t>(i)];
    double a = 0.0;
    for (int64_t j : clusters[own]) {
      if (j != i) a += dist(i, j);
    }
    a /= static_cast<double>(clusters[own].size() - 1);

    double b = std::numeric_limits<double>::max();
    for (const auto& [name, members] : clusters) {
      if (name == own) continue;
      double mean = 0.0;
      for (int64_t j : members) mean += dist(i, j);
      mean /= static_cast<double>(members.size());
      b = std::min(b, mean);
    }
    const double denom = std::max(a, b);
    total += denom > 0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

// Fraction of query points whose cosine-nearest ground-truth label centroid
// matches their own label.
template <class S>
double centroid_accuracy(const Tensor<S>& ref_points, const std::vector<std::string>& ref_labels,
                         const Tensor<S>& query_points, const std::vector<std::string>& query_labels) {
  require(ref_points.rank() == 2 && query_points.rank() == 2 &&
          ref_points.cols() == query_points.cols(), "centroid_accuracy: dim mismatch");
  std::map<std::string, std::pair<Tensor<double>, int64_t>> centroids;
  for (int64_t i = 0; i < ref_points.rows(); ++i) {
    auto& [sum, count] = centroids
                             .try_emplace(ref_labels[static_cast<size_t>(i)],
                                          Tensor<double>::vector(ref_points.cols()), 0)
                             .first->second;
    for (int64_t j = 0; j < ref_points.cols(); ++j) sum[j] += static_cast<double>(ref_points.at(i, j));
    ++count;
  }
  require(centroids.size() >= 2, "centroid_accuracy: need at least 2 reference labels");
  for (auto& [name, sc] : centroids) {
    for (int64_t j = 0; j < sc.first.size(); ++j) sc.first[j] /= static_cast<double>(sc.second);
  }

  int64_t hits = 0;
  for (int64_t i = 0; i < query_points.rows(); ++i) {
    Tensor<double> q = Tensor<double>::vector(query_points.cols());
    for (int64_t j = 0; j < q.size(); ++j) q[j] = static_cast<double>(query_points.at(i, j));
    double best = -2.0;
    std::string best_label;
    for (const auto& [name, sc] : centroids) {
      const double sim = style::cosine_sim(q, sc.first);
      if (sim > best) {
        best = sim;
        best_label = name;
      }
    }
    if (best_label == query_labels[static_cast<size_t>(i)]) ++hits;
  }
  require(query_points.rows() > 0, "centroid_accuracy: no query points");
  return static_cast<double>(hits) / static_cast<double>(query_points.rows());
}

}  // namespace gazekit::metrics
