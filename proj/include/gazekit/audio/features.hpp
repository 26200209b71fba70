#pragma once

#include <filesystem>

#include "gazekit/io/tensor_file.hpp"
#include "gazekit/tensor.hpp"

namespace gazekit::audio {

// Per-frame audio features aligned 1:1 with 25 fps motion frames.
struct FeatureSequence {
  Tensor<float> frames;  // T x F
  double fps = 25.0;

  int64_t length() const { return frames.empty() ? 0 : frames.rows(); }
  int64_t feature_dim() const { return frames.empty() ? 0 : frames.cols(); }
};

// Output length becomes exactly motion_len, by truncation or edge-repeat
// padding. A mismatch above 2 frames signals desynchronized inputs.
inline FeatureSequence align_features(const FeatureSequence& feats, int64_t motion_len) {
  const int64_t t = feats.length();
  require(std::abs(t - motion_len) <= 2, "align_features: feature length ", t,
          " vs motion length ", motion_len, " differ by more than 2 frames");
  if (t == motion_len) return feats;
  FeatureSequence out;
  out.fps = feats.fps;
  out.frames = Tensor<float>::matrix(motion_len, feats.feature_dim());
  for (int64_t i = 0; i < motion_len; ++i) {
    const int64_t src = std::min(i, t - 1);
    for (int64_t j = 0; j < feats.feature_dim(); ++j) out.frames.at(i, j) = feats.frames.at(src, j);
  }
  return out;
}

inline void save_features(const std::filesystem::path& path, const FeatureSequence& feats) {
  io::TensorFile tf;
  tf.meta["kind"] = "features";
  tf.meta["fps"] = feats.fps;
  tf.tensors.emplace_back("features", feats.frames);
  io::save_tensor_file(path, tf);
}

inline FeatureSequence load_features(const std::filesystem::path& path) {
  io::TensorFile tf = io::load_tensor_file(path);
  const Tensor<float>& t = tf.get("features");
  require(t.rank() == 2, path.string(), ": feature tensor must be rank 2, got rank ", t.rank());
  FeatureSequence out;
  out.frames = t;
  out.fps = tf.meta.contains("fps") ? tf.meta["fps"].get<double>() : 25.0;
  require(out.frames.all_finite(), path.string(), ": non-finite feature values");
  return out;
}

inline FeatureSequence slice_features(const FeatureSequence& feats, int64_t start, int64_t len) {
  require(start >= 0 && start + len <= feats.length(), "slice_features: range out of bounds");
  FeatureSequence out;
  out.fps = feats.fps;
  out.frames = Tensor<float>::matrix(len, feats.feature_dim());
  for (int64_t i = 0; i < len; ++i) {
    for (int64_t j = 0; j < feats.feature_dim(); ++j) out.frames.at(i, j) = feats.frames.at(start + i, j);
  }
  return out;
}

}  // namespace gazekit::audio
