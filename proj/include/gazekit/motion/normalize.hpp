#pragma once

#include <array>
#include <vector>

#include "gazekit/motion/types.hpp"
#include "gazekit/tensor.hpp"

namespace gazekit::motion {

// Per-dimension mean/std over a training corpus. Population (1/N) standard
// deviation, so stats written into checkpoints are reproducible.
struct NormalizationStats {
  std::array<double, kMotionDims> mean{};
  std::array<double, kMotionDims> std{};

  static NormalizationStats identity() {
    NormalizationStats s;
    s.mean.fill(0.0);
    s.std.fill(1.0);
    return s;
  }
};

inline NormalizationStats fit_normalization(const std::vector<MotionSequence>& corpus) {
  int64_t total = 0;
  for (const auto& seq : corpus) total += seq.length();
  require(total >= 2, "fit_normalization: need at least 2 frames, got ", total);

  NormalizationStats stats;
  for (const auto& seq : corpus) {
    for (const auto& f : seq.frames) {
      for (int c = 0; c < kMotionDims; ++c) stats.mean[static_cast<size_t>(c)] += f[c];
    }
  }
  for (int c = 0; c < kMotionDims; ++c) stats.mean[static_cast<size_t>(c)] /= static_cast<double>(total);
  for (const auto& seq : corpus) {
    for (const auto& f : seq.frames) {
      for (int c = 0; c < kMotionDims; ++c) {
        double d = f[c] - stats.mean[static_cast<size_t>(c)];
        stats.std[static_cast<size_t>(c)] += d * d;
      }
    }
  }
  for (int c = 0; c < kMotionDims; ++c) {
    stats.std[static_cast<size_t>(c)] = std::sqrt(stats.std[static_cast<size_t>(c)] / static_cast<double>(total));
    require(stats.std[static_cast<size_t>(c)] >= 1e-8, "fit_normalization: degenerate dimension '",
            channel_names()[static_cast<size_t>(c)], "' (std < 1e-8)");
  }
  return stats;
}

inline MotionSequence normalize(const MotionSequence& seq, const NormalizationStats& stats) {
  MotionSequence out = seq;
  for (auto& f : out.frames) {
    for (int c = 0; c < kMotionDims; ++c) {
      f[c] = (f[c] - stats.mean[static_cast<size_t>(c)]) / stats.std[static_cast<size_t>(c)];
    }
  }
  return out;
}

inline MotionSequence denormalize(const MotionSequence& seq, const NormalizationStats& stats) {
  MotionSequence out = seq;
  for (auto& f : out.frames) {
    for (int c = 0; c < kMotionDims; ++c) {
      f[c] = f[c] * stats.std[static_cast<size_t>(c)] + stats.mean[static_cast<size_t>(c)];
    }
  }
  return out;
}

template <class S>
void normalize_rows(Tensor<S>& motion, const NormalizationStats& stats) {
  require(motion.rank() == 2 && motion.cols() == kMotionDims, "normalize_rows: want T x 7");
  for (int64_t i = 0; i < motion.rows(); ++i) {
    S* row = motion.row_ptr(i);
    for (int c = 0; c < kMotionDims; ++c) {
      row[c] = static_cast<S>((static_cast<double>(row[c]) - stats.mean[static_cast<size_t>(c)]) /
                              stats.std[static_cast<size_t>(c)]);
    }
  }
}

template <class S>
void denormalize_rows(Tensor<S>& motion, const NormalizationStats& stats) {
  require(motion.rank() == 2 && motion.cols() == kMotionDims, "denormalize_rows: want T x 7");
  for (int64_t i = 0; i < motion.rows(); ++i) {
    S* row = motion.row_ptr(i);
    for (int c = 0; c < kMotionDims; ++c) {
      row[c] = static_cast<S>(static_cast<double>(row[c]) * stats.std[static_cast<size_t>(c)] +
                              stats.mean[static_cast<size_t>(c)]);
    }
  }
}

}  // namespace gazekit::motion
