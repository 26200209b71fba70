#pragma once

#include <vector>

#include "gazekit/motion/types.hpp"
#include "gazekit/tensor.hpp"

namespace gazekit::metrics {

enum class ChannelMask { kAll, kGaze, kHead };

inline std::vector<int> mask_channels(ChannelMask mask) {
  switch (mask) {
    case ChannelMask::kGaze:
      return {motion::kLeftEyePitch, motion::kLeftEyeYaw, motion::kRightEyePitch,
              motion::kRightEyeYaw};
    case ChannelMask::kHead:
      return {motion::kHeadPitch, motion::kHeadYaw, motion::kHeadRoll};
    case ChannelMask::kAll:
    default:
      return {0, 1, 2, 3, 4, 5, 6};
  }
}

// Mean absolute error over frames and selected channels, degrees.
template <class S>
double mae(const Tensor<S>& pred, const Tensor<S>& gt, ChannelMask mask = ChannelMask::kAll) {
  require(pred.shape() == gt.shape(), "mae: shape mismatch");
  require(pred.rank() == 2 && pred.cols() == motion::kMotionDims, "mae: want T x 7");
  const auto chans = mask_channels(mask);
  double acc = 0.0;
  for (int64_t t = 0; t < pred.rows(); ++t) {
    for (int c : chans) {
      acc += std::abs(static_cast<double>(pred.at(t, c)) - static_cast<double>(gt.at(t, c)));
    }
  }
  return acc / (static_cast<double>(pred.rows()) * static_cast<double>(chans.size()));
}

// Mean |delta(pred) - delta(gt)| over frame differences and channels.
template <class S>
double vel_error(const Tensor<S>& pred, const Tensor<S>& gt, ChannelMask mask = ChannelMask::kAll) {
  require(pred.shape() == gt.shape(), "vel_error: shape mismatch");
  require(pred.rows() >= 2, "vel_error: need at least 2 frames");
  const auto chans = mask_channels(mask);
  double acc = 0.0;
  for (int64_t t = 1; t < pred.rows(); ++t) {
    for (int c : chans) {
      const double dp = static_cast<double>(pred.at(t, c)) - static_cast<double>(pred.at(t - 1, c));
      const double dg = static_cast<double>(gt.at(t, c)) - static_cast<double>(gt.at(t - 1, c));
      acc += std::abs(dp - dg);
    }
  }
  return acc / (static_cast<double>(pred.rows() - 1) * static_cast<double>(chans.size()));
}

// Total squared frame-difference energy over selected channels.
template <class S>
double motion_energy(const Tensor<S>& m, ChannelMask mask = ChannelMask::kAll) {
  require(m.rows() >= 2, "motion_energy: need at least 2 frames");
  const auto chans = mask_channels(mask);
  double acc = 0.0;
  for (int64_t t = 1; t < m.rows(); ++t) {
    for (int c : chans) {
      const double d = static_cast<double>(m.at(t, c)) - static_cast<double>(m.at(t - 1, c));
      acc += d * d;
    }
  }
  return acc;
}

// MEE = |E(pred) - E(gt)| with E the total squared frame-difference energy.
template <class S>
double mee(const Tensor<S>& pred, const Tensor<S>& gt, ChannelMask mask = ChannelMask::kAll) {
  require(pred.shape() == gt.shape(), "mee: shape mismatch");
  return std::abs(motion_energy(pred, mask) - motion_energy(gt, mask));
}

}  // namespace gazekit::metrics
