#pragma once

#include <array>
#include <string>
#include <vector>

#include "gazekit/common.hpp"

namespace gazekit::motion {

inline constexpr int kMotionDims = 7;

// Channel layout of the 7-dim motion vector. Fixed ordering: head rotation
// first, then per-eye gaze angles.
enum Channel : int {
  kHeadPitch = 0,
  kHeadYaw = 1,
  kHeadRoll = 2,
  kLeftEyePitch = 3,
  kLeftEyeYaw = 4,
  kRightEyePitch = 5,
  kRightEyeYaw = 6,
};

inline const std::array<std::string, kMotionDims>& channel_names() {
  static const std::array<std::string, kMotionDims> names = {
      "head_pitch", "head_yaw", "head_roll", "l_eye_pitch",
      "l_eye_yaw",  "r_eye_pitch", "r_eye_yaw"};
  return names;
}

struct MotionFrame {
  std::array<double, kMotionDims> v{};

  double& operator[](int i) { return v[static_cast<size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<size_t>(i)]; }

  bool all_finite() const {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }
};

struct MotionSequence {
  std::vector<MotionFrame> frames;
  double fps = 25.0;
  std::string session_id;
  std::string speaker_id;

  int64_t length() const { return static_cast<int64_t>(frames.size()); }
};

// Contiguous segment surviving the extreme-angle filter, with its start
// offset in the source sequence so window provenance stays meaningful.
struct MotionRun {
  MotionSequence seq;
  int64_t source_start = 0;
};

}  // namespace gazekit::motion
