#pragma once

#include <vector>

#include "gazekit/motion/types.hpp"
#include "gazekit/tensor.hpp"

namespace gazekit::metrics {

enum GazeLabel : uint8_t { kSaccade = 0, kFixation = 1 };
using GazeLabelSeries = std::vector<uint8_t>;

struct IdtConfig {
  int64_t window_len = 3;   // opening window size
  double disp_max = 3.5;    // degrees
  int64_t min_dur = 3;      // frames
};

// Binocular gaze matrix for I-DT: T x 4 columns
// [l_eye_pitch, l_eye_yaw, r_eye_pitch, r_eye_yaw].
template <class S>
Tensor<double> gaze_matrix(const Tensor<S>& motion7) {
  require(motion7.rank() == 2 && motion7.cols() == motion::kMotionDims, "gaze_matrix: want T x 7");
  Tensor<double> g = Tensor<double>::matrix(motion7.rows(), 4);
  for (int64_t t = 0; t < motion7.rows(); ++t) {
    g.at(t, 0) = static_cast<double>(motion7.at(t, motion::kLeftEyePitch));
    g.at(t, 1) = static_cast<double>(motion7.at(t, motion::kLeftEyeYaw));
    g.at(t, 2) = static_cast<double>(motion7.at(t, motion::kRightEyePitch));
    g.at(t, 3) = static_cast<double>(motion7.at(t, motion::kRightEyeYaw));
  }
  return g;
}

inline Tensor<double> gaze_matrix(const motion::MotionSequence& seq) {
  Tensor<double> g = Tensor<double>::matrix(seq.length(), 4);
  for (int64_t t = 0; t < seq.length(); ++t) {
    const auto& f = seq.frames[static_cast<size_t>(t)];
    g.at(t, 0) = f[motion::kLeftEyePitch];
    g.at(t, 1) = f[motion::kLeftEyeYaw];
    g.at(t, 2) = f[motion::kRightEyePitch];
    g.at(t, 3) = f[motion::kRightEyeYaw];
  }
  return g;
}

namespace detail {

// Dispersion D = (max x - min x) + (max y - min y) where x gathers the yaw
// samples of both eyes over the window and y the pitch samples.
struct DispersionWindow {
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  bool empty = true;

  void add(const Tensor<double>& gaze, int64_t t) {
    const double ys[2] = {gaze.at(t, 0), gaze.at(t, 2)};  // pitch
    const double xs[2] = {gaze.at(t, 1), gaze.at(t, 3)};  // yaw
    if (empty) {
      min_x = max_x = xs[0];
      min_y = max_y = ys[0];
      empty = false;
    }
    for (double x : xs) {
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
    }
    for (double y : ys) {
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }

  double dispersion() const { return (max_x - min_x) + (max_y - min_y); }
};

}  // namespace detail

// Classic I-DT sweep: open a window of window_len frames; if its dispersion
// is within disp_max, grow until growing would exceed it, label the window
// fixation and restart after it; otherwise slide one frame. Frames never
// captured by a fixation window are saccade.
inline GazeLabelSeries idt_labels(const Tensor<double>& gaze, const IdtConfig& cfg = IdtConfig()) {
  require(gaze.rank() == 2 && gaze.cols() == 4, "idt_labels: want T x 4 gaze matrix");
  require(cfg.window_len >= 1 && cfg.min_dur >= 1 && cfg.disp_max >= 0, "idt_labels: bad config");
  require(cfg.window_len >= cfg.min_dur, "idt_labels: opening window shorter than min duration");
  const int64_t t_total = gaze.rows();
  require(t_total >= cfg.min_dur, "idt_labels: sequence of ", t_total,
          " frames shorter than the minimum fixation duration ", cfg.min_dur);

  GazeLabelSeries labels(static_cast<size_t>(t_total), kSaccade);
  int64_t i = 0;
  while (i + cfg.window_len <= t_total) {
    detail::DispersionWindow w;
    for (int64_t t = i; t < i + cfg.window_len; ++t) w.add(gaze, t);
    if (w.dispersion() <= cfg.disp_max) {
      int64_t j = i + cfg.window_len;
      while (j < t_total) {
        detail::DispersionWindow grown = w;
        grown.add(gaze, j);
        if (grown.dispersion() > cfg.disp_max) break;
        w = grown;
        ++j;
      }
      for (int64_t t = i; t < j; ++t) labels[static_cast<size_t>(t)] = kFixation;
      i = j;
    } else {
      ++i;
    }
  }
  return labels;
}

inline double fixation_ratio(const GazeLabelSeries& labels) {
  require(!labels.empty(), "fixation_ratio: empty label series");
  int64_t fix = 0;
  for (uint8_t l : labels) fix += (l == kFixation) ? 1 : 0;
  return static_cast<double>(fix) / static_cast<double>(labels.size());
}

// ---- gaze-head compensation ----

// Velocities in degrees/s: 25 x frame difference. Row t is the velocity over
// the step t -> t+1; T-1 rows for a T-frame sequence.
template <class S>
Tensor<double> head_velocity(const Tensor<S>& motion7, double fps = 25.0) {
  require(motion7.rows() >= 2, "head_velocity: need at least 2 frames");
  Tensor<double> v = Tensor<double>::matrix(motion7.rows() - 1, 2);
  for (int64_t t = 0; t + 1 < motion7.rows(); ++t) {
    v.at(t, 0) = fps * (static_cast<double>(motion7.at(t + 1, motion::kHeadPitch)) -
                        static_cast<double>(motion7.at(t, motion::kHeadPitch)));
    v.at(t, 1) = fps * (static_cast<double>(motion7.at(t + 1, motion::kHeadYaw)) -
                        static_cast<double>(motion7.at(t, motion::kHeadYaw)));
  }
  return v;
}

// Eye velocity averaged across both eyes, (pitch, yaw) per row.
template <class S>
Tensor<double> eye_velocity(const Tensor<S>& motion7, double fps = 25.0) {
  require(motion7.rows() >= 2, "eye_velocity: need at least 2 frames");
  Tensor<double> v = Tensor<double>::matrix(motion7.rows() - 1, 2);
  for (int64_t t = 0; t + 1 < motion7.rows(); ++t) {
    const double p0 = 0.5 * (static_cast<double>(motion7.at(t, motion::kLeftEyePitch)) +
                             static_cast<double>(motion7.at(t, motion::kRightEyePitch)));
    const double p1 = 0.5 * (static_cast<double>(motion7.at(t + 1, motion::kLeftEyePitch)) +
                             static_cast<double>(motion7.at(t + 1, motion::kRightEyePitch)));
    const double y0 = 0.5 * (static_cast<double>(motion7.at(t, motion::kLeftEyeYaw)) +
                             static_cast<double>(motion7.at(t, motion::kRightEyeYaw)));
    const double y1 = 0.5 * (static_cast<double>(motion7.at(t + 1, motion::kLeftEyeYaw)) +
                             static_cast<double>(motion7.at(t + 1, motion::kRightEyeYaw)));
    v.at(t, 0) = fps * (p1 - p0);
    v.at(t, 1) = fps * (y1 - y0);
  }
  return v;
}

struct CompensationBands {
  double still_max = 20.0;  // |g| below this: score = -|h|
  double band_lo = 25.0;    // cosine band
  double band_hi = 90.0;
  bool normalize_head = false;  // optional: -|h|/band_hi in the first branch
};

// Per-frame piecewise score from net gaze shift g = e + h:
//   -|h|        when |g| < 20
//   -cos(theta) when 25 <= |g| <= 90 (theta between h and e; 0 if either is zero)
//   0           otherwise (including the literal 20..25 gap and |g| > 90)
inline double compensation_score(const Tensor<double>& head_vel, const Tensor<double>& eye_vel,
                                 const CompensationBands& bands = CompensationBands()) {
  require(head_vel.rank() == 2 && head_vel.cols() == 2 && eye_vel.rank() == 2 && eye_vel.cols() == 2,
          "compensation_score: want T x 2 velocity matrices");
  require(head_vel.rows() == eye_vel.rows(), "compensation_score: length mismatch (",
          head_vel.rows(), " vs ", eye_vel.rows(), ")");
  const int64_t t_total = head_vel.rows();
  require(t_total >= 1, "compensation_score: empty input");

  double acc = 0.0;
  for (int64_t t = 0; t < t_total; ++t) {
    const double hx = head_vel.at(t, 0), hy = head_vel.at(t, 1);
    const double ex = eye_vel.at(t, 0), ey = eye_vel.at(t, 1);
    const double gx = hx + ex, gy = hy + ey;
    const double g_norm = std::hypot(gx, gy);
    const double h_norm = std::hypot(hx, hy);
    const double e_norm = std::hypot(ex, ey);
    double score = 0.0;
    if (g_norm < bands.still_max) {
      score = bands.normalize_head ? -h_norm / bands.band_hi : -h_norm;
    } else if (g_norm >= bands.band_lo && g_norm <= bands.band_hi) {
      if (h_norm > 0 && e_norm > 0) {
        const double cross = hx * ey - hy * ex;
        const double dotv = hx * ex + hy * ey;
        const double theta = std::atan2(cross, dotv);
        score = -std::cos(theta);
      }
    }
    acc += score;
  }
  return acc / static_cast<double>(t_total);
}

// Sim = 1 - (|fix_gt - fix_pred| + |comp_gt - comp_pred|); unclamped, so
// values below 0 are possible and reported as-is.
inline double sim_with_gt(double fix_gt, double fix_pred, double comp_gt, double comp_pred) {
  require(fix_gt >= 0 && fix_gt <= 1 && fix_pred >= 0 && fix_pred <= 1,
          "sim_with_gt: fixation ratios must lie in [0, 1]");
  return 1.0 - (std::abs(fix_gt - fix_pred) + std::abs(comp_gt - comp_pred));
}

}  // namespace gazekit::metrics
