#pragma once

#include <cmath>
#include <vector>

#include "gazekit/audio/features.hpp"
#include "gazekit/motion/types.hpp"

namespace gazekit::motion {

// Linear interpolation onto the uniform 25 Hz grid spanning the input
// duration. A 25 fps input is returned unchanged, so resampling is
// idempotent.
inline MotionSequence resample_to_25fps(const MotionSequence& seq) {
  require(seq.fps > 0, "resample: input fps must be positive");
  if (seq.fps == 25.0) return seq;
  require(seq.length() >= 2, "resample: single-frame input at ", seq.fps,
          " fps has no interpolation basis");

  const double duration = static_cast<double>(seq.length() - 1) / seq.fps;
  const int64_t out_len = static_cast<int64_t>(std::floor(duration * 25.0 + 1e-9)) + 1;

  MotionSequence out;
  out.fps = 25.0;
  out.session_id = seq.session_id;
  out.speaker_id = seq.speaker_id;
  out.frames.resize(static_cast<size_t>(out_len));
  for (int64_t j = 0; j < out_len; ++j) {
    const double t = static_cast<double>(j) / 25.0;
    double pos = t * seq.fps;
    int64_t i0 = static_cast<int64_t>(std::floor(pos));
    if (i0 >= seq.length() - 1) i0 = seq.length() - 2;
    const double frac = pos - static_cast<double>(i0);
    const MotionFrame& a = seq.frames[static_cast<size_t>(i0)];
    const MotionFrame& b = seq.frames[static_cast<size_t>(i0 + 1)];
    MotionFrame& f = out.frames[static_cast<size_t>(j)];
    for (int c = 0; c < kMotionDims; ++c) f[c] = a[c] + (b[c] - a[c]) * frac;
  }
  return out;
}

// Drops every frame with any |component| > bound and splits the sequence at
// the drop points into maximal contiguous runs. Windowing happens within
// runs only, never across a gap.
inline std::vector<MotionRun> filter_extreme_angles(const MotionSequence& seq, double bound = 40.0) {
  require(bound > 0, "filter: bound must be positive");
  std::vector<MotionRun> runs;
  MotionRun cur;
  cur.seq.fps = seq.fps;
  cur.seq.session_id = seq.session_id;
  cur.seq.speaker_id = seq.speaker_id;
  cur.source_start = 0;

  auto flush = [&](int64_t next_start) {
    if (!cur.seq.frames.empty()) runs.push_back(std::move(cur));
    cur = MotionRun{};
    cur.seq.fps = seq.fps;
    cur.seq.session_id = seq.session_id;
    cur.seq.speaker_id = seq.speaker_id;
    cur.source_start = next_start;
  };

  for (int64_t i = 0; i < seq.length(); ++i) {
    const MotionFrame& f = seq.frames[static_cast<size_t>(i)];
    bool keep = true;
    for (int c = 0; c < kMotionDims; ++c) {
      if (std::abs(f[c]) > bound) {
        keep = false;
        break;
      }
    }
    if (keep) {
      cur.seq.frames.push_back(f);
    } else {
      flush(i + 1);
    }
  }
  flush(seq.length());
  return runs;
}

// One training/eval window: M past motion frames, the N future frames to
// predict, and the audio features covering the past span.
struct WindowPair {
  Tensor<float> past_motion;    // M x 7
  Tensor<float> future_motion;  // N x 7
  Tensor<float> audio_window;   // M x F
  int64_t t_index = 0;          // start frame in the source sequence
};

template <class S>
Tensor<S> sequence_to_tensor(const MotionSequence& seq, int64_t start, int64_t len) {
  require(start >= 0 && start + len <= seq.length(), "window out of range");
  Tensor<S> out = Tensor<S>::matrix(len, kMotionDims);
  for (int64_t i = 0; i < len; ++i) {
    for (int c = 0; c < kMotionDims; ++c) {
      out.at(i, c) = static_cast<S>(seq.frames[static_cast<size_t>(start + i)][c]);
    }
  }
  return out;
}

inline MotionSequence tensor_to_sequence(const Tensor<float>& m, double fps = 25.0) {
  require(m.rank() == 2 && m.cols() == kMotionDims, "tensor_to_sequence: want T x 7");
  MotionSequence seq;
  seq.fps = fps;
  seq.frames.resize(static_cast<size_t>(m.rows()));
  for (int64_t i = 0; i < m.rows(); ++i) {
    for (int c = 0; c < kMotionDims; ++c) {
      seq.frames[static_cast<size_t>(i)][c] = static_cast<double>(m.at(i, c));
    }
  }
  return seq;
}

// Windows start at frame 0 and advance by `stride`. A sequence shorter than
// M+N yields no windows. `source_offset` shifts t_index for filtered runs.
inline std::vector<WindowPair> make_windows(const MotionSequence& seq,
                                            const audio::FeatureSequence& feats, int64_t m_len,
                                            int64_t n_len, int64_t stride,
                                            int64_t source_offset = 0) {
  require(m_len >= 2 && n_len >= 1 && stride >= 1, "make_windows: need M >= 2, N >= 1, stride >= 1");
  require(feats.frames.rows() == seq.length(), "make_windows: feature length ",
          feats.frames.rows(), " != motion length ", seq.length());
  std::vector<WindowPair> out;
  const int64_t t_total = seq.length();
  for (int64_t s = 0; s + m_len + n_len <= t_total; s += stride) {
    WindowPair w;
    w.t_index = source_offset + s;
    w.past_motion = sequence_to_tensor<float>(seq, s, m_len);
    w.future_motion = sequence_to_tensor<float>(seq, s + m_len, n_len);
    w.audio_window = Tensor<float>::matrix(m_len, feats.frames.cols());
    for (int64_t i = 0; i < m_len; ++i) {
      for (int64_t j = 0; j < feats.frames.cols(); ++j) {
        w.audio_window.at(i, j) = feats.frames.at(s + i, j);
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace gazekit::motion
