#pragma once

#include <vector>

#include "gazekit/audio/wav.hpp"
#include "gazekit/motion/types.hpp"
#include "gazekit/synth/profile.hpp"

namespace gazekit::synth {

// One generated session plus the generator's own phase labels (useful as
// construction ground truth in tests; not written to disk).
struct SessionSample {
  motion::MotionSequence motion;
  audio::AudioClip audio;
  std::vector<uint8_t> saccade_phase;   // 1 during saccade frames
  std::vector<int64_t> saccade_onsets;  // frame indices
};

namespace detail {

// Order-1 autoregressive noise with a chosen stationary standard deviation.
// Innovations and values are clamped so per-frame deltas stay bounded; the
// fixation-speed budget below depends on that.
struct OuNoise {
  double value = 0.0;
  double rho = 0.9;
  double step_sd = 0.0;
  double value_cap = 0.0;

  static OuNoise with_sd(double stationary_sd, double rho, Rng& rng) {
    OuNoise n;
    n.rho = rho;
    n.step_sd = stationary_sd * std::sqrt(1.0 - rho * rho);
    n.value_cap = 3.0 * stationary_sd;
    n.value = std::clamp(rng.normal(0.0, stationary_sd), -n.value_cap, n.value_cap);
    return n;
  }

  double tick(Rng& rng) {
    const double xi = std::clamp(rng.normal(0.0, step_sd), -2.0 * step_sd, 2.0 * step_sd);
    value = std::clamp(rho * value + xi, -value_cap, value_cap);
    return value;
  }
};

// Noise-driven damped oscillator; narrowband, so drift stays predictable
// from a short history window. Velocity RMS calibrated to vel_rms.
struct DriftOscillator {
  double x = 0.0, v = 0.0;
  double omega = 1.0, zeta = 0.15, accel_sd = 0.0, dt = 0.04;

  static DriftOscillator make(double vel_rms, double freq_hz, Rng& rng) {
    DriftOscillator d;
    d.omega = 2.0 * 3.14159265358979323846 * freq_hz;
    d.accel_sd = vel_rms * 2.0 * std::sqrt(d.zeta * d.omega);
    d.v = rng.normal(0.0, vel_rms);
    d.x = rng.normal(0.0, vel_rms / d.omega);
    return d;
  }

  double tick(Rng& rng) {
    const double v_cap = 3.0 * accel_sd / (2.0 * std::sqrt(zeta * omega));
    const double a = -omega * omega * x - 2.0 * zeta * omega * v +
                     accel_sd * rng.normal() / std::sqrt(dt);
    v = std::clamp(v + a * dt, -v_cap, v_cap);
    x = std::clamp(x + v * dt, -5.0, 5.0);
    return x;
  }
};

// Minimum-jerk displacement profile, s in [0, 1].
inline double min_jerk(double s) { return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s); }

}  // namespace detail

// Gaze: alternating fixation dwells (small jitter, velocity < 30 deg/s) and
// ballistic minimum-jerk saccades (peak velocity > 30 deg/s) that shuttle
// between two slowly wandering anchor clusters, the way conversational gaze
// revisits a few points of interest. Head: the gaze direction passed through
// a heavy two-pole low-pass, scaled by head_gain, plus narrowband drift; the
// saccade oscillation is filtered out, so the head mostly orients to the
// wandering cluster midline and creeps with a phase lag near 180 degrees.
// Eye-in-head channels are gaze minus head, giving the stabilization
// signature: during gaze shifts the head's residual creep opposes the eye
// velocity. Audio: amplitude-modulated noise whose envelope pulses around
// saccade onsets with strength speech_coupling.
inline SessionSample generate_session(const StyleProfile& profile, double seconds, Rng& rng,
                                      int sample_rate = 16000) {
  profile.validate();
  require(seconds >= 2.0, "generate_session: need at least 2 seconds");
  const double dt = 0.04;
  const int64_t t_total = static_cast<int64_t>(std::llround(seconds * 25.0));

  SessionSample out;
  out.motion.fps = 25.0;
  out.motion.frames.resize(static_cast<size_t>(t_total));
  out.saccade_phase.assign(static_cast<size_t>(t_total), 0);

  // two anchor clusters separated by roughly the speaker's saccade amplitude
  const double spread = std::min(30.0, 1.4 * profile.saccade_amp_mean);
  const double sep = std::max(4.5, 1.1 * profile.saccade_amp_mean);
  const double base_p = rng.uniform(-8.0, 8.0);
  const double base_y = rng.uniform(-8.0, 8.0);
  const double orient = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  const double cluster_p[2] = {base_p + 0.5 * sep * std::sin(orient),
                               base_p - 0.5 * sep * std::sin(orient)};
  const double cluster_y[2] = {base_y + 0.5 * sep * std::cos(orient),
                               base_y - 0.5 * sep * std::cos(orient)};
  int cluster_idx = 0;

  // slow common wander of both clusters
  auto wander_p = detail::OuNoise::with_sd(0.3 * spread, 0.992, rng);
  auto wander_y = detail::OuNoise::with_sd(0.3 * spread, 0.992, rng);

  double gaze_pitch = cluster_p[0], gaze_yaw = cluster_y[0];
  double target_pitch = gaze_pitch, target_yaw = gaze_yaw;
  // two-pole low-pass of the gaze, the head's pursuit input
  const double alpha_s = 0.02;
  double s1_p = gaze_pitch, s1_y = gaze_yaw, s2_p = gaze_pitch, s2_y = gaze_yaw;
  double head_pitch = profile.head_gain * s2_p;
  double head_yaw = profile.head_gain * s2_y;

  auto jit_p = detail::OuNoise::with_sd(profile.noise_scale, 0.9, rng);
  auto jit_y = detail::OuNoise::with_sd(profile.noise_scale, 0.9, rng);
  auto drift_p = detail::DriftOscillator::make(profile.head_drift_scale, 0.35, rng);
  auto drift_y = detail::DriftOscillator::make(profile.head_drift_scale, 0.25, rng);
  auto roll_d = detail::DriftOscillator::make(0.6 * profile.head_drift_scale, 0.2, rng);
  auto nl_p = detail::OuNoise::with_sd(profile.noise_scale, 0.9, rng);
  auto nl_y = detail::OuNoise::with_sd(profile.noise_scale, 0.9, rng);
  auto nr_p = detail::OuNoise::with_sd(profile.noise_scale, 0.9, rng);
  auto nr_y = detail::OuNoise::with_sd(profile.noise_scale, 0.9, rng);

  // Speed budget: head pursuit capped at 14 deg/s (vector norm), jitter and
  // per-eye noise innovations clamped, saccade amplitude at least 4.5 deg.
  // Worst-case eye-channel speed during fixation then stays below 30 deg/s
  // and saccade peaks stay above it.
  const double head_step_cap = 14.0 * dt;
  const double kTargetBox = 35.0;
  const double kReachBox = 34.0;  // |target - head| per axis keeps |eye-in-head| < 40
  const double kMinSaccade = 4.5;

  int64_t dwell_left = 0;
  int64_t sacc_left = 0, sacc_len = 0;
  double sacc_from_p = 0, sacc_from_y = 0, sacc_to_p = 0, sacc_to_y = 0;

  auto draw_dwell = [&]() -> int64_t {
    if (profile.saccade_rate <= 0.0) return t_total + 1;  // never saccade
    const double sacc_frames = std::min(8.0, std::max(2.0, 0.78 * profile.saccade_amp_mean));
    const double gap = std::max(2.0, 25.0 / profile.saccade_rate - sacc_frames);
    const double mean = 0.5 * (profile.fixation_dwell_mean + gap);
    return std::max<int64_t>(2, static_cast<int64_t>(std::llround(mean * rng.uniform(0.8, 1.2))));
  };

  auto clamp_reachable = [&](double& p, double& y) {
    p = std::clamp(p, std::max(-kTargetBox, head_pitch - kReachBox),
                   std::min(kTargetBox, head_pitch + kReachBox));
    y = std::clamp(y, std::max(-kTargetBox, head_yaw - kReachBox),
                   std::min(kTargetBox, head_yaw + kReachBox));
  };

  // Returns false when no reachable target gives a detectable jump (rare,
  // reach-box corners); the dwell then simply continues.
  auto launch_saccade = [&]() -> bool {
    // alternate clusters; occasionally revisit the same one
    if (rng.uniform() >= 0.15) cluster_idx = 1 - cluster_idx;
    double cand_p = cluster_p[cluster_idx] + wander_p.value + rng.uniform(-1.2, 1.2);
    double cand_y = cluster_y[cluster_idx] + wander_y.value + rng.uniform(-1.2, 1.2);
    clamp_reachable(cand_p, cand_y);
    double dist = std::hypot(cand_p - gaze_pitch, cand_y - gaze_yaw);
    if (dist < kMinSaccade) {
      // push the target outward so the jump stays detectable
      const double ang = (dist > 0.3) ? std::atan2(cand_p - gaze_pitch, cand_y - gaze_yaw)
                                      : rng.uniform(0.0, 2.0 * 3.14159265358979323846);
      for (int attempt = 0; attempt < 4 && dist < kMinSaccade; ++attempt) {
        const double a2 = ang + attempt * 1.5707963267948966;
        cand_p = gaze_pitch + kMinSaccade * 1.15 * std::sin(a2);
        cand_y = gaze_yaw + kMinSaccade * 1.15 * std::cos(a2);
        clamp_reachable(cand_p, cand_y);
        dist = std::hypot(cand_p - gaze_pitch, cand_y - gaze_yaw);
      }
    }
    if (dist < 3.0) return false;  // peak velocity would not clear 30 deg/s
    sacc_from_p = gaze_pitch;
    sacc_from_y = gaze_yaw;
    sacc_to_p = cand_p;
    sacc_to_y = cand_y;
    target_pitch = cand_p;
    target_yaw = cand_y;
    sacc_len = std::clamp<int64_t>(static_cast<int64_t>(std::llround(dist / 2.2)), 2, 8);
    sacc_left = sacc_len;
    return true;
  };

  dwell_left = draw_dwell();

  for (int64_t t = 0; t < t_total; ++t) {
    wander_p.tick(rng);
    wander_y.tick(rng);
    if (sacc_left > 0) {
      const double s = static_cast<double>(sacc_len - sacc_left + 1) / static_cast<double>(sacc_len);
      const double w = detail::min_jerk(s);
      gaze_pitch = sacc_from_p + (sacc_to_p - sacc_from_p) * w;
      gaze_yaw = sacc_from_y + (sacc_to_y - sacc_from_y) * w;
      out.saccade_phase[static_cast<size_t>(t)] = 1;
      --sacc_left;
      if (sacc_left == 0) dwell_left = draw_dwell();
    } else {
      gaze_pitch = target_pitch + jit_p.tick(rng);
      gaze_yaw = target_yaw + jit_y.tick(rng);
      --dwell_left;
      if (dwell_left <= 0) {
        if (launch_saccade()) {
          out.saccade_onsets.push_back(std::min<int64_t>(t + 1, t_total - 1));
        } else {
          dwell_left = 3;
        }
      }
    }

    // head: two-pole smoothed gaze scaled by gain, plus narrowband drift
    s1_p += alpha_s * (gaze_pitch - s1_p);
    s1_y += alpha_s * (gaze_yaw - s1_y);
    s2_p += alpha_s * (s1_p - s2_p);
    s2_y += alpha_s * (s1_y - s2_y);
    const double target_hp = profile.head_gain * s2_p + drift_p.tick(rng);
    const double target_hy = profile.head_gain * s2_y + drift_y.tick(rng);
    double step_p = 0.3 * (target_hp - head_pitch);
    double step_y = 0.3 * (target_hy - head_yaw);
    const double step_norm = std::hypot(step_p, step_y);
    if (step_norm > head_step_cap) {
      step_p *= head_step_cap / step_norm;
      step_y *= head_step_cap / step_norm;
    }
    head_pitch += step_p;
    head_yaw += step_y;
    const double roll = roll_d.tick(rng);

    const double eye_pitch = gaze_pitch - head_pitch;
    const double eye_yaw = gaze_yaw - head_yaw;

    motion::MotionFrame& f = out.motion.frames[static_cast<size_t>(t)];
    f[motion::kHeadPitch] = std::clamp(head_pitch, -39.9, 39.9);
    f[motion::kHeadYaw] = std::clamp(head_yaw, -39.9, 39.9);
    f[motion::kHeadRoll] = std::clamp(roll, -39.9, 39.9);
    f[motion::kLeftEyePitch] = std::clamp(eye_pitch + nl_p.tick(rng), -39.9, 39.9);
    f[motion::kLeftEyeYaw] = std::clamp(eye_yaw + nl_y.tick(rng), -39.9, 39.9);
    f[motion::kRightEyePitch] = std::clamp(eye_pitch + nr_p.tick(rng), -39.9, 39.9);
    f[motion::kRightEyeYaw] = std::clamp(eye_yaw + nr_y.tick(rng), -39.9, 39.9);
  }

  // audio: white noise under an envelope that pulses around saccade onsets
  std::vector<double> env(static_cast<size_t>(t_total), 0.1);
  auto slow_env = detail::OuNoise::with_sd(0.25, 0.92, rng);
  for (int64_t t = 0; t < t_total; ++t) {
    env[static_cast<size_t>(t)] += 0.35 * (1.0 - profile.speech_coupling) * std::abs(slow_env.tick(rng));
  }
  const int64_t pulse_len = 12;
  for (int64_t onset : out.saccade_onsets) {
    for (int64_t k = 0; k < pulse_len; ++k) {
      const int64_t t = onset - 6 + k;  // energy rises before the eyes move
      if (t < 0 || t >= t_total) continue;
      const double w =
          0.5 - 0.5 * std::cos(2.0 * 3.14159265358979323846 * static_cast<double>(k) / (pulse_len - 1));
      env[static_cast<size_t>(t)] += 0.6 * profile.speech_coupling * w;
    }
  }

  out.audio.sample_rate = sample_rate;
  const int64_t n_samples = static_cast<int64_t>(std::llround(seconds * sample_rate));
  out.audio.samples.resize(static_cast<size_t>(n_samples));
  const double samples_per_frame = static_cast<double>(sample_rate) * dt;
  for (int64_t i = 0; i < n_samples; ++i) {
    const double pos = static_cast<double>(i) / samples_per_frame;
    int64_t f0 = static_cast<int64_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(f0);
    f0 = std::min(f0, t_total - 1);
    const int64_t f1 = std::min(f0 + 1, t_total - 1);
    const double e = env[static_cast<size_t>(f0)] * (1.0 - frac) + env[static_cast<size_t>(f1)] * frac;
    const double s = e * rng.uniform(-1.0, 1.0);
    out.audio.samples[static_cast<size_t>(i)] = static_cast<float>(std::clamp(s, -0.97, 0.97));
  }
  return out;
}

}  // namespace gazekit::synth
