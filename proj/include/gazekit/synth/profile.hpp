#pragma once

#include <json.hpp>

#include "gazekit/rng.hpp"

namespace gazekit::synth {

// Per-speaker motion style. Ranges below are the sampling bounds; a profile
// stays fixed across all sessions of one synthetic speaker.
struct StyleProfile {
  double fixation_dwell_mean = 12.0;  // frames
  double saccade_rate = 1.5;          // events/s
  double saccade_amp_mean = 9.0;      // degrees
  double head_gain = 0.6;             // head share of the gaze target, [0, 1]
  double head_drift_scale = 1.5;      // degrees/s
  double speech_coupling = 0.5;       // [0, 1]
  double noise_scale = 0.15;          // degrees

  void validate() const {
    require(fixation_dwell_mean >= 0 && saccade_rate >= 0 && saccade_amp_mean >= 0 &&
                head_gain >= 0 && head_drift_scale >= 0 && speech_coupling >= 0 && noise_scale >= 0,
            "style profile: negative field");
    require(head_gain <= 1.0, "style profile: head_gain must be <= 1");
  }

  nlohmann::json to_json() const {
    return {{"fixation_dwell_mean", fixation_dwell_mean},
            {"saccade_rate", saccade_rate},
            {"saccade_amp_mean", saccade_amp_mean},
            {"head_gain", head_gain},
            {"head_drift_scale", head_drift_scale},
            {"speech_coupling", speech_coupling},
            {"noise_scale", noise_scale}};
  }

  static StyleProfile from_json(const nlohmann::json& j) {
    StyleProfile p;
    p.fixation_dwell_mean = j.at("fixation_dwell_mean").get<double>();
    p.saccade_rate = j.at("saccade_rate").get<double>();
    p.saccade_amp_mean = j.at("saccade_amp_mean").get<double>();
    p.head_gain = j.at("head_gain").get<double>();
    p.head_drift_scale = j.at("head_drift_scale").get<double>();
    p.speech_coupling = j.at("speech_coupling").get<double>();
    p.noise_scale = j.at("noise_scale").get<double>();
    p.validate();
    return p;
  }
};

// Documented sampling ranges: dwell 5-25 frames, rate 0.5-3/s, amplitude
// 3-15 degrees, gain 0.3-0.9, drift 0.5-3 deg/s, coupling 0.2-0.8, noise
// 0.05-0.3 degrees.
inline StyleProfile sample_style_profile(Rng& rng) {
  StyleProfile p;
  p.fixation_dwell_mean = rng.uniform(5.0, 25.0);
  p.saccade_rate = rng.uniform(0.5, 3.0);
  p.saccade_amp_mean = rng.uniform(3.0, 15.0);
  p.head_gain = rng.uniform(0.3, 0.9);
  p.head_drift_scale = rng.uniform(0.5, 3.0);
  p.speech_coupling = rng.uniform(0.2, 0.8);
  p.noise_scale = rng.uniform(0.05, 0.3);
  return p;
}

}  // namespace gazekit::synth
