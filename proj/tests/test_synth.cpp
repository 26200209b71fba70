#include <catch_amalgamated.hpp>
#include <filesystem>

#include "gazekit/audio/mel.hpp"
#include "gazekit/metrics/gaze_patterns.hpp"
#include "gazekit/motion/io.hpp"
#include "gazekit/motion/ops.hpp"
#include "gazekit/synth/corpus.hpp"

using namespace gazekit;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "gazekit_synth_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Mean-of-both-eyes gaze speed per frame step, degrees/s.
std::vector<double> mean_eye_speed(const motion::MotionSequence& seq) {
  std::vector<double> out;
  for (int64_t t = 1; t < seq.length(); ++t) {
    const auto& a = seq.frames[static_cast<size_t>(t - 1)];
    const auto& b = seq.frames[static_cast<size_t>(t)];
    const double p0 = 0.5 * (a[motion::kLeftEyePitch] + a[motion::kRightEyePitch]);
    const double p1 = 0.5 * (b[motion::kLeftEyePitch] + b[motion::kRightEyePitch]);
    const double y0 = 0.5 * (a[motion::kLeftEyeYaw] + a[motion::kRightEyeYaw]);
    const double y1 = 0.5 * (b[motion::kLeftEyeYaw] + b[motion::kRightEyeYaw]);
    out.push_back(25.0 * std::hypot(p1 - p0, y1 - y0));
  }
  return out;
}

}  // namespace

TEST_CASE("style profile sampling") {
  Rng a(5), b(5);
  auto p1 = synth::sample_style_profile(a);
  auto p2 = synth::sample_style_profile(b);
  REQUIRE(p1.fixation_dwell_mean == p2.fixation_dwell_mean);
  REQUIRE(p1.noise_scale == p2.noise_scale);

  // documented ranges over many draws
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    auto p = synth::sample_style_profile(rng);
    REQUIRE((p.fixation_dwell_mean >= 5.0 && p.fixation_dwell_mean <= 25.0));
    REQUIRE((p.saccade_rate >= 0.5 && p.saccade_rate <= 3.0));
    REQUIRE((p.saccade_amp_mean >= 3.0 && p.saccade_amp_mean <= 15.0));
    REQUIRE((p.head_gain >= 0.3 && p.head_gain <= 0.9));
    REQUIRE((p.head_drift_scale >= 0.5 && p.head_drift_scale <= 3.0));
    REQUIRE((p.speech_coupling >= 0.2 && p.speech_coupling <= 0.8));
    REQUIRE((p.noise_scale >= 0.05 && p.noise_scale <= 0.3));
  }

  // distinct seeds essentially always differ in some field
  int collisions = 0;
  for (uint64_t s = 0; s < 100; ++s) {
    Rng r1(s), r2(s + 1);
    auto q1 = synth::sample_style_profile(r1);
    auto q2 = synth::sample_style_profile(r2);
    if (q1.to_json() == q2.to_json()) ++collisions;
  }
  REQUIRE(collisions == 0);
}

TEST_CASE("zero saccade rate gives pure fixation") {
  synth::StyleProfile p;
  p.saccade_rate = 0.0;
  Rng rng(7);
  auto s = synth::generate_session(p, 10.0, rng);
  auto labels = metrics::idt_labels(metrics::gaze_matrix(s.motion));
  REQUIRE(metrics::fixation_ratio(labels) == 1.0);
  REQUIRE(s.saccade_onsets.empty());
}

TEST_CASE("default profile produces plausible gaze statistics") {
  synth::StyleProfile p;  // defaults are mid-range
  Rng rng(8);
  auto s = synth::generate_session(p, 60.0, rng);
  REQUIRE(s.motion.length() == 1500);

  const double ratio = metrics::fixation_ratio(metrics::idt_labels(metrics::gaze_matrix(s.motion)));
  REQUIRE(ratio > 0.4);
  REQUIRE(ratio < 0.9);

  // construction thresholds: fixation frames below 30 deg/s, saccade peaks above
  auto speed = mean_eye_speed(s.motion);
  double max_fix_speed = 0.0;
  for (size_t t = 1; t + 1 < s.saccade_phase.size(); ++t) {
    // speed[t-1] covers the step (t-1 -> t); require both endpoints in dwell
    if (!s.saccade_phase[t] && !s.saccade_phase[t - 1]) {
      max_fix_speed = std::max(max_fix_speed, speed[t - 1]);
    }
  }
  REQUIRE(max_fix_speed < 30.0);

  // every completed saccade has a fast frame
  for (int64_t onset : s.saccade_onsets) {
    if (onset + 9 >= s.motion.length()) continue;  // truncated by the session end
    double peak = 0.0;
    for (int64_t t = onset; t < onset + 9; ++t) {
      if (t >= 1) peak = std::max(peak, speed[static_cast<size_t>(t - 1)]);
    }
    REQUIRE(peak > 30.0);
  }
}

TEST_CASE("generated angles stay within the filter bound") {
  Rng master(9);
  for (int trial = 0; trial < 3; ++trial) {
    Rng rng = master.fork(static_cast<uint64_t>(trial));
    auto profile = synth::sample_style_profile(rng);
    auto s = synth::generate_session(profile, 30.0, rng);
    for (const auto& f : s.motion.frames) {
      for (int c = 0; c < motion::kMotionDims; ++c) {
        REQUIRE(std::abs(f[c]) <= 40.0);
      }
    }
    // never triggers filtering
    auto runs = motion::filter_extreme_angles(s.motion, 40.0);
    REQUIRE(runs.size() == 1);
    REQUIRE(runs[0].seq.length() == s.motion.length());
  }
}

TEST_CASE("head gain shapes head motion") {
  synth::StyleProfile low;
  low.head_gain = 0.0;
  low.head_drift_scale = 1.0;
  synth::StyleProfile high = low;
  high.head_gain = 0.9;

  Rng r1(10), r2(10);
  auto s_low = synth::generate_session(low, 40.0, r1);
  auto s_high = synth::generate_session(high, 40.0, r2);

  auto head_var = [](const motion::MotionSequence& seq) {
    double mean_p = 0, mean_y = 0;
    for (const auto& f : seq.frames) {
      mean_p += f[motion::kHeadPitch];
      mean_y += f[motion::kHeadYaw];
    }
    mean_p /= static_cast<double>(seq.length());
    mean_y /= static_cast<double>(seq.length());
    double var = 0;
    for (const auto& f : seq.frames) {
      var += (f[motion::kHeadPitch] - mean_p) * (f[motion::kHeadPitch] - mean_p) +
             (f[motion::kHeadYaw] - mean_y) * (f[motion::kHeadYaw] - mean_y);
    }
    return var / static_cast<double>(seq.length());
  };

  // gain 0: head carries only drift; position RMS of the narrowband drift is
  // vel_rms / omega per axis, use a generous 3x bound
  const double drift_pos_rms = 1.0 / (2.0 * 3.14159265358979323846 * 0.25);
  REQUIRE(head_var(s_low.motion) < 2.0 * 9.0 * drift_pos_rms * drift_pos_rms + 0.5);
  REQUIRE(head_var(s_high.motion) > 4.0 * head_var(s_low.motion));

  // high gain: in the cosine band, opposed head/eye frames dominate
  auto count_opposed = [](const motion::MotionSequence& seq) {
    auto m = motion::sequence_to_tensor<double>(seq, 0, seq.length());
    auto hv = metrics::head_velocity(m);
    auto ev = metrics::eye_velocity(m);
    int64_t band = 0, opposed = 0;
    for (int64_t t = 0; t < hv.rows(); ++t) {
      const double gx = hv.at(t, 0) + ev.at(t, 0);
      const double gy = hv.at(t, 1) + ev.at(t, 1);
      const double g = std::hypot(gx, gy);
      if (g < 25.0 || g > 90.0) continue;
      const double dotv = hv.at(t, 0) * ev.at(t, 0) + hv.at(t, 1) * ev.at(t, 1);
      ++band;
      if (dotv < 0) ++opposed;
    }
    return std::pair<int64_t, int64_t>(band, opposed);
  };
  auto [band, opposed] = count_opposed(s_high.motion);
  REQUIRE(band > 0);
  REQUIRE(static_cast<double>(opposed) / static_cast<double>(band) > 0.5);
}

TEST_CASE("corpus generation writes a loadable, reproducible tree") {
  synth::SynthConfig cfg;
  cfg.n_speakers = 4;
  cfg.sessions_per_speaker = 2;
  cfg.session_seconds = 4.0;
  cfg.seed = 77;

  const fs::path d1 = fresh_dir("corpus_a");
  const fs::path d2 = fresh_dir("corpus_b");
  auto m1 = synth::generate_corpus(cfg, d1);
  auto m2 = synth::generate_corpus(cfg, d2);
  REQUIRE(m1.size() == 8);

  int64_t motion_files = 0, wav_files = 0, profiles = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    const std::string name = e.path().filename().string();
    if (name.ends_with(".motion.csv")) ++motion_files;
    if (name.ends_with(".wav")) ++wav_files;
    if (name.ends_with(".profile.json")) ++profiles;
  }
  REQUIRE(motion_files == 8);
  REQUIRE(wav_files == 8);
  REQUIRE(profiles == 4);
  REQUIRE(fs::exists(d1 / "manifest.jsonl"));

  // bitwise identical trees for the same seed
  for (const auto& e : fs::directory_iterator(d1)) {
    const fs::path other = d2 / e.path().filename();
    REQUIRE(fs::exists(other));
    REQUIRE(read_text_file(e.path()) == read_text_file(other));
  }

  // all files pass the loaders and invariants
  auto manifest = motion::load_manifest(d1 / "manifest.jsonl");
  REQUIRE(manifest.size() == 8);
  for (const auto& e : manifest) {
    auto seq = motion::load_motion_file(d1 / e.motion_path);
    REQUIRE(seq.fps == 25.0);
    REQUIRE(seq.length() == 100);
    auto clip = audio::load_wav(d1 / e.audio_path);
    REQUIRE(clip.sample_rate == 16000);
    REQUIRE(clip.length() == 64000);
    auto feats = audio::log_mel(clip);
    REQUIRE(feats.length() == 100);
  }
  for (int spk = 0; spk < 4; ++spk) {
    auto j = nlohmann::json::parse(read_text_file(d1 / (synth::speaker_name(spk) + ".profile.json")));
    auto p = synth::StyleProfile::from_json(j);
    p.validate();
  }
}
