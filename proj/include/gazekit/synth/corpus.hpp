#pragma once

#include <cstdio>
#include <filesystem>

#include "gazekit/motion/io.hpp"
#include "gazekit/synth/session.hpp"

namespace gazekit::synth {

struct SynthConfig {
  int64_t n_speakers = 4;
  int64_t sessions_per_speaker = 2;
  double session_seconds = 60.0;
  uint64_t seed = 1;

  void validate() const {
    require(n_speakers >= 1 && sessions_per_speaker >= 1 && session_seconds >= 2.0,
            "synth config: all fields must be positive (and sessions >= 2 s)");
  }
};

inline std::string speaker_name(int64_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "spk%02d", static_cast<int>(i));
  return buf;
}

inline std::string session_name(int64_t spk, int64_t ses) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%02d_ses%02d", static_cast<int>(spk), static_cast<int>(ses));
  return buf;
}

// Writes motion/audio files plus the corpus manifest; per-speaker profiles
// are persisted as JSON sidecars for ground-truth style labels. Sessions get
// independent rng streams derived from the master seed, so the corpus is
// bitwise reproducible.
inline std::vector<motion::ManifestEntry> generate_corpus(const SynthConfig& cfg,
                                                          const std::filesystem::path& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  Rng master(cfg.seed);

  std::vector<motion::ManifestEntry> manifest;
  for (int64_t spk = 0; spk < cfg.n_speakers; ++spk) {
    Rng spk_rng = master.fork(static_cast<uint64_t>(spk) * 1000003ull);
    StyleProfile profile = sample_style_profile(spk_rng);
    write_text_file(out_dir / (speaker_name(spk) + ".profile.json"), profile.to_json().dump(2) + "\n");

    for (int64_t ses = 0; ses < cfg.sessions_per_speaker; ++ses) {
      Rng ses_rng = spk_rng.fork(static_cast<uint64_t>(ses) + 1);
      SessionSample sample = generate_session(profile, cfg.session_seconds, ses_rng);
      sample.motion.speaker_id = speaker_name(spk);
      sample.motion.session_id = session_name(spk, ses);

      motion::ManifestEntry e;
      e.speaker_id = sample.motion.speaker_id;
      e.session_id = sample.motion.session_id;
      e.motion_path = session_name(spk, ses) + ".motion.csv";
      e.audio_path = session_name(spk, ses) + ".wav";
      motion::save_motion_file(out_dir / e.motion_path, sample.motion);
      audio::save_wav(out_dir / e.audio_path, sample.audio);
      manifest.push_back(std::move(e));
    }
  }
  motion::save_manifest(out_dir / "manifest.jsonl", manifest);
  return manifest;
}

}  // namespace gazekit::synth
