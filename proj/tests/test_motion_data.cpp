#include <catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "gazekit/motion/io.hpp"
#include "gazekit/motion/normalize.hpp"
#include "gazekit/motion/ops.hpp"
#include "gazekit/rng.hpp"

using namespace gazekit;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "gazekit_motion_tests";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

motion::MotionSequence random_sequence(int64_t t, uint64_t seed, double scale = 20.0) {
  Rng rng(seed);
  motion::MotionSequence seq;
  seq.fps = 25.0;
  seq.speaker_id = "spkT";
  seq.session_id = "sesT";
  seq.frames.resize(static_cast<size_t>(t));
  for (auto& f : seq.frames) {
    for (int c = 0; c < motion::kMotionDims; ++c) f[c] = rng.uniform(-scale, scale);
  }
  return seq;
}

audio::FeatureSequence dummy_features(int64_t t, int64_t f_dim = 3) {
  audio::FeatureSequence fs;
  fs.frames = Tensor<float>::matrix(t, f_dim);
  for (int64_t i = 0; i < fs.frames.size(); ++i) fs.frames[i] = static_cast<float>(i % 11);
  return fs;
}

}  // namespace

TEST_CASE("load zero motion file") {
  const fs::path p = temp_dir() / "zeros.motion.csv";
  std::ofstream out(p);
  out << "# fps=25 speaker=a session=b\n" << motion::kMotionHeader << "\n";
  for (int i = 0; i < 3; ++i) out << i << ",0,0,0,0,0,0,0\n";
  out.close();

  auto seq = motion::load_motion_file(p);
  REQUIRE(seq.length() == 3);
  REQUIRE(seq.fps == 25.0);
  REQUIRE(seq.speaker_id == "a");
  REQUIRE(seq.session_id == "b");
  for (const auto& f : seq.frames) {
    for (int c = 0; c < motion::kMotionDims; ++c) REQUIRE(f[c] == 0.0);
  }
}

TEST_CASE("motion file schema violations") {
  const fs::path p = temp_dir() / "bad.motion.csv";
  {
    std::ofstream out(p);
    out << "# fps=25 speaker=a session=b\n";
    out << "frame,head_pitch,head_yaw,head_roll,l_eye_pitch,l_eye_yaw,r_eye_pitch\n";  // missing r_eye_yaw
    out << "0,0,0,0,0,0,0\n";
  }
  REQUIRE_THROWS_WITH(motion::load_motion_file(p), Catch::Matchers::ContainsSubstring("missing column"));

  {
    std::ofstream out(p);
    out << "# fps=25 speaker=a session=b\n" << motion::kMotionHeader << "\n";
    out << "0,0,0,nan,0,0,0,0\n";
  }
  REQUIRE_THROWS_WITH(motion::load_motion_file(p), Catch::Matchers::ContainsSubstring("non-finite"));

  {
    std::ofstream out(p);
    out << "# speaker=a session=b\n" << motion::kMotionHeader << "\n";
    out << "0,0,0,0,0,0,0,0\n";
  }
  REQUIRE_THROWS_WITH(motion::load_motion_file(p), Catch::Matchers::ContainsSubstring("fps"));

  {
    std::ofstream out(p);
    out << "# fps=25 speaker=a session=b\n" << motion::kMotionHeader << "\n";
    out << "0,0,0,0,0,0,0\n";  // row with a missing column
  }
  REQUIRE_THROWS_WITH(motion::load_motion_file(p), Catch::Matchers::ContainsSubstring("columns"));
}

TEST_CASE("motion file round trip") {
  auto seq = random_sequence(100, 44);
  const fs::path p = temp_dir() / "round.motion.csv";
  motion::save_motion_file(p, seq);
  auto loaded = motion::load_motion_file(p);
  REQUIRE(loaded.length() == seq.length());
  for (int64_t i = 0; i < seq.length(); ++i) {
    for (int c = 0; c < motion::kMotionDims; ++c) {
      REQUIRE(loaded.frames[static_cast<size_t>(i)][c] ==
              Catch::Approx(seq.frames[static_cast<size_t>(i)][c]).margin(1e-6));
    }
  }
  // save -> load -> save reproduces the file byte for byte
  const fs::path p2 = temp_dir() / "round2.motion.csv";
  motion::save_motion_file(p2, loaded);
  REQUIRE(read_text_file(p) == read_text_file(p2));
}

TEST_CASE("resample to 25 fps") {
  // 50 fps alternating 0, 10 -> even-index samples
  motion::MotionSequence seq;
  seq.fps = 50.0;
  seq.frames.resize(10);
  for (size_t i = 0; i < 10; ++i) {
    for (int c = 0; c < motion::kMotionDims; ++c) seq.frames[i][c] = (i % 2 == 0) ? 0.0 : 10.0;
  }
  auto out = motion::resample_to_25fps(seq);
  REQUIRE(out.fps == 25.0);
  REQUIRE(out.length() == 5);
  for (const auto& f : out.frames) {
    for (int c = 0; c < motion::kMotionDims; ++c) REQUIRE(f[c] == Catch::Approx(0.0).margin(1e-9));
  }

  // identity at 25 fps
  auto seq25 = random_sequence(17, 5);
  auto same = motion::resample_to_25fps(seq25);
  REQUIRE(same.length() == seq25.length());
  for (int64_t i = 0; i < same.length(); ++i) {
    for (int c = 0; c < motion::kMotionDims; ++c) {
      REQUIRE(same.frames[static_cast<size_t>(i)][c] == seq25.frames[static_cast<size_t>(i)][c]);
    }
  }

  // 100 Hz ramp 0..99 -> 0, 4, 8, ...
  motion::MotionSequence ramp;
  ramp.fps = 100.0;
  ramp.frames.resize(100);
  for (size_t i = 0; i < 100; ++i) {
    for (int c = 0; c < motion::kMotionDims; ++c) ramp.frames[i][c] = static_cast<double>(i);
  }
  auto r25 = motion::resample_to_25fps(ramp);
  REQUIRE(r25.length() == 25);
  for (int64_t i = 0; i < r25.length(); ++i) {
    REQUIRE(r25.frames[static_cast<size_t>(i)][0] == Catch::Approx(4.0 * i).margin(1e-9));
  }

  // single frame at non-25 fps has no interpolation basis
  motion::MotionSequence single;
  single.fps = 50.0;
  single.frames.resize(1);
  REQUIRE_THROWS_AS(motion::resample_to_25fps(single), Error);

  // idempotence: resample(resample(s)) == resample(s) exactly
  motion::MotionSequence odd = random_sequence(33, 6);
  odd.fps = 60.0;
  auto once = motion::resample_to_25fps(odd);
  auto twice = motion::resample_to_25fps(once);
  REQUIRE(twice.length() == once.length());
  for (int64_t i = 0; i < once.length(); ++i) {
    for (int c = 0; c < motion::kMotionDims; ++c) {
      REQUIRE(twice.frames[static_cast<size_t>(i)][c] == once.frames[static_cast<size_t>(i)][c]);
    }
  }
}

TEST_CASE("filter extreme angles") {
  auto seq = random_sequence(10, 7, 30.0);

  // all within bound: one run, identical
  auto runs = motion::filter_extreme_angles(seq, 40.0);
  REQUIRE(runs.size() == 1);
  REQUIRE(runs[0].source_start == 0);
  REQUIRE(runs[0].seq.length() == 10);

  // frame 5 out of range: two runs of lengths 5 and 4
  seq.frames[5][motion::kHeadYaw] = 41.0;
  runs = motion::filter_extreme_angles(seq, 40.0);
  REQUIRE(runs.size() == 2);
  REQUIRE(runs[0].seq.length() == 5);
  REQUIRE(runs[0].source_start == 0);
  REQUIRE(runs[1].seq.length() == 4);
  REQUIRE(runs[1].source_start == 6);

  // filtering twice with the same bound is a no-op
  auto runs2 = motion::filter_extreme_angles(runs[1].seq, 40.0);
  REQUIRE(runs2.size() == 1);
  REQUIRE(runs2[0].seq.length() == runs[1].seq.length());

  // all frames out of range: empty run list
  motion::MotionSequence far;
  far.fps = 25.0;
  far.frames.resize(4);
  for (auto& f : far.frames) {
    for (int c = 0; c < motion::kMotionDims; ++c) f[c] = 50.0;
  }
  REQUIRE(motion::filter_extreme_angles(far, 40.0).empty());
}

TEST_CASE("fit normalization") {
  motion::MotionSequence a, b;
  a.fps = b.fps = 25.0;
  a.frames.resize(1);
  b.frames.resize(1);
  for (int c = 0; c < motion::kMotionDims; ++c) {
    a.frames[0][c] = 0.0;
    b.frames[0][c] = 2.0;
  }
  auto stats = motion::fit_normalization({a, b});
  for (int c = 0; c < motion::kMotionDims; ++c) {
    REQUIRE(stats.mean[static_cast<size_t>(c)] == Catch::Approx(1.0));
    REQUIRE(stats.std[static_cast<size_t>(c)] == Catch::Approx(1.0));  // population convention
  }

  // normalize then denormalize is identity within 1e-5
  auto seq = random_sequence(50, 11);
  auto stats2 = motion::fit_normalization({seq});
  auto norm = motion::normalize(seq, stats2);
  auto back = motion::denormalize(norm, stats2);
  for (int64_t i = 0; i < seq.length(); ++i) {
    for (int c = 0; c < motion::kMotionDims; ++c) {
      REQUIRE(back.frames[static_cast<size_t>(i)][c] ==
              Catch::Approx(seq.frames[static_cast<size_t>(i)][c]).margin(1e-5));
    }
  }

  // constant corpus: degenerate dimension
  motion::MotionSequence flat;
  flat.fps = 25.0;
  flat.frames.resize(5);
  for (auto& f : flat.frames) {
    for (int c = 0; c < motion::kMotionDims; ++c) f[c] = 3.0;
  }
  REQUIRE_THROWS_WITH(motion::fit_normalization({flat}),
                      Catch::Matchers::ContainsSubstring("degenerate"));

  // too few frames
  REQUIRE_THROWS_AS(motion::fit_normalization({a}), Error);
}

TEST_CASE("make windows index arithmetic") {
  auto seq35 = random_sequence(35, 20);
  auto w1 = motion::make_windows(seq35, dummy_features(35), 25, 10, 10);
  REQUIRE(w1.size() == 1);
  REQUIRE(w1[0].t_index == 0);

  auto seq34 = random_sequence(34, 21);
  REQUIRE(motion::make_windows(seq34, dummy_features(34), 25, 10, 10).empty());

  auto seq45 = random_sequence(45, 22);
  auto w2 = motion::make_windows(seq45, dummy_features(45), 25, 10, 10);
  REQUIRE(w2.size() == 2);
  REQUIRE(w2[0].t_index == 0);
  REQUIRE(w2[1].t_index == 10);

  // feature length mismatch rejected
  REQUIRE_THROWS_AS(motion::make_windows(seq45, dummy_features(44), 25, 10, 10), Error);
}

TEST_CASE("window contiguity invariant") {
  auto seq = random_sequence(60, 23);
  auto feats = dummy_features(60, 4);
  auto windows = motion::make_windows(seq, feats, 12, 5, 7, 100);
  REQUIRE(!windows.empty());
  for (const auto& w : windows) {
    const int64_t s = w.t_index - 100;
    // past covers [s, s+M), future covers [s+M, s+M+N): a contiguous range
    for (int64_t i = 0; i < 12; ++i) {
      for (int c = 0; c < motion::kMotionDims; ++c) {
        REQUIRE(w.past_motion.at(i, c) ==
                Catch::Approx(seq.frames[static_cast<size_t>(s + i)][c]).margin(1e-5));
      }
    }
    for (int64_t i = 0; i < 5; ++i) {
      for (int c = 0; c < motion::kMotionDims; ++c) {
        REQUIRE(w.future_motion.at(i, c) ==
                Catch::Approx(seq.frames[static_cast<size_t>(s + 12 + i)][c]).margin(1e-5));
      }
    }
    for (int64_t i = 0; i < 12; ++i) {
      for (int64_t j = 0; j < 4; ++j) {
        REQUIRE(w.audio_window.at(i, j) == feats.frames.at(s + i, j));
      }
    }
  }
}

TEST_CASE("manifest round trip and errors") {
  const fs::path p = temp_dir() / "manifest.jsonl";
  std::vector<motion::ManifestEntry> entries(2);
  entries[0] = {"m0.csv", "a0.wav", "spk00", "ses00", ""};
  entries[1] = {"m1.csv", "a1.wav", "spk01", "ses01", "f1.ft"};
  motion::save_manifest(p, entries);
  auto loaded = motion::load_manifest(p);
  REQUIRE(loaded.size() == 2);
  REQUIRE(loaded[0].speaker_id == "spk00");
  REQUIRE(loaded[1].feature_path == "f1.ft");

  write_text_file(p, "{\"motion_path\":\"x\",\"audio_path\":\"y\",\"speaker_id\":\"z\"}\n");
  REQUIRE_THROWS_WITH(motion::load_manifest(p),
                      Catch::Matchers::ContainsSubstring("missing field 'session_id'"));

  write_text_file(p, "not json\n");
  REQUIRE_THROWS_AS(motion::load_manifest(p), Error);
}
