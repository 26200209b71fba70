#pragma once

#include <algorithm>
#include <filesystem>
#include <thread>
#include <vector>

#include "gazekit/audio/mel.hpp"
#include "gazekit/gen/rollout.hpp"
#include "gazekit/metrics/report.hpp"
#include "gazekit/metrics/style_metrics.hpp"
#include "gazekit/synth/corpus.hpp"
#include "gazekit/train/gradcheck.hpp"
#include "gazekit/train/trainer.hpp"

namespace gazekit::pipeline {

namespace fs = std::filesystem;

inline void parallel_for(int64_t n, int64_t threads, const std::function<void(int64_t)>& fn) {
  const int64_t used = std::max<int64_t>(
      1, std::min<int64_t>(n, threads > 0 ? threads
                                          : static_cast<int64_t>(std::thread::hardware_concurrency())));
  if (used == 1) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int64_t t = 0; t < used; ++t) {
    pool.emplace_back([&, t]() {
      for (int64_t i = t; i < n; i += used) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline fs::path resolve_relative(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

// ---- corpus loading ----

struct LoadedSession {
  train::SessionData data;
  motion::ManifestEntry entry;
};

inline train::SessionData load_session(const fs::path& manifest_dir, const motion::ManifestEntry& e,
                                       const audio::MelConfig& mel_cfg, double filter_bound = 40.0) {
  train::SessionData s;
  s.motion = motion::load_motion_file(resolve_relative(manifest_dir, e.motion_path));
  s.motion.speaker_id = e.speaker_id;
  s.motion.session_id = e.session_id;
  s.motion = motion::resample_to_25fps(s.motion);

  audio::FeatureSequence feats;
  if (!e.feature_path.empty()) {
    feats = audio::load_features(resolve_relative(manifest_dir, e.feature_path));
  } else {
    audio::AudioClip clip = audio::load_wav(resolve_relative(manifest_dir, e.audio_path));
    feats = audio::log_mel(clip, mel_cfg);
  }
  s.feats = audio::align_features(feats, s.motion.length());
  s.runs = motion::filter_extreme_angles(s.motion, filter_bound);
  return s;
}

inline train::Corpus load_corpus(const fs::path& manifest_path, const audio::MelConfig& mel_cfg) {
  auto entries = motion::load_manifest(manifest_path);
  require(!entries.empty(), "manifest is empty: ", manifest_path.string());
  const fs::path dir = manifest_path.parent_path();
  train::Corpus corpus;
  corpus.sessions.resize(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    corpus.sessions[i] = load_session(dir, entries[i], mel_cfg);
  }
  return corpus;
}

// ---- subcommand bodies ----

inline void run_extract_features(const fs::path& manifest_path, const fs::path& out_dir,
                                 const audio::MelConfig& mel_cfg, int64_t threads = 1) {
  auto entries = motion::load_manifest(manifest_path);
  require(!entries.empty(), "manifest is empty: ", manifest_path.string());
  const fs::path dir = manifest_path.parent_path();
  fs::create_directories(out_dir);
  std::vector<motion::ManifestEntry> out_entries(entries.size());
  parallel_for(static_cast<int64_t>(entries.size()), threads, [&](int64_t i) {
    const auto& e = entries[static_cast<size_t>(i)];
    audio::AudioClip clip = audio::load_wav(resolve_relative(dir, e.audio_path));
    audio::FeatureSequence feats = audio::log_mel(clip, mel_cfg);
    const std::string fname = e.session_id + ".ft";
    audio::save_features(out_dir / fname, feats);
    motion::ManifestEntry out = e;
    out.motion_path = fs::weakly_canonical(resolve_relative(dir, e.motion_path)).string();
    out.audio_path = fs::weakly_canonical(resolve_relative(dir, e.audio_path)).string();
    out.feature_path = fname;
    out_entries[static_cast<size_t>(i)] = std::move(out);
  });
  motion::save_manifest(out_dir / "manifest.jsonl", out_entries);
}

inline void write_train_log(const fs::path& path, const std::vector<train::TrainLogEntry>& logs) {
  std::string text;
  for (const auto& l : logs) text += l.to_json().dump() + "\n";
  write_text_file(path, text);
}

inline fs::path run_pretrain_style(const fs::path& manifest_path, const fs::path& out_dir,
                                   style::StyleEncoderConfig se_cfg, const train::TrainConfig& tcfg,
                                   const audio::MelConfig& mel_cfg = audio::MelConfig()) {
  train::Corpus corpus = load_corpus(manifest_path, mel_cfg);
  train::StyleTrainResult res = train::pretrain_style(corpus, se_cfg, tcfg);
  fs::create_directories(out_dir);
  const fs::path ckpt = out_dir / "style.ckpt";
  train::save_checkpoint(ckpt, res.store, train::style_meta(se_cfg, res.stats, tcfg), &res.optimizer);
  write_train_log(out_dir / "train_log.jsonl", res.logs);
  return ckpt;
}

struct StyleBundle {
  style::StyleEncoderConfig cfg;
  ParameterStore<float> store;
  style::StyleEncoder<float> encoder;
  motion::NormalizationStats stats;
};

inline StyleBundle load_style_bundle(const fs::path& ckpt_path) {
  train::Checkpoint ck = train::load_checkpoint(ckpt_path);
  StyleBundle b;
  b.cfg = train::style_config_from_meta(ck.meta);
  b.store = std::move(ck.params);
  b.encoder = style::StyleEncoder<float>::attach(b.store, b.cfg);
  b.stats = train::stats_from_json(ck.meta.at("stats"));
  return b;
}

inline fs::path run_train_generator(const fs::path& manifest_path, const fs::path& out_dir,
                                    gen::GenerationConfig gcfg, const train::TrainConfig& tcfg,
                                    const fs::path& style_ckpt = {},
                                    const fs::path& resume_ckpt = {},
                                    const audio::MelConfig& mel_cfg = audio::MelConfig()) {
  train::Corpus corpus = load_corpus(manifest_path, mel_cfg);
  if (!corpus.sessions.empty()) {
    gcfg.feature_dim = corpus.sessions.front().feats.feature_dim();
  }

  StyleBundle style_bundle;
  const style::StyleEncoder<float>* enc = nullptr;
  const ParameterStore<float>* enc_store = nullptr;
  const motion::NormalizationStats* stats = nullptr;
  if (gcfg.d_s > 0) {
    require(!style_ckpt.empty(), "train: style conditioning (d_s > 0) requires --style-ckpt");
    style_bundle = load_style_bundle(style_ckpt);
    require(style_bundle.cfg.d_s == gcfg.d_s, "train: style checkpoint d_s = ", style_bundle.cfg.d_s,
            " does not match configured d_s = ", gcfg.d_s);
    require(style_bundle.cfg.window == gcfg.m_len, "train: style window ", style_bundle.cfg.window,
            " != generator M = ", gcfg.m_len);
    enc = &style_bundle.encoder;
    enc_store = &style_bundle.store;
    stats = &style_bundle.stats;
  }

  train::Checkpoint resume;
  const train::Checkpoint* resume_ptr = nullptr;
  if (!resume_ckpt.empty()) {
    resume = train::load_checkpoint(resume_ckpt);
    gen::GenerationConfig saved = train::generator_config_from_meta(resume.meta);
    require(saved.d_s == gcfg.d_s && saved.m_len == gcfg.m_len && saved.n_len == gcfg.n_len,
            "train: resume checkpoint config mismatch");
    resume_ptr = &resume;
  }

  train::GenTrainResult res =
      train::train_generator(corpus, gcfg, tcfg, stats, enc, enc_store, resume_ptr);
  gcfg.lambda = tcfg.lambda;
  fs::create_directories(out_dir);
  const fs::path ckpt = out_dir / "generator.ckpt";
  train::save_checkpoint(ckpt, res.store, train::generator_meta(gcfg, res.stats, tcfg),
                         &res.optimizer);
  write_train_log(out_dir / "train_log.jsonl", res.logs);
  return ckpt;
}

struct GeneratorBundle {
  gen::GenerationConfig cfg;
  ParameterStore<float> store;
  gen::Generator<float> generator;
  motion::NormalizationStats stats;
  nlohmann::json meta;
};

inline GeneratorBundle load_generator_bundle(const fs::path& ckpt_path) {
  train::Checkpoint ck = train::load_checkpoint(ckpt_path);
  GeneratorBundle b;
  b.cfg = train::generator_config_from_meta(ck.meta);
  b.store = std::move(ck.params);
  b.generator = gen::Generator<float>::attach(b.store, b.cfg);
  b.stats = train::stats_from_json(ck.meta.at("stats"));
  b.meta = ck.meta;
  return b;
}

struct GenerateOptions {
  gen::StyleMode style_mode = gen::StyleMode::kRecompute;
  bool mean_seed = false;  // seed with the corpus mean pose instead of real frames
  uint64_t seed = 1;       // stamped into outputs
  int64_t threads = 1;
};

// Stamp for generated files: hash of the generation-relevant configuration
// only (no paths), so reruns in different directories stay bit-identical.
inline std::string generation_stamp(const GeneratorBundle& gen_bundle, gen::StyleMode mode,
                                    uint64_t seed) {
  const uint64_t h = fnv1a(gen_bundle.meta.dump() + "|" + gen::style_mode_name(mode));
  return msg("config=", hex64(h), " seed=", seed, " style_mode=", gen::style_mode_name(mode));
}

inline void run_generate(const fs::path& gen_ckpt, const fs::path& style_ckpt,
                         const fs::path& manifest_path, const fs::path& out_dir,
                         const GenerateOptions& opt,
                         const audio::MelConfig& mel_cfg = audio::MelConfig()) {
  GeneratorBundle gb = load_generator_bundle(gen_ckpt);
  StyleBundle sb;
  if (gb.cfg.d_s > 0) {
    require(!style_ckpt.empty(), "generate: model was trained with style; --style-ckpt required");
    sb = load_style_bundle(style_ckpt);
    require(sb.cfg.d_s == gb.cfg.d_s, "generate: style checkpoint d_s mismatch");
  }

  auto entries = motion::load_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path();
  fs::create_directories(out_dir);

  parallel_for(static_cast<int64_t>(entries.size()), opt.threads, [&](int64_t i) {
    const auto& e = entries[static_cast<size_t>(i)];
    train::SessionData s = load_session(dir, e, mel_cfg);
    require(!s.runs.empty(), "generate: session ", e.session_id, " has no usable frames");
    const motion::MotionRun& run = s.runs.front();
    require(run.seq.length() >= gb.cfg.m_len + gb.cfg.n_len, "generate: session ", e.session_id,
            " shorter than M + N frames");

    Tensor<float> seed_win;
    if (opt.mean_seed) {
      seed_win = Tensor<float>::matrix(gb.cfg.m_len, motion::kMotionDims);  // zeros = mean pose
    } else {
      seed_win = motion::sequence_to_tensor<float>(run.seq, 0, gb.cfg.m_len);
      motion::normalize_rows(seed_win, gb.stats);
    }
    audio::FeatureSequence run_feats = audio::slice_features(s.feats, run.source_start, run.seq.length());

    gen::StyleSource<float> src;
    src.mode = opt.style_mode;
    if (gb.cfg.d_s > 0) {
      src.encoder = &sb.encoder;
      src.encoder_store = &sb.store;
      if (opt.style_mode == gen::StyleMode::kFixed) {
        Tensor<float> first = seed_win;
        src.fixed = sb.encoder.encode_window(sb.store, first);
      }
    }
    Tensor<float> out = gen::rollout(gb.generator, gb.store, seed_win, run_feats.frames, src, gb.stats);

    motion::MotionSequence out_seq = motion::tensor_to_sequence(out);
    out_seq.speaker_id = e.speaker_id;
    out_seq.session_id = e.session_id;
    const int64_t offset = run.source_start + gb.cfg.m_len;
    motion::save_motion_file(out_dir / (e.session_id + ".motion.csv"), out_seq,
                             generation_stamp(gb, opt.style_mode, opt.seed) + " offset=" +
                                 std::to_string(offset));
  });
}

inline void run_transfer_style(const fs::path& gen_ckpt, const fs::path& style_ckpt,
                               const fs::path& manifest_path, const fs::path& reference_motion_path,
                               const fs::path& out_dir, const GenerateOptions& opt,
                               const audio::MelConfig& mel_cfg = audio::MelConfig()) {
  GeneratorBundle gb = load_generator_bundle(gen_ckpt);
  require(gb.cfg.d_s > 0, "transfer-style: generator was trained without style conditioning");
  StyleBundle sb = load_style_bundle(style_ckpt);
  require(sb.cfg.d_s == gb.cfg.d_s, "transfer-style: style checkpoint d_s mismatch");

  motion::MotionSequence ref = motion::load_motion_file(reference_motion_path);
  ref = motion::resample_to_25fps(ref);
  require(ref.length() >= gb.cfg.m_len, "transfer-style: reference shorter than M frames");
  Tensor<float> ref_norm = motion::sequence_to_tensor<float>(ref, 0, ref.length());
  motion::normalize_rows(ref_norm, gb.stats);

  auto entries = motion::load_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path();
  fs::create_directories(out_dir);
  parallel_for(static_cast<int64_t>(entries.size()), opt.threads, [&](int64_t i) {
    const auto& e = entries[static_cast<size_t>(i)];
    train::SessionData s = load_session(dir, e, mel_cfg);
    require(!s.runs.empty(), "transfer-style: session ", e.session_id, " has no usable frames");
    const motion::MotionRun& run = s.runs.front();
    Tensor<float> seed_win = motion::sequence_to_tensor<float>(run.seq, 0, gb.cfg.m_len);
    motion::normalize_rows(seed_win, gb.stats);
    audio::FeatureSequence run_feats = audio::slice_features(s.feats, run.source_start, run.seq.length());

    Tensor<float> out = gen::style_transfer_rollout(gb.generator, gb.store, seed_win,
                                                    run_feats.frames, sb.encoder, sb.store, ref_norm,
                                                    gb.stats);
    motion::MotionSequence out_seq = motion::tensor_to_sequence(out);
    out_seq.speaker_id = e.speaker_id;
    out_seq.session_id = e.session_id;
    const int64_t offset = run.source_start + gb.cfg.m_len;
    motion::save_motion_file(out_dir / (e.session_id + ".motion.csv"), out_seq,
                             generation_stamp(gb, gen::StyleMode::kFixed, opt.seed) + " offset=" +
                                 std::to_string(offset));
  });
}

// ---- evaluation ----

struct EvalOutcome {
  std::vector<metrics::EvalReport> sequences;
  metrics::EvalReport aggregate;
  std::vector<std::string> warnings;  // unpaired / misaligned sessions
};

inline metrics::EvalReport evaluate_pair(const Tensor<double>& pred, const Tensor<double>& gt,
                                         const audio::FeatureSequence& feats,
                                         const StyleBundle& style_bundle) {
  metrics::EvalReport r;
  r.frames = pred.rows();
  for (auto [chan_report, mask] :
       {std::pair{&r.all, metrics::ChannelMask::kAll},
        {&r.gaze, metrics::ChannelMask::kGaze},
        {&r.head, metrics::ChannelMask::kHead}}) {
    chan_report->mae = metrics::mae(pred, gt, mask);
    chan_report->vel = metrics::vel_error(pred, gt, mask);
    chan_report->mee = metrics::mee(pred, gt, mask);
    chan_report->bas = metrics::beat_alignment(pred, feats, mask);
  }

  // style cosine error in the encoder's normalized space
  Tensor<float> pred_n = pred.cast<float>();
  Tensor<float> gt_n = gt.cast<float>();
  motion::normalize_rows(pred_n, style_bundle.stats);
  motion::normalize_rows(gt_n, style_bundle.stats);
  r.ce = metrics::style_cosine_error(pred_n, gt_n, style_bundle.encoder, style_bundle.store);

  const auto pred_labels = metrics::idt_labels(metrics::gaze_matrix(pred));
  const auto gt_labels = metrics::idt_labels(metrics::gaze_matrix(gt));
  r.fixation = metrics::fixation_ratio(pred_labels);
  r.saccades = 1.0 - r.fixation;
  r.comp_score = metrics::compensation_score(metrics::head_velocity(pred), metrics::eye_velocity(pred));
  const double fix_gt = metrics::fixation_ratio(gt_labels);
  const double comp_gt =
      metrics::compensation_score(metrics::head_velocity(gt), metrics::eye_velocity(gt));
  r.sim_score = metrics::sim_with_gt(fix_gt, r.fixation, comp_gt, r.comp_score);
  return r;
}

inline EvalOutcome run_evaluate(const fs::path& pred_dir, const fs::path& gt_manifest,
                                const fs::path& style_ckpt, const fs::path& out_dir,
                                int64_t threads = 1,
                                const audio::MelConfig& mel_cfg = audio::MelConfig()) {
  StyleBundle sb = load_style_bundle(style_ckpt);
  auto entries = motion::load_manifest(gt_manifest);
  const fs::path dir = gt_manifest.parent_path();

  EvalOutcome outcome;
  std::vector<int> usable;
  std::vector<motion::MotionSequence> preds(entries.size());
  std::vector<int64_t> offsets(entries.size(), 0);
  for (size_t i = 0; i < entries.size(); ++i) {
    const fs::path pred_path = pred_dir / (entries[i].session_id + ".motion.csv");
    if (!fs::exists(pred_path)) {
      outcome.warnings.push_back("unpaired session (no prediction): " + entries[i].session_id);
      continue;
    }
    motion::MotionFileMeta meta;
    preds[i] = motion::load_motion_file(pred_path, &meta);
    offsets[i] = std::stoll(meta.get("offset", "0"));
    usable.push_back(static_cast<int>(i));
  }
  require(!usable.empty(), "evaluate: no prediction/ground-truth pairs found under ",
          pred_dir.string());

  std::vector<metrics::EvalReport> reports(usable.size());
  std::vector<std::string> errors(usable.size());
  parallel_for(static_cast<int64_t>(usable.size()), threads, [&](int64_t k) {
    const size_t i = static_cast<size_t>(usable[static_cast<size_t>(k)]);
    try {
      train::SessionData s = load_session(dir, entries[i], mel_cfg);
      const motion::MotionSequence& pred_seq = preds[i];
      const int64_t offset = offsets[i];
      require(offset + pred_seq.length() <= s.motion.length(), "prediction of ", pred_seq.length(),
              " frames at offset ", offset, " overruns ground truth of ", s.motion.length());
      Tensor<double> pred = motion::sequence_to_tensor<double>(pred_seq, 0, pred_seq.length());
      Tensor<double> gt = motion::sequence_to_tensor<double>(s.motion, offset, pred_seq.length());
      audio::FeatureSequence feats = audio::slice_features(s.feats, offset, pred_seq.length());
      metrics::EvalReport r = evaluate_pair(pred, gt, feats, sb);
      r.session_id = entries[i].session_id;
      r.speaker_id = entries[i].speaker_id;
      reports[static_cast<size_t>(k)] = r;
    } catch (const std::exception& e) {
      errors[static_cast<size_t>(k)] = e.what();
    }
  });
  for (size_t k = 0; k < reports.size(); ++k) {
    if (!errors[k].empty()) {
      outcome.warnings.push_back(msg("session ", entries[static_cast<size_t>(usable[k])].session_id,
                                     " skipped: ", errors[k]));
      continue;
    }
    outcome.sequences.push_back(reports[k]);
  }
  require(!outcome.sequences.empty(), "evaluate: all sessions failed");
  outcome.aggregate = metrics::aggregate_reports(outcome.sequences);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    nlohmann::json j;
    j["sequences"] = nlohmann::json::array();
    for (const auto& r : outcome.sequences) j["sequences"].push_back(r.to_json());
    j["aggregate"] = outcome.aggregate.to_json();
    j["warnings"] = outcome.warnings;
    write_text_file(out_dir / "evaluation.json", j.dump(2) + "\n");
    write_text_file(out_dir / "evaluation.txt",
                    metrics::render_table(outcome.sequences, outcome.aggregate));
  }
  return outcome;
}

// ---- embedding export ----

inline void run_embed(const fs::path& style_ckpt, const fs::path& manifest_path,
                      const fs::path& out_file,
                      const audio::MelConfig& mel_cfg = audio::MelConfig()) {
  StyleBundle sb = load_style_bundle(style_ckpt);
  train::Corpus corpus = load_corpus(manifest_path, mel_cfg);

  std::string text = "speaker,session,t_index";
  for (int64_t j = 0; j < sb.cfg.d_s; ++j) text += ",e_" + std::to_string(j);
  text += "\n";
  char buf[64];
  for (const auto& s : corpus.sessions) {
    for (const auto& run : s.runs) {
      motion::MotionSequence norm = motion::normalize(run.seq, sb.stats);
      for (int64_t t = 0; t + sb.cfg.window <= norm.length(); t += sb.cfg.window) {
        Tensor<float> w = motion::sequence_to_tensor<float>(norm, t, sb.cfg.window);
        Tensor<float> e = sb.encoder.encode_window(sb.store, w);
        text += s.motion.speaker_id + "," + s.motion.session_id + "," +
                std::to_string(run.source_start + t);
        for (int64_t j = 0; j < e.size(); ++j) {
          std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(e[j]));
          text += ",";
          text += buf;
        }
        text += "\n";
      }
    }
  }
  write_text_file(out_file, text);
}

}  // namespace gazekit::pipeline
