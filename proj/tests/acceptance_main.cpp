// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Pipeline criteria drive the CLI binary end to end; numeric
// criteria call the library directly.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "gazekit/pipeline.hpp"
#include "oracles.hpp"

using namespace gazekit;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool pass, const std::string& detail = "") {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << what;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

std::string g_cli;
fs::path g_work;

int run(const std::string& args, const std::string& log_name) {
  const fs::path log = g_work / "logs" / (log_name + ".log");
  fs::create_directories(log.parent_path());
  const std::string cmd = g_cli + " " + args + " > " + log.string() + " 2>&1";
  return std::system(cmd.c_str());
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool files_identical(const fs::path& a, const fs::path& b) {
  if (!fs::exists(a) || !fs::exists(b)) return false;
  return read_text_file(a) == read_text_file(b);
}

// ---- criterion 1 ----

void criterion_1_gradcheck() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path out = g_work / "gradcheck";
  const int rc = run("gradcheck --seed 7 --out " + out.string(), "gradcheck");
  const double secs = elapsed_s(t0);
  bool pass = rc == 0 && secs < 120.0;
  std::string detail = msg("exit=", rc, ", ", secs, " s");
  if (pass) {
    auto j = nlohmann::json::parse(read_text_file(out / "gradcheck.json"));
    for (const auto& c : j["cases"]) {
      detail += msg("; ", c["name"].get<std::string>(), "=", c["max_rel_err"].get<double>());
      if (!c["pass"].get<bool>()) pass = false;
    }
  }
  report(1, "gradient correctness via finite differences, runtime < 2 min", pass, detail);
}

// ---- criterion 2 ----

void criterion_2_ntxent_closed_form() {
  Tensor<float> emb({4, 4});
  emb.at(0, 0) = 1;
  emb.at(1, 1) = 1;
  emb.at(2, 0) = 1;
  emb.at(3, 1) = 1;
  const double loss = style::nt_xent_loss(emb, 1.0).loss;
  const double expect = 4.0 * std::log(1.0 + 2.0 / std::exp(1.0));
  const bool pass = std::abs(loss - expect) < 1e-4;
  report(2, "NT-Xent closed form 4 ln(1 + 2/e)", pass, msg("loss=", loss, " expect=", expect));
}

// ---- criterion 3 ----

void criterion_3_idt_oracle() {
  int64_t mismatched_frames = 0;
  int64_t sequences = 0;
  for (int64_t t = 3; t <= 50; ++t) {
    for (uint64_t s = 0; s < 40; ++s) {
      Rng rng(t * 10007 + s);
      auto gaze = test_oracles::random_gaze(t, rng, s % 2 == 0);
      auto fast = metrics::idt_labels(gaze);
      auto slow = test_oracles::idt_brute_force(gaze, metrics::IdtConfig());
      for (size_t i = 0; i < fast.size(); ++i) {
        if (fast[i] != slow[i]) ++mismatched_frames;
      }
      ++sequences;
    }
  }
  for (uint64_t s = 0; s < 200; ++s) {
    Rng rng(777000 + s);
    auto gaze = test_oracles::random_gaze(500, rng, s % 2 == 0);
    auto fast = metrics::idt_labels(gaze);
    auto slow = test_oracles::idt_brute_force(gaze, metrics::IdtConfig());
    for (size_t i = 0; i < fast.size(); ++i) {
      if (fast[i] != slow[i]) ++mismatched_frames;
    }
    ++sequences;
  }
  report(3, "I-DT equals the brute-force maximal-window oracle",
         mismatched_frames == 0,
         msg(sequences, " sequences, ", mismatched_frames, " mismatched frames"));
}

// ---- criterion 4 ----

void criterion_4_metric_hand_cases() {
  bool pass = true;
  std::string detail;

  // compensation piecewise: 0 / +1 / gap-0
  {
    Tensor<double> h({1, 2});
    Tensor<double> e({1, 2});
    if (std::abs(metrics::compensation_score(h, e) - 0.0) > 1e-9) pass = false;
    h.at(0, 0) = 40;
    e.at(0, 0) = -10;
    if (std::abs(metrics::compensation_score(h, e) - 1.0) > 1e-9) pass = false;
    h.at(0, 0) = 22;
    e.at(0, 0) = 0;
    if (std::abs(metrics::compensation_score(h, e) - 0.0) > 1e-9) pass = false;
  }
  // constant-offset MSE = 7
  {
    Tensor<double> gt({5, 7});
    Tensor<double> pred({5, 7}, 1.0);
    if (std::abs(gen::mse_loss(pred, gt) - 7.0) > 1e-9) pass = false;
  }
  // velocity-loss translation invariance, exact on representable values
  {
    Rng rng(99);
    Tensor<double> gt({6, 7});
    Tensor<double> pred({6, 7});
    for (int64_t i = 0; i < gt.size(); ++i) {
      gt[i] = 0.25 * static_cast<double>(rng.uniform_int(-40, 40));
      pred[i] = 0.25 * static_cast<double>(rng.uniform_int(-40, 40));
    }
    Tensor<double> shifted = pred;
    for (int64_t t = 0; t < shifted.rows(); ++t) {
      for (int64_t c = 0; c < 7; ++c) shifted.at(t, c) += 3.0;  // exact in binary
    }
    if (gen::velocity_loss(shifted, gt) != gen::velocity_loss(pred, gt)) pass = false;
  }
  // SimWithGT arithmetic
  {
    if (std::abs(metrics::sim_with_gt(0.6, 0.6, -0.3, -0.3) - 1.0) > 1e-9) pass = false;
    if (std::abs(metrics::sim_with_gt(0.6, 0.5, -0.30, -0.25) - 0.85) > 1e-9) pass = false;
  }
  report(4, "metric hand cases exact to 1e-9", pass, detail);
}

// ---- criterion 5 (and 8): pipeline ----

struct PipelineArtifacts {
  fs::path corpus_manifest;
  fs::path feats_manifest;
  fs::path style_ckpt;
  fs::path gen_base, gen_se64, gen_vel;      // checkpoints
  fs::path pred_base, pred_se64, pred_vel;   // prediction dirs
  fs::path eval_base, eval_se64, eval_vel;   // evaluation dirs
  bool ok = false;
};

// Pinned pipeline configuration for the acceptance corpus.
const char* kSynthArgs = "--speakers 4 --sessions 2 --seconds 60 --seed 1001";
const char* kStyleArgs = "--style-dim 64 --window 25 --batch 8 --steps 400 --tau 0.1 --seed 1002";
const int kTrainEpochs = 12;
const char* kTrainCommon = "--style-dim 64 --m 25 --n 10 --d 64 --lstm-layers 3 --hidden 128 "
                           "--batch 16 --threads 2 --seed 1003";

PipelineArtifacts run_pipeline(const fs::path& root, const std::string& tag) {
  PipelineArtifacts art;
  const fs::path corpus = root / "corpus";
  if (run(msg("synth ", kSynthArgs, " --out ", corpus.string()), tag + "-synth") != 0) return art;
  art.corpus_manifest = corpus / "manifest.jsonl";

  const fs::path feats = root / "feats";
  if (run(msg("extract-features --manifest ", art.corpus_manifest.string(), " --threads 2 --out ",
              feats.string()),
          tag + "-extract") != 0)
    return art;
  art.feats_manifest = feats / "manifest.jsonl";

  const fs::path style_dir = root / "style64";
  if (run(msg("pretrain-style --manifest ", art.feats_manifest.string(), " ", kStyleArgs, " --out ",
              style_dir.string()),
          tag + "-style") != 0)
    return art;
  art.style_ckpt = style_dir / "style.ckpt";

  auto train_one = [&](const std::string& name, const std::string& extra, fs::path& ckpt) {
    const fs::path dir = root / name;
    const int rc = run(msg("train --manifest ", art.feats_manifest.string(), " ", extra,
                           " --epochs ", kTrainEpochs, " --out ", dir.string()),
                       tag + "-train-" + name);
    ckpt = dir / "generator.ckpt";
    return rc == 0;
  };
  if (!train_one("base",
                 msg("--style-dim 0 --lambda 1.0 --m 25 --n 10 --d 64 --lstm-layers 3 --hidden 128 "
                     "--batch 16 --threads 2 --seed 1003"),
                 art.gen_base))
    return art;
  if (!train_one("se64",
                 msg(kTrainCommon, " --lambda 1.0 --style-ckpt ", art.style_ckpt.string()),
                 art.gen_se64))
    return art;
  if (!train_one("se64vel",
                 msg(kTrainCommon, " --lambda 0.5 --style-ckpt ", art.style_ckpt.string()),
                 art.gen_vel))
    return art;

  auto generate_one = [&](const std::string& name, const fs::path& ckpt, bool with_style,
                          fs::path& pred) {
    pred = root / ("pred_" + name);
    std::string args = msg("generate --ckpt ", ckpt.string(), " --manifest ",
                           art.feats_manifest.string(), " --seed 1004 --threads 2 --out ",
                           pred.string());
    if (with_style) args += " --style-ckpt " + art.style_ckpt.string();
    return run(args, tag + "-gen-" + name) == 0;
  };
  if (!generate_one("base", art.gen_base, false, art.pred_base)) return art;
  if (!generate_one("se64", art.gen_se64, true, art.pred_se64)) return art;
  if (!generate_one("se64vel", art.gen_vel, true, art.pred_vel)) return art;

  auto evaluate_one = [&](const std::string& name, const fs::path& pred, fs::path& eval_dir) {
    eval_dir = root / ("eval_" + name);
    return run(msg("evaluate --pred ", pred.string(), " --manifest ", art.feats_manifest.string(),
                   " --style-ckpt ", art.style_ckpt.string(), " --threads 2 --out ",
                   eval_dir.string()),
               tag + "-eval-" + name) == 0;
  };
  if (!evaluate_one("base", art.pred_base, art.eval_base)) return art;
  if (!evaluate_one("se64", art.pred_se64, art.eval_se64)) return art;
  if (!evaluate_one("se64vel", art.pred_vel, art.eval_vel)) return art;

  art.ok = true;
  return art;
}

nlohmann::json eval_aggregate(const fs::path& eval_dir) {
  return nlohmann::json::parse(read_text_file(eval_dir / "evaluation.json"))["aggregate"];
}

// Ground-truth aggregate fixation ratio over the frame spans the predictions
// cover (offset .. offset + length).
double gt_fixation_aggregate(const PipelineArtifacts& art) {
  auto entries = motion::load_manifest(art.feats_manifest);
  const fs::path dir = art.feats_manifest.parent_path();
  double acc = 0;
  int64_t n = 0;
  for (const auto& e : entries) {
    auto gt = motion::load_motion_file(pipeline::resolve_relative(dir, e.motion_path));
    motion::MotionFileMeta meta;
    auto pred = motion::load_motion_file(art.pred_vel / (e.session_id + ".motion.csv"), &meta);
    const int64_t offset = std::stoll(meta.get("offset", "0"));
    Tensor<double> seg = motion::sequence_to_tensor<double>(gt, offset, pred.length());
    acc += metrics::fixation_ratio(metrics::idt_labels(metrics::gaze_matrix(seg)));
    ++n;
  }
  return acc / static_cast<double>(n);
}

PipelineArtifacts criterion_5_pipeline() {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineArtifacts art = run_pipeline(g_work / "run1", "run1");
  const double secs = elapsed_s(t0);
  if (!art.ok) {
    report(5, "synthetic end-to-end ablation pipeline", false, "a pipeline stage failed; see logs");
    return art;
  }

  const auto base = eval_aggregate(art.eval_base);
  const auto se64 = eval_aggregate(art.eval_se64);
  const auto vel = eval_aggregate(art.eval_vel);

  const double ce_base = base["ce"].get<double>();
  const double ce_se64 = se64["ce"].get<double>();
  const double vel_se64 = se64["vel"].get<double>();
  const double vel_vel = vel["vel"].get<double>();
  const double fix_pred = vel["fixation"].get<double>();
  const double sim = vel["simScore"].get<double>();
  const double fix_gt = gt_fixation_aggregate(art);

  const bool a = ce_se64 < ce_base;
  const bool b = vel_vel < vel_se64;
  const bool c = std::abs(fix_pred - fix_gt) <= 0.10 && sim >= 0.8;
  const bool time_ok = secs < 2700.0;

  report(5, "directional ablation reproduction on the synthetic corpus",
         a && b && c && time_ok,
         msg("CE ", ce_se64, (a ? " < " : " !< "), ce_base, "; Vel ", vel_vel,
             (b ? " < " : " !< "), vel_se64, "; fix ", fix_pred, " vs gt ", fix_gt, ", sim ", sim,
             (c ? " ok" : " bad"), "; ", secs, " s"));
  return art;
}

// ---- criterion 6 ----

struct EmbeddingSet {
  Tensor<float> points;
  std::vector<std::string> labels;
};

EmbeddingSet window_embeddings(const pipeline::StyleBundle& sb, const fs::path& manifest_path,
                               const fs::path& pred_dir = {}) {
  auto entries = motion::load_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path();
  std::vector<Tensor<float>> embs;
  std::vector<std::string> labels;
  for (const auto& e : entries) {
    motion::MotionSequence seq;
    if (pred_dir.empty()) {
      seq = motion::load_motion_file(pipeline::resolve_relative(dir, e.motion_path));
    } else {
      seq = motion::load_motion_file(pred_dir / (e.session_id + ".motion.csv"));
    }
    motion::MotionSequence norm = motion::normalize(seq, sb.stats);
    for (int64_t t = 0; t + sb.cfg.window <= norm.length(); t += sb.cfg.window) {
      Tensor<float> w = motion::sequence_to_tensor<float>(norm, t, sb.cfg.window);
      embs.push_back(sb.encoder.encode_window(sb.store, w));
      labels.push_back(e.speaker_id);
    }
  }
  EmbeddingSet out;
  out.points = Tensor<float>::matrix(static_cast<int64_t>(embs.size()), sb.cfg.d_s);
  for (size_t i = 0; i < embs.size(); ++i) {
    for (int64_t j = 0; j < sb.cfg.d_s; ++j) out.points.at(static_cast<int64_t>(i), j) = embs[i][j];
  }
  out.labels = std::move(labels);
  return out;
}

void criterion_6_clustering(const PipelineArtifacts& art) {
  if (!art.ok) {
    report(6, "style clustering", false, "pipeline unavailable");
    return;
  }
  auto sb = pipeline::load_style_bundle(art.style_ckpt);
  auto gt = window_embeddings(sb, art.feats_manifest);
  const double sil = metrics::silhouette(gt.points, gt.labels);

  auto pred = window_embeddings(sb, art.feats_manifest, art.pred_vel);
  const double acc = metrics::centroid_accuracy(gt.points, gt.labels, pred.points, pred.labels);
  const double chance = 0.25;  // 4 speakers

  const bool pass = sil > 0.2 && acc >= 2.0 * chance;
  report(6, "style-embedding clustering and nearest-centroid accuracy", pass,
         msg("silhouette=", sil, " (need > 0.2), centroid accuracy=", acc, " (need >= 0.5)"));
}

// ---- criterion 7 ----

void criterion_7_style_transfer(const PipelineArtifacts& art) {
  if (!art.ok) {
    report(7, "style transfer non-degeneracy", false, "pipeline unavailable");
    return;
  }
  auto sb = pipeline::load_style_bundle(art.style_ckpt);
  auto entries = motion::load_manifest(art.feats_manifest);
  const fs::path dir = art.feats_manifest.parent_path();

  // one mean embedding per session; pick the most dissimilar cross-speaker pair
  std::vector<Tensor<float>> session_emb(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    auto seq = motion::load_motion_file(pipeline::resolve_relative(dir, entries[i].motion_path));
    motion::MotionSequence norm = motion::normalize(seq, sb.stats);
    Tensor<float> mean({sb.cfg.d_s});
    int64_t n = 0;
    for (int64_t t = 0; t + sb.cfg.window <= norm.length(); t += sb.cfg.window) {
      auto e = sb.encoder.encode_window(sb.store, motion::sequence_to_tensor<float>(norm, t, sb.cfg.window));
      axpy(1.0f, e, mean);
      ++n;
    }
    for (int64_t j = 0; j < mean.size(); ++j) mean[j] /= static_cast<float>(n);
    session_emb[i] = std::move(mean);
  }
  size_t ref_a = 0, ref_b = 1;
  double best = 2.0;
  for (size_t i = 0; i < entries.size(); ++i) {
    for (size_t j = i + 1; j < entries.size(); ++j) {
      if (entries[i].speaker_id == entries[j].speaker_id) continue;
      const double cs = style::cosine_sim(session_emb[i], session_emb[j]);
      if (cs < best) {
        best = cs;
        ref_a = i;
        ref_b = j;
      }
    }
  }
  if (best >= 0.5) {
    report(7, "style transfer non-degeneracy", false,
           msg("no reference pair with cosine < 0.5 (best ", best, ")"));
    return;
  }

  const fs::path pred_a = g_work / "transfer_a";
  const fs::path pred_b = g_work / "transfer_b";
  const std::string ref_path_a =
      pipeline::resolve_relative(dir, entries[ref_a].motion_path).string();
  const std::string ref_path_b =
      pipeline::resolve_relative(dir, entries[ref_b].motion_path).string();
  if (run(msg("transfer-style --ckpt ", art.gen_vel.string(), " --style-ckpt ",
              art.style_ckpt.string(), " --manifest ", art.feats_manifest.string(), " --reference ",
              ref_path_a, " --threads 2 --out ", pred_a.string()),
          "transfer-a") != 0 ||
      run(msg("transfer-style --ckpt ", art.gen_vel.string(), " --style-ckpt ",
              art.style_ckpt.string(), " --manifest ", art.feats_manifest.string(), " --reference ",
              ref_path_b, " --threads 2 --out ", pred_b.string()),
          "transfer-b") != 0) {
    report(7, "style transfer non-degeneracy", false, "transfer-style run failed");
    return;
  }

  const Tensor<float>& emb_a = session_emb[ref_a];
  const Tensor<float>& emb_b = session_emb[ref_b];
  int64_t wins = 0, total = 0;
  for (const auto& e : entries) {
    for (const auto& [pred_dir, own, other] :
         {std::tuple{pred_a, &emb_a, &emb_b}, {pred_b, &emb_b, &emb_a}}) {
      auto seq = motion::load_motion_file(pred_dir / (e.session_id + ".motion.csv"));
      motion::MotionSequence norm = motion::normalize(seq, sb.stats);
      for (int64_t t = 0; t + sb.cfg.window <= norm.length(); t += sb.cfg.window) {
        auto emb = sb.encoder.encode_window(sb.store, motion::sequence_to_tensor<float>(norm, t, sb.cfg.window));
        if (style::cosine_sim(emb, *own) > style::cosine_sim(emb, *other)) ++wins;
        ++total;
      }
    }
  }
  const double frac = static_cast<double>(wins) / static_cast<double>(total);
  report(7, "style transfer non-degeneracy", frac >= 0.7,
         msg("reference cosine ", best, "; own-reference wins ", wins, "/", total, " = ", frac));
}

// ---- criterion 8 ----

void criterion_8_determinism(const PipelineArtifacts& run1) {
  if (!run1.ok) {
    report(8, "pipeline determinism", false, "pipeline unavailable");
    return;
  }
  PipelineArtifacts run2 = run_pipeline(g_work / "run2", "run2");
  if (!run2.ok) {
    report(8, "pipeline determinism", false, "second run failed");
    return;
  }
  bool pass = true;
  std::string detail;
  for (const auto& [name, a, b] :
       {std::tuple<std::string, fs::path, fs::path>{"style.ckpt", run1.style_ckpt, run2.style_ckpt},
        {"base.ckpt", run1.gen_base, run2.gen_base},
        {"se64.ckpt", run1.gen_se64, run2.gen_se64},
        {"se64vel.ckpt", run1.gen_vel, run2.gen_vel},
        {"eval_base", run1.eval_base / "evaluation.json", run2.eval_base / "evaluation.json"},
        {"eval_se64", run1.eval_se64 / "evaluation.json", run2.eval_se64 / "evaluation.json"},
        {"eval_se64vel", run1.eval_vel / "evaluation.json", run2.eval_vel / "evaluation.json"}}) {
    if (!files_identical(a, b)) {
      pass = false;
      detail += name + " differs; ";
    }
  }
  report(8, "repeating the pipeline reproduces checkpoints and evaluation JSON bitwise", pass,
         detail.empty() ? "all artifacts identical" : detail);
}

// ---- criterion 9 ----

void criterion_9_round_trips() {
  bool pass = true;
  std::string detail;
  const fs::path dir = g_work / "formats";
  fs::create_directories(dir);
  Rng rng(4242);

  // motion file: save -> load -> save byte identical
  {
    motion::MotionSequence seq;
    seq.fps = 25;
    seq.speaker_id = "spkX";
    seq.session_id = "sesX";
    seq.frames.resize(64);
    for (auto& f : seq.frames) {
      for (int c = 0; c < motion::kMotionDims; ++c) f[c] = rng.uniform(-39, 39);
    }
    motion::save_motion_file(dir / "a.motion.csv", seq);
    auto loaded = motion::load_motion_file(dir / "a.motion.csv");
    motion::save_motion_file(dir / "b.motion.csv", loaded);
    if (!files_identical(dir / "a.motion.csv", dir / "b.motion.csv")) {
      pass = false;
      detail += "motion round trip; ";
    }
  }
  // feature tensor: bitwise payload round trip
  {
    audio::FeatureSequence f;
    f.frames = Tensor<float>::matrix(40, 26);
    for (int64_t i = 0; i < f.frames.size(); ++i) f.frames[i] = static_cast<float>(rng.normal());
    audio::save_features(dir / "a.ft", f);
    auto loaded = audio::load_features(dir / "a.ft");
    if (!bitwise_equal(loaded.frames, f.frames)) {
      pass = false;
      detail += "feature round trip; ";
    }
  }
  // checkpoint: bitwise round trip
  {
    ParameterStore<float> store;
    auto& w = store.add("layer.W", {8, 8});
    for (int64_t i = 0; i < w.size(); ++i) w[i] = static_cast<float>(rng.normal());
    train::save_checkpoint(dir / "a.ckpt", store, {{"kind", "style"}});
    auto ck = train::load_checkpoint(dir / "a.ckpt");
    if (!bitwise_equal(ck.params, store)) {
      pass = false;
      detail += "checkpoint round trip; ";
    }

    // corrupted manifest: wrong shape must name the tensor
    std::string bytes = read_text_file(dir / "a.ckpt");
    uint64_t mlen = 0;
    for (int i = 0; i < 8; ++i) {
      mlen |= static_cast<uint64_t>(static_cast<unsigned char>(bytes[static_cast<size_t>(i)])) << (8 * i);
    }
    auto j = nlohmann::json::parse(bytes.substr(8, mlen));
    j["tensors"][0]["shape"] = {8, 9};
    std::string edited = j.dump();
    std::string out;
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((edited.size() >> (8 * i)) & 0xff));
    out += edited;
    out += bytes.substr(8 + mlen);
    write_text_file(dir / "bad_shape.ckpt", out);
    try {
      train::load_checkpoint(dir / "bad_shape.ckpt");
      pass = false;
      detail += "wrong-shape manifest accepted; ";
    } catch (const Error& e) {
      if (std::string(e.what()).find("layer.W") == std::string::npos) {
        pass = false;
        detail += "wrong-shape error does not name tensor; ";
      }
    }

    // future version
    j = nlohmann::json::parse(bytes.substr(8, mlen));
    j["format_version"] = "2";
    edited = j.dump();
    out.clear();
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((edited.size() >> (8 * i)) & 0xff));
    out += edited;
    out += bytes.substr(8 + mlen);
    write_text_file(dir / "vfuture.ckpt", out);
    try {
      train::load_checkpoint(dir / "vfuture.ckpt");
      pass = false;
      detail += "future version accepted; ";
    } catch (const Error& e) {
      if (std::string(e.what()).find("unsupported version") == std::string::npos) {
        pass = false;
        detail += "future-version error text; ";
      }
    }

    // truncated payload
    write_text_file(dir / "trunc.ckpt", bytes.substr(0, bytes.size() - 10));
    try {
      train::load_checkpoint(dir / "trunc.ckpt");
      pass = false;
      detail += "truncated payload accepted; ";
    } catch (const Error&) {
    }
  }
  // corrupted corpus manifest
  {
    write_text_file(dir / "bad_manifest.jsonl",
                    "{\"motion_path\":\"x\",\"audio_path\":\"y\",\"session_id\":\"s\"}\n");
    try {
      motion::load_manifest(dir / "bad_manifest.jsonl");
      pass = false;
      detail += "bad manifest accepted; ";
    } catch (const Error& e) {
      if (std::string(e.what()).find("speaker_id") == std::string::npos) {
        pass = false;
        detail += "manifest error text; ";
      }
    }
  }
  report(9, "format round trips and corruption errors", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
  g_cli = GAZEKIT_CLI_PATH;
  g_work = fs::temp_directory_path() / "gazekit_acceptance";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") g_cli = argv[i + 1];
    if (flag == "--work") g_work = argv[i + 1];
  }
  fs::remove_all(g_work);
  fs::create_directories(g_work);
  std::cout << "acceptance work dir: " << g_work << std::endl;

  criterion_1_gradcheck();
  criterion_2_ntxent_closed_form();
  criterion_3_idt_oracle();
  criterion_4_metric_hand_cases();
  PipelineArtifacts art = criterion_5_pipeline();
  criterion_6_clustering(art);
  criterion_7_style_transfer(art);
  criterion_8_determinism(art);
  criterion_9_round_trips();

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : msg(g_failures, " CRITERIA FAILED"))
            << std::endl;
  return g_failures;
}
