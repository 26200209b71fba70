// Command-line front end: corpus synthesis, feature extraction, two-stage
// training, generation, style transfer, evaluation, embedding export and
// gradient checking, one subcommand each.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "gazekit/pipeline.hpp"

namespace fs = std::filesystem;
using namespace gazekit;

namespace {

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

fs::path resolve_run_dir(std::string out, const std::string& subcommand) {
  if (out.empty()) out = "runs/" + timestamp_utc() + "-" + subcommand;
  fs::create_directories(out);
  return out;
}

void write_resolved_config(const fs::path& run_dir, const std::string& subcommand,
                           const nlohmann::json& cfg) {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["config"] = cfg;
  write_text_file(run_dir / "resolved_config.json", j.dump(2) + "\n");
}

// --config <file> handling: a JSON object mirroring the subcommand's long
// flags, e.g. {"speakers": 4, "seconds": 60}. Command-line flags win.
std::vector<std::string> expand_config_file(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (config_path.empty()) return args;
  require(!args.empty(), "--config requires a subcommand");

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(config_path));
  } catch (const std::exception& e) {
    raise("bad config file ", config_path, ": ", e.what());
  }
  require(j.is_object(), "config file must hold a JSON object of flag values");
  // Insert right after the subcommand so explicit flags (later) override.
  std::vector<std::string> injected;
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back("--" + key);
    } else if (value.is_string()) {
      injected.push_back("--" + key + "=" + value.get<std::string>());
    } else {
      injected.push_back("--" + key + "=" + value.dump());
    }
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

struct MelFlags {
  audio::MelConfig cfg;

  void attach(CLI::App* cmd) {
    cmd->add_option("--n-fft", cfg.n_fft, "STFT window length, samples");
    cmd->add_option("--hop", cfg.hop, "STFT hop, samples");
    cmd->add_option("--n-mels", cfg.n_mels, "mel bands");
    cmd->add_option("--fmin", cfg.fmin, "lowest mel band edge, Hz");
    cmd->add_option("--fmax", cfg.fmax, "highest mel band edge, Hz");
    cmd->add_option("--log-floor", cfg.log_floor, "log compression floor");
  }

  nlohmann::json to_json() const {
    return {{"n_fft", cfg.n_fft}, {"hop", cfg.hop},       {"n_mels", cfg.n_mels},
            {"fmin", cfg.fmin},   {"fmax", cfg.fmax},     {"log_floor", cfg.log_floor}};
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gazekit: speech-conditioned 3D gaze and head motion synthesis"};
  app.require_subcommand(1);

  int exit_code = 0;

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a synthetic gaze-head-audio corpus");
  synth::SynthConfig synth_cfg;
  std::string synth_out;
  synth->add_option("--speakers", synth_cfg.n_speakers, "number of speakers");
  synth->add_option("--sessions", synth_cfg.sessions_per_speaker, "sessions per speaker");
  synth->add_option("--seconds", synth_cfg.session_seconds, "seconds per session");
  synth->add_option("--seed", synth_cfg.seed, "master seed");
  synth->add_option("--out", synth_out, "output directory");
  synth->callback([&]() {
    const fs::path run_dir = resolve_run_dir(synth_out, "synth");
    write_resolved_config(run_dir, "synth",
                          {{"speakers", synth_cfg.n_speakers},
                           {"sessions", synth_cfg.sessions_per_speaker},
                           {"seconds", synth_cfg.session_seconds},
                           {"seed", synth_cfg.seed}});
    auto manifest = synth::generate_corpus(synth_cfg, run_dir);
    std::cout << "wrote " << manifest.size() << " sessions under " << run_dir.string() << "\n";
  });

  // ---- extract-features ----
  auto* extract = app.add_subcommand("extract-features", "compute log-mel features for a corpus");
  std::string ef_manifest, ef_out;
  int64_t ef_threads = 1;
  MelFlags ef_mel;
  extract->add_option("--manifest", ef_manifest, "corpus manifest")->required();
  extract->add_option("--out", ef_out, "output directory");
  extract->add_option("--threads", ef_threads, "worker threads (0 = auto)");
  ef_mel.attach(extract);
  extract->callback([&]() {
    const fs::path run_dir = resolve_run_dir(ef_out, "extract-features");
    nlohmann::json cfg = ef_mel.to_json();
    cfg["manifest"] = ef_manifest;
    cfg["threads"] = ef_threads;
    write_resolved_config(run_dir, "extract-features", cfg);
    pipeline::run_extract_features(ef_manifest, run_dir, ef_mel.cfg, ef_threads);
    std::cout << "features written under " << run_dir.string() << "\n";
  });

  // ---- pretrain-style ----
  auto* prestyle = app.add_subcommand("pretrain-style", "contrastive style-encoder pretraining");
  std::string ps_manifest, ps_out;
  style::StyleEncoderConfig ps_cfg;
  train::TrainConfig ps_tcfg;
  ps_tcfg.batch = 8;
  ps_tcfg.epochs = 10;
  prestyle->add_option("--manifest", ps_manifest, "corpus manifest")->required();
  prestyle->add_option("--style-dim", ps_cfg.d_s, "embedding width d_s");
  prestyle->add_option("--layers", ps_cfg.n_layers, "Transformer layers");
  prestyle->add_option("--heads", ps_cfg.n_heads, "attention heads");
  prestyle->add_option("--ff-dim", ps_cfg.ff_dim, "feed-forward width");
  prestyle->add_option("--window", ps_cfg.window, "window length M, frames");
  prestyle->add_option("--tau", ps_tcfg.tau, "NT-Xent temperature");
  prestyle->add_option("--batch", ps_tcfg.batch, "pairs per step");
  prestyle->add_option("--epochs", ps_tcfg.epochs, "epochs");
  prestyle->add_option("--steps", ps_tcfg.steps, "total steps (overrides epochs)");
  prestyle->add_option("--lr", ps_tcfg.lr, "learning rate (0 = stage default 1e-3)");
  prestyle->add_option("--seed", ps_tcfg.seed, "seed");
  prestyle->add_option("--out", ps_out, "output directory");
  prestyle->callback([&]() {
    const fs::path run_dir = resolve_run_dir(ps_out, "pretrain-style");
    write_resolved_config(run_dir, "pretrain-style",
                          {{"manifest", ps_manifest},
                           {"style_dim", ps_cfg.d_s},
                           {"layers", ps_cfg.n_layers},
                           {"heads", ps_cfg.n_heads},
                           {"ff_dim", ps_cfg.ff_dim},
                           {"window", ps_cfg.window},
                           {"tau", ps_tcfg.tau},
                           {"batch", ps_tcfg.batch},
                           {"epochs", ps_tcfg.epochs},
                           {"steps", ps_tcfg.steps},
                           {"lr", ps_tcfg.lr},
                           {"seed", ps_tcfg.seed}});
    const fs::path ckpt = pipeline::run_pretrain_style(ps_manifest, run_dir, ps_cfg, ps_tcfg);
    std::cout << "style checkpoint: " << ckpt.string() << "\n";
  });

  // ---- train ----
  auto* tr = app.add_subcommand("train", "train the motion generator (style encoder frozen)");
  std::string tr_manifest, tr_out, tr_style_ckpt, tr_resume;
  gen::GenerationConfig tr_gcfg;
  train::TrainConfig tr_tcfg;
  tr->add_option("--manifest", tr_manifest, "corpus manifest")->required();
  tr->add_option("--style-ckpt", tr_style_ckpt, "pretrained style encoder checkpoint");
  tr->add_option("--style-dim", tr_gcfg.d_s, "style width (0 disables style conditioning)");
  tr->add_option("--lambda", tr_tcfg.lambda, "loss mix: lambda*mse + (1-lambda)*vel");
  tr->add_option("--m", tr_gcfg.m_len, "past window length M");
  tr->add_option("--n", tr_gcfg.n_len, "prediction length N");
  tr->add_option("--d", tr_gcfg.d, "fused projection width");
  tr->add_option("--lstm-layers", tr_gcfg.lstm.n_layers, "LSTM layers");
  tr->add_option("--hidden", tr_gcfg.lstm.hidden, "LSTM hidden width");
  tr->add_option("--batch", tr_tcfg.batch, "windows per step");
  tr->add_option("--epochs", tr_tcfg.epochs, "epochs");
  tr->add_option("--steps", tr_tcfg.steps, "total steps (overrides epochs)");
  tr->add_option("--lr", tr_tcfg.lr, "learning rate (0 = stage default 3e-4)");
  tr->add_option("--clip", tr_tcfg.clip_norm, "gradient clip (global norm)");
  tr->add_option("--seed", tr_tcfg.seed, "seed");
  tr->add_option("--threads", tr_tcfg.threads, "worker threads (0 = auto)");
  tr->add_option("--resume", tr_resume, "checkpoint to resume from");
  tr->add_option("--out", tr_out, "output directory");
  tr->callback([&]() {
    const fs::path run_dir = resolve_run_dir(tr_out, "train");
    write_resolved_config(run_dir, "train",
                          {{"manifest", tr_manifest},
                           {"style_ckpt", tr_style_ckpt},
                           {"style_dim", tr_gcfg.d_s},
                           {"lambda", tr_tcfg.lambda},
                           {"m", tr_gcfg.m_len},
                           {"n", tr_gcfg.n_len},
                           {"d", tr_gcfg.d},
                           {"lstm_layers", tr_gcfg.lstm.n_layers},
                           {"hidden", tr_gcfg.lstm.hidden},
                           {"batch", tr_tcfg.batch},
                           {"epochs", tr_tcfg.epochs},
                           {"steps", tr_tcfg.steps},
                           {"lr", tr_tcfg.lr},
                           {"clip", tr_tcfg.clip_norm},
                           {"seed", tr_tcfg.seed},
                           {"threads", tr_tcfg.threads},
                           {"resume", tr_resume}});
    const fs::path ckpt = pipeline::run_train_generator(tr_manifest, run_dir, tr_gcfg, tr_tcfg,
                                                        tr_style_ckpt, tr_resume);
    std::cout << "generator checkpoint: " << ckpt.string() << "\n";
  });

  // ---- generate ----
  auto* ge = app.add_subcommand("generate", "autoregressive motion generation for a corpus");
  std::string ge_ckpt, ge_style_ckpt, ge_manifest, ge_out, ge_mode = "recompute";
  pipeline::GenerateOptions ge_opt;
  ge->add_option("--ckpt", ge_ckpt, "generator checkpoint")->required();
  ge->add_option("--style-ckpt", ge_style_ckpt, "style encoder checkpoint");
  ge->add_option("--manifest", ge_manifest, "corpus manifest (audio + seed motion)")->required();
  ge->add_option("--style-mode", ge_mode, "style source: recompute | fixed")
      ->check(CLI::IsMember({"recompute", "fixed"}));
  ge->add_flag("--mean-seed", ge_opt.mean_seed, "seed with the corpus mean pose");
  ge->add_option("--seed", ge_opt.seed, "seed stamped into outputs");
  ge->add_option("--threads", ge_opt.threads, "worker threads (0 = auto)");
  ge->add_option("--out", ge_out, "output directory");
  ge->callback([&]() {
    const fs::path run_dir = resolve_run_dir(ge_out, "generate");
    write_resolved_config(run_dir, "generate",
                          {{"ckpt", ge_ckpt},
                           {"style_ckpt", ge_style_ckpt},
                           {"manifest", ge_manifest},
                           {"style_mode", ge_mode},
                           {"mean_seed", ge_opt.mean_seed},
                           {"seed", ge_opt.seed},
                           {"threads", ge_opt.threads}});
    ge_opt.style_mode = ge_mode == "fixed" ? gen::StyleMode::kFixed : gen::StyleMode::kRecompute;
    pipeline::run_generate(ge_ckpt, ge_style_ckpt, ge_manifest, run_dir, ge_opt);
    std::cout << "generated motion under " << run_dir.string() << "\n";
  });

  // ---- transfer-style ----
  auto* ts = app.add_subcommand("transfer-style", "generate with the style of a reference motion");
  std::string ts_ckpt, ts_style_ckpt, ts_manifest, ts_reference, ts_out;
  pipeline::GenerateOptions ts_opt;
  ts->add_option("--ckpt", ts_ckpt, "generator checkpoint")->required();
  ts->add_option("--style-ckpt", ts_style_ckpt, "style encoder checkpoint")->required();
  ts->add_option("--manifest", ts_manifest, "target corpus manifest")->required();
  ts->add_option("--reference", ts_reference, "reference motion file (style source)")->required();
  ts->add_option("--seed", ts_opt.seed, "seed stamped into outputs");
  ts->add_option("--threads", ts_opt.threads, "worker threads (0 = auto)");
  ts->add_option("--out", ts_out, "output directory");
  ts->callback([&]() {
    const fs::path run_dir = resolve_run_dir(ts_out, "transfer-style");
    write_resolved_config(run_dir, "transfer-style",
                          {{"ckpt", ts_ckpt},
                           {"style_ckpt", ts_style_ckpt},
                           {"manifest", ts_manifest},
                           {"reference", ts_reference},
                           {"seed", ts_opt.seed},
                           {"threads", ts_opt.threads}});
    pipeline::run_transfer_style(ts_ckpt, ts_style_ckpt, ts_manifest, ts_reference, run_dir, ts_opt);
    std::cout << "transferred motion under " << run_dir.string() << "\n";
  });

  // ---- evaluate ----
  auto* ev = app.add_subcommand("evaluate", "score predictions against ground truth");
  std::string ev_pred, ev_manifest, ev_style_ckpt, ev_out;
  int64_t ev_threads = 1;
  ev->add_option("--pred", ev_pred, "directory of predicted motion files")->required();
  ev->add_option("--manifest", ev_manifest, "ground-truth corpus manifest")->required();
  ev->add_option("--style-ckpt", ev_style_ckpt, "style encoder for the cosine error")->required();
  ev->add_option("--threads", ev_threads, "worker threads (0 = auto)");
  ev->add_option("--out", ev_out, "output directory");
  ev->callback([&]() {
    const fs::path run_dir = resolve_run_dir(ev_out, "evaluate");
    write_resolved_config(run_dir, "evaluate",
                          {{"pred", ev_pred},
                           {"manifest", ev_manifest},
                           {"style_ckpt", ev_style_ckpt},
                           {"threads", ev_threads}});
    pipeline::EvalOutcome outcome =
        pipeline::run_evaluate(ev_pred, ev_manifest, ev_style_ckpt, run_dir, ev_threads);
    std::cout << metrics::render_table(outcome.sequences, outcome.aggregate);
    for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
    if (!outcome.warnings.empty()) {
      std::cerr << outcome.warnings.size() << " session(s) skipped\n";
    }
  });

  // ---- embed ----
  auto* em = app.add_subcommand("embed", "export style embeddings for a corpus");
  std::string em_style_ckpt, em_manifest, em_out;
  em->add_option("--style-ckpt", em_style_ckpt, "style encoder checkpoint")->required();
  em->add_option("--manifest", em_manifest, "corpus manifest")->required();
  em->add_option("--out", em_out, "output directory");
  em->callback([&]() {
    const fs::path run_dir = resolve_run_dir(em_out, "embed");
    write_resolved_config(run_dir, "embed",
                          {{"style_ckpt", em_style_ckpt}, {"manifest", em_manifest}});
    pipeline::run_embed(em_style_ckpt, em_manifest, run_dir / "embeddings.csv");
    std::cout << "embeddings: " << (run_dir / "embeddings.csv").string() << "\n";
  });

  // ---- gradcheck ----
  auto* gc = app.add_subcommand("gradcheck", "finite-difference verification of all gradients");
  uint64_t gc_seed = 7;
  std::string gc_out;
  gc->add_option("--seed", gc_seed, "seed for toy shapes");
  gc->add_option("--out", gc_out, "output directory");
  gc->callback([&]() {
    const fs::path run_dir = resolve_run_dir(gc_out, "gradcheck");
    write_resolved_config(run_dir, "gradcheck", {{"seed", gc_seed}});
    train::GradCheckReport report = train::run_gradcheck(gc_seed);
    write_text_file(run_dir / "gradcheck.json", report.to_json().dump(2) + "\n");
    for (const auto& c : report.cases) {
      std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  max_rel_err=" << c.max_rel_err
                << "  threshold=" << c.threshold << "\n";
    }
    std::cout << "elapsed: " << report.seconds << " s\n";
    if (!report.all_pass()) exit_code = 1;
  });

  try {
    const std::vector<std::string> args = expand_config_file(argc, argv);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "gazekit: usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gazekit: error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
