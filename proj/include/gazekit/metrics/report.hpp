#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazekit/metrics/beats.hpp"
#include "gazekit/metrics/gaze_patterns.hpp"
#include "gazekit/metrics/regression.hpp"

namespace gazekit::metrics {

struct ChannelReport {
  double mae = 0.0;
  double vel = 0.0;
  double mee = 0.0;
  double bas = 0.0;

  nlohmann::json to_json() const {
    return {{"mae", mae}, {"vel", vel}, {"mee", mee}, {"bas", bas}};
  }
};

struct EvalReport {
  std::string session_id;
  std::string speaker_id;
  int64_t frames = 0;
  ChannelReport all, gaze, head;
  double ce = 0.0;         // style cosine error
  double fixation = 0.0;   // fixation-frame fraction of the prediction
  double saccades = 0.0;   // 1 - fixation
  double comp_score = 0.0;
  double sim_score = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    if (!session_id.empty()) j["session"] = session_id;
    if (!speaker_id.empty()) j["speaker"] = speaker_id;
    j["frames"] = frames;
    j["mae"] = all.mae;
    j["vel"] = all.vel;
    j["mee"] = all.mee;
    j["ce"] = ce;
    j["bas"] = all.bas;
    j["saccades"] = saccades;
    j["fixation"] = fixation;
    j["compScore"] = comp_score;
    j["simScore"] = sim_score;
    j["all"] = all.to_json();
    j["gaze"] = gaze.to_json();
    j["head"] = head.to_json();
    return j;
  }
};

// Unweighted mean of per-sequence reports.
inline EvalReport aggregate_reports(const std::vector<EvalReport>& reports) {
  require(!reports.empty(), "aggregate_reports: nothing to aggregate");
  EvalReport agg;
  agg.session_id = "aggregate";
  const double inv = 1.0 / static_cast<double>(reports.size());
  for (const auto& r : reports) {
    agg.frames += r.frames;
    for (auto [dst, src] : {std::pair{&agg.all, &r.all}, {&agg.gaze, &r.gaze}, {&agg.head, &r.head}}) {
      dst->mae += src->mae * inv;
      dst->vel += src->vel * inv;
      dst->mee += src->mee * inv;
      dst->bas += src->bas * inv;
    }
    agg.ce += r.ce * inv;
    agg.fixation += r.fixation * inv;
    agg.saccades += r.saccades * inv;
    agg.comp_score += r.comp_score * inv;
    agg.sim_score += r.sim_score * inv;
  }
  return agg;
}

// Column-aligned text tables mirroring the usual evaluation layout:
// regression metrics per channel group, then gaze-pattern rows.
inline std::string render_table(const std::vector<EvalReport>& reports, const EvalReport& agg) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%9.4f", v);
    return std::string(buf);
  };
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%8.2f%%", 100.0 * v);
    return std::string(buf);
  };
  std::string out;
  out += "Section    |       All                                    |      Gaze                          |      Head\n";
  out += "Sequence   |       MAE       Vel       MEE        CE  BAS |       MAE       Vel       MEE  BAS |       MAE       Vel       MEE  BAS\n";
  auto row = [&](const std::string& name, const EvalReport& r) {
    std::string line = name;
    line.resize(11, ' ');
    line += "|" + fmt(r.all.mae) + fmt(r.all.vel) + fmt(r.all.mee) + fmt(r.ce) + fmt(r.all.bas);
    line += " |" + fmt(r.gaze.mae) + fmt(r.gaze.vel) + fmt(r.gaze.mee) + fmt(r.gaze.bas);
    line += " |" + fmt(r.head.mae) + fmt(r.head.vel) + fmt(r.head.mee) + fmt(r.head.bas);
    return line + "\n";
  };
  for (const auto& r : reports) out += row(r.session_id, r);
  out += row("aggregate", agg);
  out += "\n";
  out += "Sequence   | saccades  fixation  compScore  simScore\n";
  auto prow = [&](const std::string& name, const EvalReport& r) {
    std::string line = name;
    line.resize(11, ' ');
    line += "|" + pct(r.saccades) + " " + pct(r.fixation) + "  " + fmt(r.comp_score) + "  " +
            fmt(r.sim_score);
    return line + "\n";
  };
  for (const auto& r : reports) out += prow(r.session_id, r);
  out += prow("aggregate", agg);
  return out;
}

}  // namespace gazekit::metrics
