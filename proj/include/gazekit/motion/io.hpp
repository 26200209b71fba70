#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazekit/motion/types.hpp"

namespace gazekit::motion {

// Motion file format: UTF-8 text, comma-separated. One or more leading
// comment lines starting with '#'; the metadata comment carries
// `fps=<int> speaker=<id> session=<id>` tokens. Then the exact header
//   frame,head_pitch,head_yaw,head_roll,l_eye_pitch,l_eye_yaw,r_eye_pitch,r_eye_yaw
// and one row per frame, values in degrees.

inline const std::string kMotionHeader =
    "frame,head_pitch,head_yaw,head_roll,l_eye_pitch,l_eye_yaw,r_eye_pitch,r_eye_yaw";

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Parses `key=value` tokens from a comment line.
inline std::map<std::string, std::string> parse_comment_tokens(const std::string& line) {
  std::map<std::string, std::string> out;
  std::string body = line.substr(1);  // drop '#'
  for (const auto& tok : split(body, ' ')) {
    auto t = strip(tok);
    size_t eq = t.find('=');
    if (eq == std::string::npos || eq == 0) continue;
    out[t.substr(0, eq)] = t.substr(eq + 1);
  }
  return out;
}

}  // namespace detail

struct MotionFileMeta {
  std::map<std::string, std::string> tokens;  // all key=value pairs from comments

  std::string get(const std::string& key, const std::string& fallback = "") const {
    auto it = tokens.find(key);
    return it == tokens.end() ? fallback : it->second;
  }
};

inline MotionSequence load_motion_file(const std::filesystem::path& path,
                                       MotionFileMeta* meta_out = nullptr) {
  std::ifstream in(path);
  require(in.good(), "cannot open motion file: ", path.string());

  MotionSequence seq;
  MotionFileMeta meta;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  bool fps_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    std::string t = detail::strip(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      require(!header_seen, path.string(), ":", line_no, ": comment after header");
      for (const auto& [k, v] : detail::parse_comment_tokens(t)) meta.tokens[k] = v;
      continue;
    }
    if (!header_seen) {
      require(t == kMotionHeader, path.string(), ":", line_no,
              ": bad or missing column header (missing column?)");
      header_seen = true;
      require(meta.tokens.count("fps"), path.string(), ": fps field absent from metadata comment");
      try {
        seq.fps = std::stod(meta.tokens.at("fps"));
      } catch (const std::exception&) {
        raise(path.string(), ": unparseable fps value '", meta.tokens.at("fps"), "'");
      }
      require(seq.fps > 0, path.string(), ": fps must be positive");
      fps_seen = true;
      seq.speaker_id = meta.get("speaker");
      seq.session_id = meta.get("session");
      continue;
    }
    auto cells = detail::split(t, ',');
    require(cells.size() == static_cast<size_t>(kMotionDims) + 1, path.string(), ":", line_no,
            ": expected ", kMotionDims + 1, " columns, got ", cells.size(),
            " (missing column in row)");
    MotionFrame f;
    for (int c = 0; c < kMotionDims; ++c) {
      const std::string& cell = cells[static_cast<size_t>(c + 1)];
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      require(end && *end == '\0' && !cell.empty(), path.string(), ":", line_no,
              ": unparseable value '", cell, "' in column ", channel_names()[static_cast<size_t>(c)]);
      require(std::isfinite(v), path.string(), ":", line_no, ": non-finite value in column ",
              channel_names()[static_cast<size_t>(c)]);
      f[c] = v;
    }
    seq.frames.push_back(f);
  }
  require(header_seen && fps_seen, path.string(), ": no header found");
  require(seq.length() >= 1, path.string(), ": empty motion file");
  if (meta_out) *meta_out = meta;
  return seq;
}

// extra_comment, when non-empty, is written as an additional `# key=value ...`
// line (used to stamp generated motion with config hash / seed / style mode).
inline void save_motion_file(const std::filesystem::path& path, const MotionSequence& seq,
                             const std::string& extra_comment = "") {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open motion file for writing: ", path.string());
  out << "# fps=" << static_cast<int>(seq.fps) << " speaker=" << seq.speaker_id
      << " session=" << seq.session_id << "\n";
  if (!extra_comment.empty()) out << "# " << extra_comment << "\n";
  out << kMotionHeader << "\n";
  char buf[64];
  for (int64_t i = 0; i < seq.length(); ++i) {
    out << i;
    for (int c = 0; c < kMotionDims; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", seq.frames[static_cast<size_t>(i)][c]);
      out << ',' << buf;
    }
    out << "\n";
  }
  require(out.good(), "write failed: ", path.string());
}

// Corpus manifest: one JSON object per line. Required fields: motion_path,
// audio_path, speaker_id, session_id. Optional: feature_path.
struct ManifestEntry {
  std::string motion_path;
  std::string audio_path;
  std::string speaker_id;
  std::string session_id;
  std::string feature_path;  // optional
};

inline std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open manifest: ", path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = detail::strip(line);
    if (t.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const std::exception& e) {
      raise(path.string(), ":", line_no, ": bad manifest JSON: ", e.what());
    }
    ManifestEntry e;
    for (const char* field : {"motion_path", "audio_path", "speaker_id", "session_id"}) {
      require(j.contains(field), path.string(), ":", line_no, ": manifest entry missing field '",
              field, "'");
    }
    e.motion_path = j["motion_path"].get<std::string>();
    e.audio_path = j["audio_path"].get<std::string>();
    e.speaker_id = j["speaker_id"].get<std::string>();
    e.session_id = j["session_id"].get<std::string>();
    if (j.contains("feature_path")) e.feature_path = j["feature_path"].get<std::string>();
    out.push_back(std::move(e));
  }
  return out;
}

inline void save_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open manifest for writing: ", path.string());
  for (const auto& e : entries) {
    nlohmann::json j;
    j["motion_path"] = e.motion_path;
    j["audio_path"] = e.audio_path;
    j["speaker_id"] = e.speaker_id;
    j["session_id"] = e.session_id;
    if (!e.feature_path.empty()) j["feature_path"] = e.feature_path;
    out << j.dump() << "\n";
  }
  require(out.good(), "write failed: ", path.string());
}

}  // namespace gazekit::motion
