#pragma once

#include <map>
#include <string>
#include <vector>

#include "gazekit/motion/ops.hpp"
#include "gazekit/rng.hpp"

namespace gazekit::style {

// One eligible encoder input window with its provenance.
struct StyleWindow {
  Tensor<float> motion;  // M x 7, normalized
  std::string speaker_id;
  std::string session_id;
  int64_t t_index = 0;
};

// N positive pairs: pair i's two windows are adjacent (start frames exactly
// M apart) in the same session; windows of different pairs satisfy the
// negative criterion (different speaker/session, or gap >= gap_min frames).
struct PairBatch {
  std::vector<int64_t> anchor;   // indices into the window list (variant a)
  std::vector<int64_t> partner;  // variant b

  int64_t size() const { return static_cast<int64_t>(anchor.size()); }
};

// Dense window enumeration over a sequence (stride 1 by default so every
// adjacent pair is reachable).
inline void enumerate_style_windows(const motion::MotionSequence& seq, int64_t m_len,
                                    int64_t source_offset, std::vector<StyleWindow>& out,
                                    int64_t stride = 1) {
  for (int64_t s = 0; s + m_len <= seq.length(); s += stride) {
    StyleWindow w;
    w.motion = motion::sequence_to_tensor<float>(seq, s, m_len);
    w.speaker_id = seq.speaker_id;
    w.session_id = seq.session_id;
    w.t_index = source_offset + s;
    out.push_back(std::move(w));
  }
}

inline bool negatives_compatible(const StyleWindow& a, const StyleWindow& b, int64_t gap_min) {
  if (a.speaker_id != b.speaker_id) return true;
  if (a.session_id != b.session_id) return true;  // distant by construction
  return std::abs(a.t_index - b.t_index) >= gap_min;
}

inline PairBatch sample_pairs(const std::vector<StyleWindow>& windows, int64_t n_pairs, int64_t m_len,
                              int64_t gap_min, Rng& rng) {
  require(n_pairs >= 2, "sample_pairs: need at least 2 pairs for a contrastive batch");

  // candidate adjacent pairs per session
  std::map<std::pair<std::string, std::string>, std::map<int64_t, int64_t>> by_session;
  for (int64_t i = 0; i < static_cast<int64_t>(windows.size()); ++i) {
    const auto& w = windows[static_cast<size_t>(i)];
    by_session[{w.speaker_id, w.session_id}][w.t_index] = i;
  }
  std::vector<std::pair<int64_t, int64_t>> candidates;
  for (const auto& [key, idx_by_t] : by_session) {
    for (const auto& [t, i] : idx_by_t) {
      auto it = idx_by_t.find(t + m_len);
      if (it != idx_by_t.end()) candidates.emplace_back(i, it->second);
    }
  }
  require(!candidates.empty(), "sample_pairs: no adjacent window pairs in corpus");

  rng.shuffle(candidates);

  PairBatch batch;
  std::vector<int64_t> selected;
  for (const auto& [a, b] : candidates) {
    bool ok = true;
    for (int64_t s : selected) {
      if (!negatives_compatible(windows[static_cast<size_t>(a)], windows[static_cast<size_t>(s)], gap_min) ||
          !negatives_compatible(windows[static_cast<size_t>(b)], windows[static_cast<size_t>(s)], gap_min)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    batch.anchor.push_back(a);
    batch.partner.push_back(b);
    selected.push_back(a);
    selected.push_back(b);
    if (batch.size() == n_pairs) break;
  }
  require(batch.size() == n_pairs, "sample_pairs: insufficient eligible windows (wanted ", n_pairs,
          " pairs, found ", batch.size(), ")");
  return batch;
}

}  // namespace gazekit::style
