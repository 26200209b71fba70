#pragma once

#include <algorithm>
#include <vector>

#include "gazekit/audio/features.hpp"
#include "gazekit/metrics/regression.hpp"

namespace gazekit::metrics {

struct BeatConfig {
  double sigma = 3.0;             // frames, Gaussian kernel width
  double energy_percentile = 75;  // audio-beat threshold
};

namespace detail {

inline double percentile(std::vector<double> v, double p) {
  require(!v.empty(), "percentile: empty input");
  std::sort(v.begin(), v.end());
  const double idx = p / 100.0 * static_cast<double>(v.size() - 1);
  const int64_t lo = static_cast<int64_t>(std::floor(idx));
  const int64_t hi = static_cast<int64_t>(std::ceil(idx));
  const double frac = idx - static_cast<double>(lo);
  return v[static_cast<size_t>(lo)] * (1.0 - frac) + v[static_cast<size_t>(hi)] * frac;
}

inline double median(const std::vector<double>& v) { return percentile(v, 50.0); }

}  // namespace detail

// Velocity magnitude per frame step over the selected channels, degrees/s.
template <class S>
std::vector<double> velocity_magnitude(const Tensor<S>& m, ChannelMask mask = ChannelMask::kAll,
                                       double fps = 25.0) {
  require(m.rows() >= 2, "velocity_magnitude: need at least 2 frames");
  const auto chans = mask_channels(mask);
  std::vector<double> out(static_cast<size_t>(m.rows() - 1));
  for (int64_t t = 1; t < m.rows(); ++t) {
    double acc = 0.0;
    for (int c : chans) {
      const double d = static_cast<double>(m.at(t, c)) - static_cast<double>(m.at(t - 1, c));
      acc += d * d;
    }
    out[static_cast<size_t>(t - 1)] = fps * std::sqrt(acc);
  }
  return out;
}

// Motion beats: interior strict local minima of the velocity magnitude that
// fall below its median. Reported at the arrival frame of the minimum step.
template <class S>
std::vector<int64_t> motion_beats(const Tensor<S>& m, ChannelMask mask = ChannelMask::kAll) {
  const auto v = velocity_magnitude(m, mask);
  std::vector<int64_t> beats;
  if (v.size() < 3) return beats;
  const double med = detail::median(v);
  for (size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] < v[i - 1] && v[i] < v[i + 1] && v[i] < med) {
      beats.push_back(static_cast<int64_t>(i) + 1);
    }
  }
  return beats;
}

// Audio beats: interior strict local maxima of frame-summed feature energy
// above its 75th percentile.
inline std::vector<int64_t> audio_beats(const audio::FeatureSequence& feats,
                                        const BeatConfig& cfg = BeatConfig()) {
  const int64_t t_total = feats.length();
  std::vector<int64_t> beats;
  if (t_total < 3) return beats;
  std::vector<double> energy(static_cast<size_t>(t_total));
  for (int64_t t = 0; t < t_total; ++t) {
    double acc = 0.0;
    for (int64_t f = 0; f < feats.feature_dim(); ++f) acc += static_cast<double>(feats.frames.at(t, f));
    energy[static_cast<size_t>(t)] = acc;
  }
  const double thresh = detail::percentile(energy, cfg.energy_percentile);
  for (int64_t t = 1; t + 1 < t_total; ++t) {
    if (energy[static_cast<size_t>(t)] > energy[static_cast<size_t>(t - 1)] &&
        energy[static_cast<size_t>(t)] > energy[static_cast<size_t>(t + 1)] &&
        energy[static_cast<size_t>(t)] > thresh) {
      beats.push_back(t);
    }
  }
  return beats;
}

inline double beat_alignment_from_beats(const std::vector<int64_t>& motion_b,
                                        const std::vector<int64_t>& audio_b, double sigma) {
  if (motion_b.empty() || audio_b.empty()) return 0.0;
  double acc = 0.0;
  for (int64_t b : motion_b) {
    double best = std::numeric_limits<double>::max();
    for (int64_t a : audio_b) {
      best = std::min(best, static_cast<double>((b - a) * (b - a)));
    }
    acc += std::exp(-best / (2.0 * sigma * sigma));
  }
  return acc / static_cast<double>(motion_b.size());
}

// BAS: mean over motion beats of exp(-(distance to nearest audio beat)^2 /
// (2 sigma^2)); 0 when no motion beats are detected.
template <class S>
double beat_alignment(const Tensor<S>& m, const audio::FeatureSequence& feats,
                      ChannelMask mask = ChannelMask::kAll, const BeatConfig& cfg = BeatConfig()) {
  require(m.rows() >= 3 && feats.length() >= 3, "beat_alignment: need at least 3 frames");
  return beat_alignment_from_beats(motion_beats(m, mask), audio_beats(feats, cfg), cfg.sigma);
}

}  // namespace gazekit::metrics
