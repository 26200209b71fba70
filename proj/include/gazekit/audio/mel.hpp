#pragma once

#include <complex>
#include <vector>

#include "gazekit/audio/features.hpp"
#include "gazekit/audio/wav.hpp"

namespace gazekit::audio {

// Log-mel front end standing in for a heavyweight speech encoder. The STFT
// runs at sample_rate/hop rows per second; rows are then block-averaged down
// to exactly 25 rows per second, so features align 1:1 with motion frames.
struct MelConfig {
  int n_fft = 400;    // analysis window length in samples
  int hop = 160;      // hop in samples
  int n_mels = 26;
  double fmin = 50.0;
  double fmax = 7600.0;
  double log_floor = 1e-6;

  void validate(int sample_rate) const {
    require(n_fft >= 2 && hop >= 1 && n_mels >= 1, "mel: bad config");
    require(fmin >= 0 && fmin < fmax && fmax <= sample_rate / 2.0,
            "mel: need 0 <= fmin < fmax <= rate/2, got fmin=", fmin, " fmax=", fmax, " rate=",
            sample_rate);
    require(sample_rate % hop == 0, "mel: hop ", hop, " does not divide sample rate ", sample_rate);
    const int rate_hz = sample_rate / hop;
    require(rate_hz % 25 == 0, "mel: feature rate ", rate_hz,
            " Hz is not a multiple of 25; 25 Hz alignment impossible");
  }

  int block(int sample_rate) const { return sample_rate / hop / 25; }
};

namespace detail {

inline int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 complex FFT, in place. Size must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * 3.14159265358979323846 / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        std::complex<double> u = a[i + j];
        std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular filters on the HTK mel scale over FFT bins, rows normalized to
// unit area. fft_len is the (power-of-two) transform size.
inline std::vector<std::vector<double>> mel_filterbank(const MelConfig& cfg, int sample_rate,
                                                       int fft_len) {
  const int n_bins = fft_len / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  std::vector<double> centers(static_cast<size_t>(cfg.n_mels) + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    centers[static_cast<size_t>(i)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / (cfg.n_mels + 1));
  }
  std::vector<std::vector<double>> bank(static_cast<size_t>(cfg.n_mels),
                                        std::vector<double>(static_cast<size_t>(n_bins), 0.0));
  for (int k = 0; k < cfg.n_mels; ++k) {
    const double f_l = centers[static_cast<size_t>(k)];
    const double f_c = centers[static_cast<size_t>(k) + 1];
    const double f_r = centers[static_cast<size_t>(k) + 2];
    double sum = 0.0;
    for (int b = 0; b < n_bins; ++b) {
      const double f = static_cast<double>(b) * sample_rate / fft_len;
      double w = 0.0;
      if (f > f_l && f < f_c) {
        w = (f - f_l) / (f_c - f_l);
      } else if (f >= f_c && f < f_r) {
        w = (f_r - f) / (f_r - f_c);
      }
      bank[static_cast<size_t>(k)][static_cast<size_t>(b)] = w;
      sum += w;
    }
    require(sum > 0, "mel: filter ", k, " covers no FFT bins; raise n_fft or widen the band");
    for (int b = 0; b < n_bins; ++b) bank[static_cast<size_t>(k)][static_cast<size_t>(b)] /= sum;
  }
  return bank;
}

}  // namespace detail

// Center frequency (Hz) of mel bin k under a config; test hook.
inline double mel_bin_center_hz(const MelConfig& cfg, int k) {
  const double mel_lo = detail::hz_to_mel(cfg.fmin);
  const double mel_hi = detail::hz_to_mel(cfg.fmax);
  return detail::mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(k + 1) / (cfg.n_mels + 1));
}

// Hann-windowed power spectrum of one analysis frame starting at `start`
// (zero padding past the end of the signal). Exposed for the oracle tests.
inline std::vector<double> frame_power_spectrum(const std::vector<float>& samples, int64_t start,
                                                const MelConfig& cfg) {
  const int fft_len = detail::next_pow2(cfg.n_fft);
  std::vector<std::complex<double>> buf(static_cast<size_t>(fft_len), {0.0, 0.0});
  for (int i = 0; i < cfg.n_fft; ++i) {
    const int64_t idx = start + i;
    const double s =
        (idx >= 0 && idx < static_cast<int64_t>(samples.size())) ? samples[static_cast<size_t>(idx)] : 0.0;
    const double w =
        0.5 - 0.5 * std::cos(2.0 * 3.14159265358979323846 * static_cast<double>(i) / cfg.n_fft);
    buf[static_cast<size_t>(i)] = {s * w, 0.0};
  }
  detail::fft_inplace(buf);
  std::vector<double> power(static_cast<size_t>(fft_len / 2 + 1));
  for (size_t b = 0; b < power.size(); ++b) power[b] = std::norm(buf[b]);
  return power;
}

inline FeatureSequence log_mel(const AudioClip& clip, const MelConfig& cfg = MelConfig()) {
  cfg.validate(clip.sample_rate);
  require(clip.length() >= cfg.n_fft, "log_mel: clip of ", clip.length(),
          " samples is shorter than one FFT frame (", cfg.n_fft, ")");

  const int block = cfg.block(clip.sample_rate);
  const int64_t samples_per_row = static_cast<int64_t>(cfg.hop) * block;
  const int64_t out_rows = clip.length() / samples_per_row;
  require(out_rows >= 1, "log_mel: clip shorter than one output row");
  const int64_t stft_rows = out_rows * block;

  const int fft_len = detail::next_pow2(cfg.n_fft);
  const auto bank = detail::mel_filterbank(cfg, clip.sample_rate, fft_len);

  Tensor<float> hi_rate = Tensor<float>::matrix(stft_rows, cfg.n_mels);
  for (int64_t t = 0; t < stft_rows; ++t) {
    const auto power = frame_power_spectrum(clip.samples, t * cfg.hop, cfg);
    for (int k = 0; k < cfg.n_mels; ++k) {
      double acc = 0.0;
      const auto& row = bank[static_cast<size_t>(k)];
      for (size_t b = 0; b < power.size(); ++b) acc += row[b] * power[b];
      hi_rate.at(t, k) = static_cast<float>(std::log(acc + cfg.log_floor));
    }
  }

  FeatureSequence out;
  out.fps = 25.0;
  out.frames = Tensor<float>::matrix(out_rows, cfg.n_mels);
  for (int64_t r = 0; r < out_rows; ++r) {
    for (int k = 0; k < cfg.n_mels; ++k) {
      double acc = 0.0;
      for (int b = 0; b < block; ++b) acc += static_cast<double>(hi_rate.at(r * block + b, k));
      out.frames.at(r, k) = static_cast<float>(acc / block);
    }
  }
  return out;
}

}  // namespace gazekit::audio
