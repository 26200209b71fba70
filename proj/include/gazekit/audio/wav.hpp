#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gazekit/common.hpp"

namespace gazekit::audio {

struct AudioClip {
  std::vector<float> samples;  // mono, [-1, 1]
  int sample_rate = 16000;

  int64_t length() const { return static_cast<int64_t>(samples.size()); }
  double seconds() const { return static_cast<double>(samples.size()) / sample_rate; }
};

namespace detail {

inline uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
inline uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}
inline void put_u32(std::vector<unsigned char>& v, uint32_t x) {
  v.push_back(static_cast<unsigned char>(x & 0xff));
  v.push_back(static_cast<unsigned char>((x >> 8) & 0xff));
  v.push_back(static_cast<unsigned char>((x >> 16) & 0xff));
  v.push_back(static_cast<unsigned char>((x >> 24) & 0xff));
}
inline void put_u16(std::vector<unsigned char>& v, uint16_t x) {
  v.push_back(static_cast<unsigned char>(x & 0xff));
  v.push_back(static_cast<unsigned char>((x >> 8) & 0xff));
}

}  // namespace detail

// Reads RIFF/WAVE, PCM16 mono only. Samples scaled to [-1, 1] by 1/32768.
inline AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open wav file: ", path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  require(bytes.size() >= 44, path.string(), ": truncated wav header");
  require(std::memcmp(bytes.data(), "RIFF", 4) == 0 && std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
          path.string(), ": not a RIFF/WAVE file");

  AudioClip clip;
  bool fmt_seen = false, data_seen = false;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    uint32_t chunk_len = detail::read_u32(bytes.data() + pos + 4);
    size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      require(body + 16 <= bytes.size(), path.string(), ": truncated fmt chunk");
      uint16_t format = detail::read_u16(bytes.data() + body);
      uint16_t channels = detail::read_u16(bytes.data() + body + 2);
      uint32_t rate = detail::read_u32(bytes.data() + body + 4);
      uint16_t bits = detail::read_u16(bytes.data() + body + 14);
      require(format == 1, path.string(), ": unsupported format: compressed wav (format tag ",
              format, "), PCM required");
      require(channels == 1, path.string(), ": unsupported format: ", channels,
              " channels, mono required");
      require(bits == 16, path.string(), ": unsupported format: ", bits,
              "-bit samples, 16-bit required");
      clip.sample_rate = static_cast<int>(rate);
      fmt_seen = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      require(fmt_seen, path.string(), ": data chunk before fmt chunk");
      require(body + chunk_len <= bytes.size(), path.string(), ": truncated data chunk");
      size_t n = chunk_len / 2;
      clip.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        int16_t s = static_cast<int16_t>(detail::read_u16(bytes.data() + body + 2 * i));
        clip.samples[i] = static_cast<float>(s) / 32768.0f;
      }
      data_seen = true;
    }
    pos = body + chunk_len + (chunk_len & 1);
  }
  require(fmt_seen && data_seen, path.string(), ": missing fmt or data chunk");
  require(clip.sample_rate > 0, path.string(), ": bad sample rate");
  return clip;
}

inline void save_wav(const std::filesystem::path& path, const AudioClip& clip) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::vector<unsigned char> bytes;
  bytes.reserve(44 + clip.samples.size() * 2);
  const uint32_t data_len = static_cast<uint32_t>(clip.samples.size() * 2);
  bytes.insert(bytes.end(), {'R', 'I', 'F', 'F'});
  detail::put_u32(bytes, 36 + data_len);
  bytes.insert(bytes.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::put_u32(bytes, 16);
  detail::put_u16(bytes, 1);  // PCM
  detail::put_u16(bytes, 1);  // mono
  detail::put_u32(bytes, static_cast<uint32_t>(clip.sample_rate));
  detail::put_u32(bytes, static_cast<uint32_t>(clip.sample_rate * 2));
  detail::put_u16(bytes, 2);
  detail::put_u16(bytes, 16);
  bytes.insert(bytes.end(), {'d', 'a', 't', 'a'});
  detail::put_u32(bytes, data_len);
  for (float s : clip.samples) {
    float c = std::min(1.0f, std::max(-1.0f, s));
    int v = static_cast<int>(std::lrint(c * 32767.0f));
    detail::put_u16(bytes, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open wav for writing: ", path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(out.good(), "write failed: ", path.string());
}

}  // namespace gazekit::audio
