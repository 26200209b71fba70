#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazekit/tensor.hpp"

namespace gazekit::io {

// Tensor container: a little-endian u64 manifest length, a JSON manifest
// listing (name, dtype, shape, byte offset) per tensor plus free-form meta,
// then the raw little-endian f32 payload. Format version "1".

inline constexpr const char* kTensorFormatVersion = "1";

struct TensorFile {
  std::vector<std::pair<std::string, Tensor<float>>> tensors;
  nlohmann::json meta = nlohmann::json::object();

  const Tensor<float>* find(const std::string& name) const {
    for (const auto& [n, t] : tensors) {
      if (n == name) return &t;
    }
    return nullptr;
  }
  const Tensor<float>& get(const std::string& name) const {
    const Tensor<float>* t = find(name);
    require(t != nullptr, "tensor file: missing tensor '", name, "'");
    return *t;
  }
};

namespace detail {

inline void put_u64_le(std::ostream& out, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline uint64_t get_u64_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  require(in.gcount() == 8, "tensor file: truncated length prefix");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

inline void put_f32_le(std::vector<unsigned char>& out, float f) {
  uint32_t v;
  std::memcpy(&v, &f, 4);
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

inline float get_f32_le(const unsigned char* p) {
  uint32_t v = static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
               (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
  float f;
  std::memcpy(&f, &v, 4);
  return f;
}

}  // namespace detail

inline void save_tensor_file(const std::filesystem::path& path, const TensorFile& tf) {
  nlohmann::json manifest;
  manifest["format_version"] = kTensorFormatVersion;
  manifest["meta"] = tf.meta;
  nlohmann::json list = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, t] : tf.tensors) {
    nlohmann::json e;
    e["name"] = name;
    e["dtype"] = "f32";
    e["shape"] = t.shape();
    e["offset"] = offset;
    list.push_back(e);
    offset += static_cast<uint64_t>(t.size()) * 4;
  }
  manifest["tensors"] = list;

  std::string mstr = manifest.dump();
  std::vector<unsigned char> payload;
  payload.reserve(offset);
  for (const auto& [name, t] : tf.tensors) {
    for (int64_t i = 0; i < t.size(); ++i) detail::put_f32_le(payload, t[i]);
  }

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open tensor file for writing: ", path.string());
  detail::put_u64_le(out, mstr.size());
  out.write(mstr.data(), static_cast<std::streamsize>(mstr.size()));
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  require(out.good(), "write failed: ", path.string());
}

inline TensorFile load_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open tensor file: ", path.string());
  uint64_t mlen = detail::get_u64_le(in);
  std::string mstr(mlen, '\0');
  in.read(mstr.data(), static_cast<std::streamsize>(mlen));
  require(static_cast<uint64_t>(in.gcount()) == mlen, path.string(), ": truncated manifest");

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(mstr);
  } catch (const std::exception& e) {
    raise(path.string(), ": bad manifest JSON: ", e.what());
  }
  require(manifest.contains("format_version"), path.string(), ": manifest missing format_version");
  std::string version = manifest["format_version"].get<std::string>();
  require(version == kTensorFormatVersion, path.string(), ": unsupported version '", version,
          "' (this build reads version ", kTensorFormatVersion, ")");

  std::vector<unsigned char> payload((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());

  TensorFile tf;
  if (manifest.contains("meta")) tf.meta = manifest["meta"];
  require(manifest.contains("tensors"), path.string(), ": manifest missing tensor list");
  for (const auto& e : manifest["tensors"]) {
    std::string name = e.at("name").get<std::string>();
    std::string dtype = e.at("dtype").get<std::string>();
    require(dtype == "f32", path.string(), ": tensor '", name, "': unsupported dtype '", dtype, "'");
    std::vector<int64_t> shape = e.at("shape").get<std::vector<int64_t>>();
    require(!shape.empty() && shape.size() <= 3, path.string(), ": tensor '", name,
            "': rank ", shape.size(), " outside supported range 1..3");
    uint64_t offset = e.at("offset").get<uint64_t>();
    uint64_t count = 1;
    for (int64_t d : shape) {
      require(d >= 0, path.string(), ": tensor '", name, "': negative dimension");
      count *= static_cast<uint64_t>(d);
    }
    require(offset + count * 4 <= payload.size(), path.string(), ": tensor '", name,
            "': manifest shape/offset exceeds payload (truncated payload or wrong shape)");
    Tensor<float> t(shape);
    for (uint64_t i = 0; i < count; ++i) {
      t[static_cast<int64_t>(i)] = detail::get_f32_le(payload.data() + offset + 4 * i);
    }
    tf.tensors.emplace_back(std::move(name), std::move(t));
  }
  return tf;
}

}  // namespace gazekit::io
