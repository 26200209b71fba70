#pragma once

#include <filesystem>

#include "gazekit/io/tensor_file.hpp"
#include "gazekit/motion/normalize.hpp"
#include "gazekit/param_store.hpp"
#include "gazekit/train/adam.hpp"

namespace gazekit::train {

// Checkpoints use the shared tensor container. Parameter tensors keep their
// store names; optimizer moments ride along as adam.m.<name> / adam.v.<name>
// so training can resume bitwise. Config, stats and seed live in the JSON
// manifest's meta block.
struct Checkpoint {
  ParameterStore<float> params;
  nlohmann::json meta = nlohmann::json::object();
  Adam<float> optimizer;
  bool has_optimizer = false;
};

inline nlohmann::json stats_to_json(const motion::NormalizationStats& stats) {
  nlohmann::json j;
  j["mean"] = stats.mean;
  j["std"] = stats.std;
  return j;
}

inline motion::NormalizationStats stats_from_json(const nlohmann::json& j) {
  motion::NormalizationStats s;
  auto mean = j.at("mean").get<std::vector<double>>();
  auto std_ = j.at("std").get<std::vector<double>>();
  require(mean.size() == motion::kMotionDims && std_.size() == motion::kMotionDims,
          "checkpoint: normalization stats must have 7 entries per vector");
  std::copy(mean.begin(), mean.end(), s.mean.begin());
  std::copy(std_.begin(), std_.end(), s.std.begin());
  return s;
}

inline void save_checkpoint(const std::filesystem::path& path, const ParameterStore<float>& params,
                            const nlohmann::json& meta, const Adam<float>* optimizer = nullptr) {
  io::TensorFile tf;
  tf.meta = meta;
  tf.meta["kind_tag"] = "gazekit-checkpoint";
  for (const auto& [name, p] : params) tf.tensors.emplace_back(name, p.value);
  if (optimizer) {
    tf.meta["adam_step"] = optimizer->step_count();
    tf.meta["adam_lr"] = optimizer->config().lr;
    tf.meta["adam_beta1"] = optimizer->config().beta1;
    tf.meta["adam_beta2"] = optimizer->config().beta2;
    tf.meta["adam_eps"] = optimizer->config().eps;
    for (const auto& [name, m] : optimizer->moments1()) tf.tensors.emplace_back("adam.m." + name, m);
    for (const auto& [name, v] : optimizer->moments2()) tf.tensors.emplace_back("adam.v." + name, v);
  }
  io::save_tensor_file(path, tf);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  io::TensorFile tf = io::load_tensor_file(path);
  Checkpoint ck;
  ck.meta = tf.meta;
  AdamConfig acfg;
  if (tf.meta.contains("adam_lr")) {
    acfg.lr = tf.meta["adam_lr"].get<double>();
    acfg.beta1 = tf.meta["adam_beta1"].get<double>();
    acfg.beta2 = tf.meta["adam_beta2"].get<double>();
    acfg.eps = tf.meta["adam_eps"].get<double>();
  }
  ck.optimizer = Adam<float>(acfg);
  for (auto& [name, t] : tf.tensors) {
    if (name.rfind("adam.m.", 0) == 0) {
      ck.optimizer.moments1()[name.substr(7)] = t;
      ck.has_optimizer = true;
    } else if (name.rfind("adam.v.", 0) == 0) {
      ck.optimizer.moments2()[name.substr(7)] = t;
      ck.has_optimizer = true;
    } else {
      auto& v = ck.params.add(name, t.shape());
      v = t;
    }
  }
  if (tf.meta.contains("adam_step")) {
    ck.optimizer.set_step_count(tf.meta["adam_step"].get<int64_t>());
  }
  return ck;
}

}  // namespace gazekit::train
