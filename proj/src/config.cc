// src/config.cc

// Copyright 2026  The selfcrit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "selfcrit/config.h"

#include <fstream>
#include <set>
#include <string>

#include "selfcrit/error.h"

namespace selfcrit {

namespace {

using nlohmann::json;

// Pulls j[key] into out when present, with type checking; leaves the
// default otherwise.
template <typename T>
void take(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw InvalidInputError(std::string("config: bad value for '") + key +
                            "'");
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const char* what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      throw InvalidInputError(std::string("config: unknown ") + what +
                              " key '" + it.key() + "'");
    }
  }
}

json conv_to_json(const ConvBlockConfig& b) {
  json arr = json::array(
      {b.channels, b.kernel_f, b.kernel_t, b.stride_f, b.stride_t});
  if (!b.residual) arr.push_back(0);
  return arr;
}

ConvBlockConfig conv_from_json(const json& arr) {
  if (!arr.is_array() || arr.size() < 5 || arr.size() > 6) {
    throw InvalidInputError(
        "config: conv block must be [channels, kernel_f, kernel_t, "
        "stride_f, stride_t] with an optional residual flag");
  }
  ConvBlockConfig b;
  try {
    b.channels = arr[0].get<int>();
    b.kernel_f = arr[1].get<int>();
    b.kernel_t = arr[2].get<int>();
    b.stride_f = arr[3].get<int>();
    b.stride_t = arr[4].get<int>();
    if (arr.size() == 6) b.residual = arr[5].get<int>() != 0;
  } catch (const json::exception&) {
    throw InvalidInputError("config: conv block entries must be integers");
  }
  return b;
}

const std::set<std::string> kModelKeys = {
    "input_freq",   "input_channels",    "conv",      "hidden",
    "num_classes",  "dropout_conv",      "dropout_recurrent",
    "batch_norm"};

const std::set<std::string> kTrainKeys = {
    "batch_size",      "learning_rate",    "momentum",
    "clip_norm",       "weight_decay",     "lambda_initial",
    "lambda_final",    "plateau_patience", "epsilon_improve",
    "seed",            "max_epochs",       "use_scst"};

}  // namespace

json model_config_to_json(const ModelConfig& cfg) {
  json conv = json::array();
  for (const ConvBlockConfig& b : cfg.conv) conv.push_back(conv_to_json(b));
  return json{{"input_freq", cfg.input_freq},
              {"input_channels", cfg.input_channels},
              {"conv", conv},
              {"hidden", cfg.hidden},
              {"num_classes", cfg.num_classes},
              {"dropout_conv", cfg.dropout_conv},
              {"dropout_recurrent", cfg.dropout_recurrent},
              {"batch_norm", cfg.batch_norm}};
}

ModelConfig model_config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInputError("config: model must be object");
  reject_unknown(j, kModelKeys, "model");
  ModelConfig cfg;
  take(j, "input_freq", cfg.input_freq);
  take(j, "input_channels", cfg.input_channels);
  take(j, "hidden", cfg.hidden);
  take(j, "num_classes", cfg.num_classes);
  take(j, "dropout_conv", cfg.dropout_conv);
  take(j, "dropout_recurrent", cfg.dropout_recurrent);
  take(j, "batch_norm", cfg.batch_norm);
  if (auto it = j.find("conv"); it != j.end()) {
    if (!it->is_array()) {
      throw InvalidInputError("config: conv must be an array of blocks");
    }
    cfg.conv.clear();
    for (const json& b : *it) cfg.conv.push_back(conv_from_json(b));
  }
  return cfg;
}

json train_config_to_json(const TrainConfig& cfg) {
  return json{{"batch_size", cfg.batch_size},
              {"learning_rate", cfg.learning_rate},
              {"momentum", cfg.momentum},
              {"clip_norm", cfg.clip_norm},
              {"weight_decay", cfg.weight_decay},
              {"lambda_initial", cfg.lambda_initial},
              {"lambda_final", cfg.lambda_final},
              {"plateau_patience", cfg.plateau_patience},
              {"epsilon_improve", cfg.epsilon_improve},
              {"seed", cfg.seed},
              {"max_epochs", cfg.max_epochs},
              {"use_scst", cfg.use_scst}};
}

TrainConfig train_config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInputError("config: train must be object");
  reject_unknown(j, kTrainKeys, "train");
  TrainConfig cfg;
  take(j, "batch_size", cfg.batch_size);
  take(j, "learning_rate", cfg.learning_rate);
  take(j, "momentum", cfg.momentum);
  take(j, "clip_norm", cfg.clip_norm);
  take(j, "weight_decay", cfg.weight_decay);
  take(j, "lambda_initial", cfg.lambda_initial);
  take(j, "lambda_final", cfg.lambda_final);
  take(j, "plateau_patience", cfg.plateau_patience);
  take(j, "epsilon_improve", cfg.epsilon_improve);
  take(j, "seed", cfg.seed);
  take(j, "max_epochs", cfg.max_epochs);
  take(j, "use_scst", cfg.use_scst);
  return cfg;
}

RunConfig run_config_from_json(const json& flat) {
  if (!flat.is_object()) {
    throw InvalidInputError("config: run config must be a JSON object");
  }
  json train_part = json::object();
  json model_part = json::object();
  for (auto it = flat.begin(); it != flat.end(); ++it) {
    const std::string& key = it.key();
    if (key.rfind("model_", 0) == 0) {
      model_part[key.substr(6)] = it.value();
    } else {
      train_part[key] = it.value();
    }
  }
  RunConfig cfg;
  cfg.train = train_config_from_json(train_part);
  cfg.model = model_config_from_json(model_part);
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  json flat = train_config_to_json(cfg.train);
  json model = model_config_to_json(cfg.model);
  for (auto it = model.begin(); it != model.end(); ++it) {
    flat["model_" + it.key()] = it.value();
  }
  return flat;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw InvalidInputError("config: cannot read " + path.string());
  }
  json flat;
  try {
    is >> flat;
  } catch (const json::exception& e) {
    throw InvalidInputError("config: parse error in " + path.string() + ": " +
                            e.what());
  }
  return run_config_from_json(flat);
}

}  // namespace selfcrit
