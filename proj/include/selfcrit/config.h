// include/selfcrit/config.h

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

#ifndef SELFCRIT_CONFIG_H_
#define SELFCRIT_CONFIG_H_

#include <filesystem>

#include "json.hpp"
#include "selfcrit/model.h"
#include "selfcrit/trainer.h"

namespace selfcrit {

// Nested JSON forms, used inside checkpoints. Conv blocks serialize as
// [channels, kernel_f, kernel_t, stride_f, stride_t] with an optional
// sixth 0/1 element for the residual flag (default on).
nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

// The run config file is one flat object: TrainConfig field names as-is,
// ModelConfig fields under a model_ prefix. Missing keys take defaults;
// unknown keys are rejected.
struct RunConfig {
  TrainConfig train;
  ModelConfig model;
};

RunConfig run_config_from_json(const nlohmann::json& flat);
nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace selfcrit

#endif  // SELFCRIT_CONFIG_H_
