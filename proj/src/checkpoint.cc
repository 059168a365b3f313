// src/checkpoint.cc

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

#include "selfcrit/checkpoint.h"

#include <bit>
#include <fstream>

#include "json.hpp"
#include "selfcrit/binio.h"
#include "selfcrit/config.h"
#include "selfcrit/error.h"
#include "selfcrit/rng.h"

namespace selfcrit {

namespace {

using nlohmann::json;

const char kMagic[8] = {'S', 'C', 'C', 'K', 'P', 'T', '0', '1'};
constexpr uint64_t kMaxHeaderBytes = uint64_t{1} << 20;

json slices_to_json(const Model& model) {
  json arr = json::array();
  for (const ParamSlice& s : model.slices()) {
    arr.push_back(json{{"name", s.name}, {"shape", s.shape}});
  }
  return arr;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint& ckpt) {
  Model probe(ckpt.model);
  if (static_cast<int64_t>(ckpt.params.size()) != probe.num_params() ||
      ckpt.state.momentum.size() != ckpt.params.size()) {
    throw InvalidInputError(
        "checkpoint: parameter or momentum size does not match the config");
  }
  // best_val can be +inf before the first validation pass; JSON cannot
  // carry that, so the state doubles travel as raw bit patterns.
  json header{
      {"rng_algorithm", ckpt.rng_algorithm},
      {"model", model_config_to_json(ckpt.model)},
      {"train", train_config_to_json(ckpt.train)},
      {"state",
       {{"lr_bits", std::bit_cast<uint64_t>(ckpt.state.lr)},
        {"lambda_bits", std::bit_cast<uint64_t>(ckpt.state.lambda)},
        {"lambda_switched", ckpt.state.lambda_switched},
        {"epoch", ckpt.state.epoch},
        {"step", ckpt.state.step},
        {"best_val_bits", std::bit_cast<uint64_t>(ckpt.state.best_val)},
        {"plateau_counter", ckpt.state.plateau_counter},
        {"skipped_steps", ckpt.state.skipped_steps}}},
      {"param_count", ckpt.params.size()},
      {"slices", slices_to_json(probe)}};
  std::string bytes = header.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw InvalidInputError("checkpoint: cannot write " + path.string());
  }
  os.write(kMagic, sizeof(kMagic));
  write_u64(os, bytes.size());
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  for (double v : ckpt.params) write_f64(os, v);
  for (double v : ckpt.state.momentum) write_f64(os, v);
  if (!os) {
    throw InvalidInputError("checkpoint: write failed " + path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw InvalidInputError("checkpoint: cannot read " + path.string());
  }
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || !std::equal(magic, magic + 8, kMagic)) {
    throw InvalidInputError("checkpoint: bad magic in " + path.string());
  }
  uint64_t header_len = read_u64(is);
  if (header_len == 0 || header_len > kMaxHeaderBytes) {
    throw InvalidInputError("checkpoint: implausible header length");
  }
  std::string bytes(header_len, '\0');
  is.read(bytes.data(), static_cast<std::streamsize>(header_len));
  if (!is) throw InvalidInputError("checkpoint: truncated header");

  json header;
  try {
    header = json::parse(bytes);
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("checkpoint: bad header JSON: ") +
                            e.what());
  }

  Checkpoint ckpt;
  try {
    ckpt.rng_algorithm = header.at("rng_algorithm").get<std::string>();
    ckpt.model = model_config_from_json(header.at("model"));
    ckpt.train = train_config_from_json(header.at("train"));
    const json& st = header.at("state");
    ckpt.state.lr = std::bit_cast<double>(st.at("lr_bits").get<uint64_t>());
    ckpt.state.lambda =
        std::bit_cast<double>(st.at("lambda_bits").get<uint64_t>());
    ckpt.state.lambda_switched = st.at("lambda_switched").get<bool>();
    ckpt.state.epoch = st.at("epoch").get<int>();
    ckpt.state.step = st.at("step").get<int64_t>();
    ckpt.state.best_val =
        std::bit_cast<double>(st.at("best_val_bits").get<uint64_t>());
    ckpt.state.plateau_counter = st.at("plateau_counter").get<int>();
    ckpt.state.skipped_steps = st.at("skipped_steps").get<int>();
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("checkpoint: missing header field: ") +
                            e.what());
  }

  if (ckpt.rng_algorithm != kRngAlgorithmId) {
    throw InvalidInputError("checkpoint: RNG algorithm '" +
                            ckpt.rng_algorithm + "' does not match '" +
                            kRngAlgorithmId + "'");
  }

  Model probe(ckpt.model);
  uint64_t count = header.at("param_count").get<uint64_t>();
  if (count != static_cast<uint64_t>(probe.num_params())) {
    throw InvalidInputError("checkpoint: parameter count mismatch");
  }
  const json& slices = header.at("slices");
  if (slices.size() != probe.slices().size()) {
    throw InvalidInputError("checkpoint: slice list mismatch");
  }
  for (size_t i = 0; i < probe.slices().size(); ++i) {
    const ParamSlice& want = probe.slices()[i];
    if (slices[i].at("name").get<std::string>() != want.name ||
        slices[i].at("shape").get<std::vector<int>>() != want.shape) {
      throw InvalidInputError("checkpoint: shape mismatch for slice '" +
                              want.name + "'");
    }
  }

  ckpt.params.resize(count);
  for (double& v : ckpt.params) v = read_f64(is);
  ckpt.state.momentum.resize(count);
  for (double& v : ckpt.state.momentum) v = read_f64(is);
  is.peek();
  if (!is.eof()) {
    throw InvalidInputError("checkpoint: trailing bytes in " + path.string());
  }
  return ckpt;
}

}  // namespace selfcrit
