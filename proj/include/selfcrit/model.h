// include/selfcrit/model.h

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

#ifndef SELFCRIT_MODEL_H_
#define SELFCRIT_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfcrit/rng.h"
#include "selfcrit/tensor.h"

namespace selfcrit {

// One depthwise separable convolution with an optional residual around it.
// The channelwise stage applies the strides; the pointwise stage is always
// stride 1. Weights are W x H x D (freq kernel, time kernel, channel) and
// D x N. No biases; both stages are pure linear maps.
struct SepConvLayer {
  Tensor3 channelwise;
  Matrix pointwise;
  int stride_f = 1;
  int stride_t = 1;
  bool has_residual = false;
  // Required exactly when the residual cannot be the identity (channel
  // count or stride changes); it reads the input at the strided anchors.
  std::optional<Matrix> projection;
};

// Same-padding separable convolution in the true-convolution (flipped
// kernel) orientation, plus the residual branch. Linear; the model applies
// its nonlinearity on top. Output is ceil(F/stride_f) x ceil(T/stride_t) x N.
Tensor3 sepconv_forward(const Tensor3& input, const SepConvLayer& layer);

struct ConvBlockConfig {
  int channels = 8;   // N
  int kernel_f = 3;   // W
  int kernel_t = 3;   // H
  int stride_f = 1;
  int stride_t = 1;
  bool residual = true;
};

struct ModelConfig {
  int input_freq = 8;
  int input_channels = 1;
  std::vector<ConvBlockConfig> conv;
  int hidden = 32;       // recurrent units
  int num_classes = 0;   // blank included; set from the alphabet
  double dropout_conv = 0.0;       // drop rate on each conv block input
  double dropout_recurrent = 0.0;  // drop rate on the recurrent input
  bool batch_norm = false;         // declared for config parity; must stay off
};

// Named view into the flat parameter vector.
struct ParamSlice {
  std::string name;
  std::vector<int> shape;
  int64_t offset = 0;
  int64_t size = 0;
};

// Activations saved by forward for the matching backward call. Treat as
// opaque outside the model.
struct ForwardCache {
  bool valid = false;
  struct ConvBlockCache {
    Tensor3 input;  // post-dropout block input
    std::vector<double> dropout_mask;  // 0/1 per input element; empty if off
    Tensor3 chanwise;
    Tensor3 activated;
  };
  std::vector<ConvBlockCache> blocks;
  Tensor3 conv_out;  // last activated map, or the input when no conv blocks
  std::vector<double> recurrent_mask;  // same convention as dropout_mask
  Matrix gru_input;  // T' x C, post-dropout
  Matrix z, r, hc, h;  // T' x hidden
  Matrix logits;
};

// Sep-conv stack, frequency mean-pool, single unidirectional GRU, linear
// head. All parameters live in one flat vector addressed through named
// slices, so the optimizer, clipping, checkpointing and finite differences
// all see plain arrays.
class Model {
 public:
  explicit Model(ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<ParamSlice>& slices() const { return slices_; }
  const ParamSlice& slice(const std::string& name) const;
  int64_t num_params() const { return static_cast<int64_t>(params_.size()); }

  // He-style uniform fan-in bounds for conv and linear weights,
  // uniform(-1/32, 1/32) for the recurrent layer, zero biases.
  void init_params(uint64_t seed);

  // Time frames the logits will have for an input of `input_frames`.
  int output_frames(int input_frames) const;

  // Runs the network. `cache` may be null for pure inference. When a
  // dropout rate is set, a non-null `dropout_rng` samples keep masks
  // (training); a null one scales by the keep probability (inference).
  Matrix forward(const Tensor3& input, ForwardCache* cache,
                 Rng* dropout_rng = nullptr) const;

  // Exact gradients for every parameter, as a vector parallel to params().
  // The cache must come from a forward call with this model's current
  // shapes; dlogits is dLoss/dlogits for the cached logits.
  std::vector<double> backward(const ForwardCache& cache,
                               const Matrix& dlogits) const;

 private:
  ModelConfig cfg_;
  std::vector<ParamSlice> slices_;
  std::vector<double> init_bounds_;  // per slice; 0 means zero-init
  std::vector<double> params_;

  const ParamSlice* find_slice(const std::string& name) const;
  const double* slice_ptr(const std::string& name) const;
  SepConvLayer layer_view(int block) const;
};

}  // namespace selfcrit

#endif  // SELFCRIT_MODEL_H_
