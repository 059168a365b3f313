// src/gradcheck.cc

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

#include "selfcrit/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "selfcrit/ctc.h"
#include "selfcrit/error.h"
#include "selfcrit/logmath.h"
#include "selfcrit/metrics.h"
#include "selfcrit/sampler.h"

namespace selfcrit {

namespace {

constexpr double kRelFloor = 1e-3;

void fold(GradCheckReport& report, double analytic, double numeric) {
  report.max_rel_err = std::max(report.max_rel_err, rel_err(analytic, numeric));
  report.max_abs_diff =
      std::max(report.max_abs_diff, std::fabs(analytic - numeric));
  ++report.checked;
}

}  // namespace

double rel_err(double analytic, double numeric) {
  double denom = std::max(kRelFloor, std::fabs(analytic) + std::fabs(numeric));
  return std::fabs(analytic - numeric) / denom;
}

FrozenPolicy freeze_policy(const Matrix& logits, const Transcription& ref,
                           const Alphabet& alphabet,
                           const MixedLossConfig& cfg, uint64_t seed) {
  if (logits.cols != alphabet.num_classes()) {
    throw InvalidInputError("gradcheck: logit width does not match alphabet");
  }
  FrozenPolicy fp;
  fp.lambda = cfg.lambda;
  if (cfg.lambda == 0.0) return fp;
  SampleDraw draw = sample_path(logits, seed);
  fp.sample = draw.transcription;
  fp.weight = reward(draw.transcription, ref);
  if (cfg.use_scst) {
    fp.weight -= reward(greedy_decode(logits), ref);
  }
  return fp;
}

double frozen_mixed_loss(const Matrix& logits, const Transcription& ref,
                         const Alphabet& alphabet, const FrozenPolicy& fp) {
  double ref_lp = ctc_forward(logits, ref, alphabet);
  if (ref_lp == kLogZero) {
    throw InfeasibleTargetError("gradcheck: reference is infeasible");
  }
  double loss = -ref_lp;
  if (fp.lambda != 0.0 && fp.weight != 0.0) {
    loss += fp.lambda * fp.weight * -ctc_forward(logits, fp.sample, alphabet);
  }
  return loss;
}

Matrix frozen_mixed_grad_logits(const Matrix& logits, const Transcription& ref,
                                const Alphabet& alphabet,
                                const FrozenPolicy& fp) {
  LossGrad ml = ctc_grad(logits, ref, alphabet);
  if (fp.lambda == 0.0 || fp.weight == 0.0) return ml.grad;
  LossGrad sample_nll = ctc_grad(logits, fp.sample, alphabet);
  Matrix grad(logits.rows, logits.cols);
  double w = fp.lambda * fp.weight;
  for (int t = 0; t < logits.rows; ++t) {
    for (int k = 0; k < logits.cols; ++k) {
      grad.at(t, k) = ml.grad.at(t, k) + w * sample_nll.grad.at(t, k);
    }
  }
  return grad;
}

GradCheckReport fd_check_ctc(const Matrix& logits, const Transcription& ref,
                             const Alphabet& alphabet, double h) {
  LossGrad analytic = ctc_grad(logits, ref, alphabet);
  Matrix probe = logits;
  GradCheckReport report;
  for (int t = 0; t < logits.rows; ++t) {
    for (int k = 0; k < logits.cols; ++k) {
      double saved = probe.at(t, k);
      probe.at(t, k) = saved + h;
      double up = -ctc_forward(probe, ref, alphabet);
      probe.at(t, k) = saved - h;
      double down = -ctc_forward(probe, ref, alphabet);
      probe.at(t, k) = saved;
      fold(report, analytic.grad.at(t, k), (up - down) / (2.0 * h));
    }
  }
  return report;
}

GradCheckReport fd_check_frozen_logits(const Matrix& logits,
                                       const Transcription& ref,
                                       const Alphabet& alphabet,
                                       const FrozenPolicy& fp, double h) {
  Matrix analytic = frozen_mixed_grad_logits(logits, ref, alphabet, fp);
  Matrix probe = logits;
  GradCheckReport report;
  for (int t = 0; t < logits.rows; ++t) {
    for (int k = 0; k < logits.cols; ++k) {
      double saved = probe.at(t, k);
      probe.at(t, k) = saved + h;
      double up = frozen_mixed_loss(probe, ref, alphabet, fp);
      probe.at(t, k) = saved - h;
      double down = frozen_mixed_loss(probe, ref, alphabet, fp);
      probe.at(t, k) = saved;
      fold(report, analytic.at(t, k), (up - down) / (2.0 * h));
    }
  }
  return report;
}

GradCheckReport fd_check_model(Model& model, const Tensor3& input,
                               const Transcription& ref,
                               const Alphabet& alphabet, double lambda,
                               bool use_scst, uint64_t sample_seed,
                               double h) {
  ForwardCache cache;
  Matrix logits = model.forward(input, &cache, nullptr);
  FrozenPolicy fp = freeze_policy(logits, ref, alphabet,
                                  MixedLossConfig{lambda, use_scst},
                                  sample_seed);
  Matrix dlogits = frozen_mixed_grad_logits(logits, ref, alphabet, fp);
  std::vector<double> analytic = model.backward(cache, dlogits);

  GradCheckReport report;
  std::vector<double>& params = model.params();
  for (size_t i = 0; i < params.size(); ++i) {
    double saved = params[i];
    params[i] = saved + h;
    double up = frozen_mixed_loss(model.forward(input, nullptr, nullptr), ref,
                                  alphabet, fp);
    params[i] = saved - h;
    double down = frozen_mixed_loss(model.forward(input, nullptr, nullptr),
                                    ref, alphabet, fp);
    params[i] = saved;
    fold(report, analytic[i], (up - down) / (2.0 * h));
  }
  return report;
}

}  // namespace selfcrit
