// src/ctc.cc

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

#include "selfcrit/ctc.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "selfcrit/error.h"
#include "selfcrit/logmath.h"

namespace selfcrit {

namespace {

void check_inputs(const Matrix& logits, const Transcription& target,
                  const Alphabet& alphabet, const char* op) {
  if (logits.rows < 1) {
    throw InvalidInputError(std::string(op) + ": empty logit sequence");
  }
  if (logits.cols != alphabet.num_classes()) {
    throw InvalidInputError(std::string(op) + ": logits have " +
                            std::to_string(logits.cols) +
                            " classes, alphabet has " +
                            std::to_string(alphabet.num_classes()));
  }
  if (!logits.all_finite()) {
    throw InvalidInputError(std::string(op) + ": non-finite logits");
  }
  for (int label : target.elements) {
    if (label < 0 || label >= alphabet.num_labels()) {
      throw InvalidInputError(std::string(op) + ": label index " +
                              std::to_string(label) + " outside alphabet");
    }
  }
}

// Blank-interleaved label sequence of length 2L+1: blank, y1, blank, ...,
// yL, blank, as class indices.
std::vector<int> expand_target(const Transcription& target) {
  std::vector<int> ext(2 * target.elements.size() + 1, Alphabet::kBlank);
  for (size_t i = 0; i < target.elements.size(); ++i) {
    ext[2 * i + 1] = Alphabet::label_to_class(target.elements[i]);
  }
  return ext;
}

// Forward variables alpha(t, s), emission at t included. Only states
// reachable both from the start and from the end are filled; the rest stay
// at kLogZero.
Matrix ctc_alpha(const Matrix& lp, const std::vector<int>& ext) {
  const int T = lp.rows;
  const int S = static_cast<int>(ext.size());
  Matrix alpha(T, S, kLogZero);
  alpha.at(0, 0) = lp.at(0, ext[0]);
  if (S > 1) alpha.at(0, 1) = lp.at(0, ext[1]);
  for (int t = 1; t < T; ++t) {
    const int lo = std::max(0, S - 2 * (T - t));
    const int hi = std::min(S, 2 * t + 2);
    for (int s = lo; s < hi; ++s) {
      double a = alpha.at(t - 1, s);
      if (s > 0) a = log_add(a, alpha.at(t - 1, s - 1));
      if (s > 1 && ext[s] != Alphabet::kBlank && ext[s] != ext[s - 2]) {
        a = log_add(a, alpha.at(t - 1, s - 2));
      }
      alpha.at(t, s) = a + lp.at(t, ext[s]);
    }
  }
  return alpha;
}

// Backward variables beta(t, s): probability of completing the expanded
// sequence using frames t+1..T-1, so alpha(t,s) + beta(t,s) scores whole
// paths through state s at time t without double-counting frame t.
Matrix ctc_beta(const Matrix& lp, const std::vector<int>& ext) {
  const int T = lp.rows;
  const int S = static_cast<int>(ext.size());
  Matrix beta(T, S, kLogZero);
  beta.at(T - 1, S - 1) = 0.0;
  if (S > 1) beta.at(T - 1, S - 2) = 0.0;
  for (int t = T - 2; t >= 0; --t) {
    const int lo = std::max(0, S - 2 * (T - t));
    const int hi = std::min(S, 2 * t + 2);
    for (int s = lo; s < hi; ++s) {
      double b = beta.at(t + 1, s) + lp.at(t + 1, ext[s]);
      if (s + 1 < S) {
        b = log_add(b, beta.at(t + 1, s + 1) + lp.at(t + 1, ext[s + 1]));
      }
      if (s + 2 < S && ext[s + 2] != Alphabet::kBlank &&
          ext[s + 2] != ext[s]) {
        b = log_add(b, beta.at(t + 1, s + 2) + lp.at(t + 1, ext[s + 2]));
      }
      beta.at(t, s) = b;
    }
  }
  return beta;
}

}  // namespace

Matrix log_softmax(const Matrix& logits) {
  if (!logits.all_finite()) {
    throw InvalidInputError("log_softmax: non-finite input");
  }
  Matrix out(logits.rows, logits.cols);
  for (int r = 0; r < logits.rows; ++r) {
    double hi = kLogZero;
    for (int c = 0; c < logits.cols; ++c) hi = std::max(hi, logits.at(r, c));
    double acc = 0.0;
    for (int c = 0; c < logits.cols; ++c) {
      acc += std::exp(logits.at(r, c) - hi);
    }
    const double lse = hi + std::log(acc);
    for (int c = 0; c < logits.cols; ++c) {
      out.at(r, c) = logits.at(r, c) - lse;
    }
  }
  return out;
}

bool ctc_feasible(int frames, const Transcription& target) {
  int adjacent_repeats = 0;
  for (size_t i = 1; i < target.elements.size(); ++i) {
    if (target.elements[i] == target.elements[i - 1]) ++adjacent_repeats;
  }
  return frames >= target.length() + adjacent_repeats;
}

double ctc_forward(const Matrix& logits, const Transcription& target,
                   const Alphabet& alphabet) {
  check_inputs(logits, target, alphabet, "ctc_forward");
  if (!ctc_feasible(logits.rows, target)) return kLogZero;

  const Matrix lp = log_softmax(logits);
  const std::vector<int> ext = expand_target(target);
  const Matrix alpha = ctc_alpha(lp, ext);
  const int T = lp.rows;
  const int S = static_cast<int>(ext.size());
  double total = alpha.at(T - 1, S - 1);
  if (S > 1) total = log_add(total, alpha.at(T - 1, S - 2));
  return total;
}

LossGrad ctc_grad(const Matrix& logits, const Transcription& target,
                  const Alphabet& alphabet) {
  check_inputs(logits, target, alphabet, "ctc_grad");
  if (!ctc_feasible(logits.rows, target)) {
    throw InfeasibleTargetError(
        "ctc_grad: target of length " + std::to_string(target.length()) +
        " is infeasible for " + std::to_string(logits.rows) + " frames");
  }

  const Matrix lp = log_softmax(logits);
  const std::vector<int> ext = expand_target(target);
  const Matrix alpha = ctc_alpha(lp, ext);
  const Matrix beta = ctc_beta(lp, ext);
  const int T = lp.rows;
  const int S = static_cast<int>(ext.size());
  const int K = lp.cols;

  double log_lik = alpha.at(T - 1, S - 1);
  if (S > 1) log_lik = log_add(log_lik, alpha.at(T - 1, S - 2));

  // occ(t, k) = log total probability of paths whose frame t emits class k.
  Matrix occ(T, K, kLogZero);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      const double ab = alpha.at(t, s) + beta.at(t, s);
      if (ab == kLogZero) continue;
      double& cell = occ.at(t, ext[s]);
      cell = log_add(cell, ab);
    }
  }

  LossGrad result;
  result.loss = -log_lik;
  result.grad = Matrix(T, K);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) {
      const double posterior =
          occ.at(t, k) == kLogZero ? 0.0 : std::exp(occ.at(t, k) - log_lik);
      result.grad.at(t, k) = std::exp(lp.at(t, k)) - posterior;
    }
  }
  return result;
}

double ctc_brute_force(const Matrix& logits, const Transcription& target,
                       const Alphabet& alphabet) {
  check_inputs(logits, target, alphabet, "ctc_brute_force");
  const int T = logits.rows;
  const int K = logits.cols;
  if (T > 8 || K > 4) {
    throw BudgetExceededError("ctc_brute_force: " + std::to_string(K) + "^" +
                              std::to_string(T) +
                              " paths exceeds the enumeration budget");
  }

  const Matrix lp = log_softmax(logits);
  double total = kLogZero;
  std::vector<int> path(T, 0);
  for (;;) {
    if (collapse_classes(path) == target) {
      double lp_path = 0.0;
      for (int t = 0; t < T; ++t) lp_path += lp.at(t, path[t]);
      total = log_add(total, lp_path);
    }
    int pos = T - 1;
    while (pos >= 0 && path[pos] == K - 1) {
      path[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++path[pos];
  }
  return total;
}

}  // namespace selfcrit
