// include/selfcrit/logmath.h

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

#ifndef SELFCRIT_LOGMATH_H_
#define SELFCRIT_LOGMATH_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace selfcrit {

// -inf is the log of an exactly-zero probability. It is a legal value, not an
// error, and must pass through log_add as the identity.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without leaving log space.
inline double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = kLogZero;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kLogZero) return kLogZero;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

}  // namespace selfcrit

#endif  // SELFCRIT_LOGMATH_H_
