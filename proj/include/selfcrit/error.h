// include/selfcrit/error.h

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

#ifndef SELFCRIT_ERROR_H_
#define SELFCRIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace selfcrit {

// Bad caller input: shape mismatches, out-of-range indices, non-finite values.
class InvalidInputError : public std::runtime_error {
 public:
  explicit InvalidInputError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// An exhaustive-enumeration operation was asked to enumerate more than its
// documented budget allows.
class BudgetExceededError : public std::runtime_error {
 public:
  explicit BudgetExceededError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// The target cannot be produced by any length-T alignment, so its likelihood
// is exactly zero and its gradient is undefined.
class InfeasibleTargetError : public std::runtime_error {
 public:
  explicit InfeasibleTargetError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Operation called against state it does not match (e.g. a backward pass with
// a cache from a different forward call).
class InvalidStateError : public std::runtime_error {
 public:
  explicit InvalidStateError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// An optimizer step had to be abandoned (non-finite gradients). The trainer
// counts and logs these; it is not fatal to the run.
class StepAbortError : public std::runtime_error {
 public:
  explicit StepAbortError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace selfcrit

#endif  // SELFCRIT_ERROR_H_
