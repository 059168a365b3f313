// include/selfcrit/rng.h

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

#ifndef SELFCRIT_RNG_H_
#define SELFCRIT_RNG_H_

#include <cstdint>
#include <string>

namespace selfcrit {

// All randomness in the library flows through this generator:
// xoshiro256** seeded via splitmix64, normals via Box-Muller. The algorithm
// is fixed (not std::mt19937 or any libstdc++ distribution) so that runs
// replay bit-identically on any platform; the id below is recorded in
// checkpoints next to the seed.
inline constexpr const char* kRngAlgorithmId = "xoshiro256ss-boxmuller-1";

uint64_t splitmix64_next(uint64_t& state);

// Derives independent stream seeds from a base seed and a tag chain. The
// derivation is stateless: the same (base, tags...) always yields the same
// stream, which is what makes checkpoint resume reproduce a run exactly.
uint64_t derive_seed(uint64_t base, uint64_t t1);
uint64_t derive_seed(uint64_t base, uint64_t t1, uint64_t t2);
uint64_t derive_seed(uint64_t base, uint64_t t1, uint64_t t2, uint64_t t3);

class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  double uniform01();                    // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();                       // N(0, 1); consumes two uniforms
  int uniform_int(int n);                // [0, n), unbiased

  // Child stream derived from this stream's seed, not its current state, so
  // splitting is order-independent.
  Rng split(uint64_t tag) const { return Rng(derive_seed(seed_, tag)); }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  uint64_t s_[4];
};

// Fixed stream tags. Never renumber: checkpointed runs replay through them.
namespace rngtag {
inline constexpr uint64_t kInit = 1;      // parameter initialization
inline constexpr uint64_t kShuffle = 2;   // per-epoch data order
inline constexpr uint64_t kSample = 3;    // per-utterance policy sampling
inline constexpr uint64_t kDropout = 4;   // per-utterance dropout masks
inline constexpr uint64_t kTemplate = 5;  // synth symbol templates
inline constexpr uint64_t kRecord = 6;    // synth per-record stream
}  // namespace rngtag

}  // namespace selfcrit

#endif  // SELFCRIT_RNG_H_
