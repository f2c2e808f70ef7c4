/* Copyright 2026 The Uninest Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef UNINEST_WEIGHT_GEN_HPP_
#define UNINEST_WEIGHT_GEN_HPP_

#include <cstdint>
#include <vector>

namespace uninest {

// Deterministic weight generator. 64-bit LCG with Knuth's MMIX constants:
//   state' = state * 6364136223846793005 + 1442695040888963407
// Floats take the top 24 bits mapped to [-0.5, 0.5); bytes take the top 8.
// Exactly reproducible across implementations; the README documents the
// stream consumption order.
struct Lcg64 {
  uint64_t state;

  explicit Lcg64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state;
  }

  float next_float() {
    const uint32_t bits = static_cast<uint32_t>(next() >> 40); // 24 bits
    return static_cast<float>(bits) * (1.0f / 16777216.0f) - 0.5f;
  }

  uint8_t next_u8() { return static_cast<uint8_t>(next() >> 56); }
};

inline std::vector<float> generate_weights(uint64_t seed, size_t count) {
  Lcg64 g(seed);
  std::vector<float> w(count);
  for (auto& v : w) v = g.next_float();
  return w;
}

inline std::vector<uint8_t> generate_weights_u8(uint64_t seed, size_t count) {
  Lcg64 g(seed);
  std::vector<uint8_t> w(count);
  for (auto& v : w) v = g.next_u8();
  return w;
}

}  // namespace uninest

#endif  // UNINEST_WEIGHT_GEN_HPP_
