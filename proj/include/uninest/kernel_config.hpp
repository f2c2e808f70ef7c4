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
#ifndef UNINEST_KERNEL_CONFIG_HPP_
#define UNINEST_KERNEL_CONFIG_HPP_

#include <stdexcept>

#include "uninest/shape.hpp"
#include "uninest/vec.hpp"

namespace uninest {

// Default channel block of the shared layout: 16 scalar lanes, a multiple of
// every supported SIMD width.
inline constexpr int kDefaultChannelBlock = 16;

// Register-tiling parameters of the kernels. A kernel partially updates an
// o_wb x (g_b * k_b) output tile; g_b * k_b equals the channel block C_b of
// the blocked layout. The tile is sized so the accumulators fit the target's
// vector register file.
struct KernelConfig {
  int o_wb = 6;                 // output-width tile
  int g_b = 1;                  // group block
  int k_b = kDefaultChannelBlock;  // filter block
  int f_cb = kDefaultChannelBlock; // input-channel block
  int lane_width = kVecLanes;   // scalar lanes per vector op

  int c_b() const { return g_b * k_b; }
  int accumulator_registers() const { return o_wb * c_b() / lane_width; }
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Register budget for the accumulator tile. Operand and weight vectors need
// headroom on top of this, so it is below the architectural register count.
inline constexpr int kAccumulatorRegisterBudget = 24;

inline void validate_config(const KernelConfig& cfg, int channel_block) {
  if (cfg.o_wb < 1 || cfg.g_b < 1 || cfg.k_b < 1 || cfg.f_cb < 1) {
    throw ConfigError("kernel tile extents must be >= 1");
  }
  if (cfg.c_b() != channel_block) {
    throw ConfigError("g_b * k_b must equal the channel block");
  }
  if (channel_block % cfg.lane_width != 0) {
    throw ConfigError("channel block must be a multiple of the lane width");
  }
  if (cfg.accumulator_registers() > kAccumulatorRegisterBudget) {
    throw ConfigError("kernel tile exceeds the accumulator register budget");
  }
  if (cfg.f_cb > channel_block) {
    throw ConfigError("f_cb must not exceed the channel block");
  }
}

// Default tiling per layer class: full-channel reductions block the input
// channels at C_b; single-channel layers put the whole block on the group
// dimension and reduce one channel at a time.
inline KernelConfig default_config(LayerClass cls, const LayerParams& p,
                                   int groups, int channel_block) {
  KernelConfig cfg;
  switch (cls) {
    case LayerClass::kFullChannel:
    case LayerClass::kFull:
      cfg.g_b = 1;
      cfg.k_b = channel_block;
      cfg.f_cb = channel_block;
      break;
    case LayerClass::kSingleElement:
    case LayerClass::kSingleChannel:
      cfg.g_b = channel_block;
      cfg.k_b = 1;
      cfg.f_cb = 1;
      break;
    case LayerClass::kPartialChannel:
      if (p.k % channel_block == 0) {
        cfg.g_b = 1;
        cfg.k_b = channel_block;
      } else if (p.k <= channel_block && channel_block % p.k == 0) {
        cfg.k_b = p.k;
        cfg.g_b = channel_block / p.k;
      } else {
        cfg.g_b = channel_block;
        cfg.k_b = 1;
      }
      cfg.f_cb = 1;
      break;
  }
  (void)groups;
  return cfg;
}

}  // namespace uninest

#endif  // UNINEST_KERNEL_CONFIG_HPP_
