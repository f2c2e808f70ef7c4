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
#ifndef UNINEST_QUANTIZED_HPP_
#define UNINEST_QUANTIZED_HPP_

#include <cmath>
#include <cstdint>

#include "uninest/kernel_config.hpp"
#include "uninest/shape.hpp"
#include "uninest/tensor.hpp"

namespace uninest {

// Per-tensor quantization: real = scale * (q - zero_point), q in uint8.
struct QuantParams {
  double scale = 1.0;
  int zero_point = 0;
};

inline uint8_t saturate_u8(long v) {
  return static_cast<uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
}

// Round half away from zero, the requantization rounding rule.
inline long round_half_away(double x) {
  return static_cast<long>(x >= 0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
}

inline uint8_t quantize_value(float x, const QuantParams& q) {
  return saturate_u8(round_half_away(x / q.scale) + q.zero_point);
}

inline float dequantize_value(uint8_t v, const QuantParams& q) {
  return static_cast<float>(q.scale * (static_cast<int>(v) - q.zero_point));
}

PlainTensor<uint8_t> quantize(const PlainTensor<float>& t, const QuantParams& q);
PlainTensor<float> dequantize(const PlainTensor<uint8_t>& t, const QuantParams& q);

// Requantizes an int32 accumulator of (in - in_zp) * (w - w_zp) products.
inline uint8_t requantize_acc(int32_t acc, double factor, int out_zp) {
  return saturate_u8(round_half_away(acc * factor) + out_zp);
}

// Bind-time overflow guard: every window accumulation of F_H*F_W*F_C terms,
// each at most 255 * 255, must fit a signed 32-bit accumulator.
bool quantized_window_fits_int32(const LayerParams& p);

// Operands for one quantized layer. Tensors are uint8 in the same blocked
// layout as the float path; accumulation is int32 with requantization to
// uint8 in the STORE phase.
struct QuantLayerOperands {
  const PackedWeights<uint8_t>* weights = nullptr;
  const BlockedTensor<uint8_t>* second = nullptr;
  QuantParams in_q;
  QuantParams w_q;
  QuantParams out_q;
  QuantParams second_q;
  // Affine layers: per-channel quantized scale/shift planes, padded blocked.
  const uint8_t* affine_scale = nullptr;
  const uint8_t* affine_shift = nullptr;
};

// Mirror of run_layer for the quantized path. Same loop nest, same layout,
// same parallel contract; pure integer/deterministic arithmetic so outputs
// are bit-identical across runs and thread counts. Throws ContractError when
// the overflow precondition fails.
void run_layer_quantized(const LayerParams& p, ReductionOp op,
                         const OpArgs& args,
                         const BlockedTensor<uint8_t>& input,
                         const QuantLayerOperands& operands,
                         const KernelConfig& cfg,
                         BlockedTensor<uint8_t>& output, int threads);

}  // namespace uninest

#endif  // UNINEST_QUANTIZED_HPP_
