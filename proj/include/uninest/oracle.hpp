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
#ifndef UNINEST_ORACLE_HPP_
#define UNINEST_ORACLE_HPP_

#include <cstdint>
#include <vector>

#include "uninest/quantized.hpp"
#include "uninest/shape.hpp"
#include "uninest/tensor.hpp"

namespace uninest {

// Deliberately naive direct-form implementations over plain tensors, used as
// ground truth in equivalence tests. Six nested loops, no blocking, no
// vectorization; FMA accumulates in double.
//
// `weights` is the plain [G][K][F_C][F_H][F_W] array for FMA layers, the
// concatenated (scale[C], shift[C]) planes for affine layers, and empty
// otherwise. Spatial padding is applied logically with `pad_fill`.
PlainTensor<float> oracle_layer(const LayerParams& p, ReductionOp op,
                                const OpArgs& args,
                                const PlainTensor<float>& input,
                                const std::vector<float>& weights,
                                const PlainTensor<float>* second = nullptr,
                                float pad_fill = 0.0f);

// Integer twin for the quantized path: int32 accumulation of
// (in - in_zp) * (w - w_zp), requantized with the same double-precision
// factor and round-half-away-from-zero rule as the engine. Exact, so
// engine comparisons are bitwise.
PlainTensor<uint8_t> oracle_layer_quantized(
    const LayerParams& p, ReductionOp op, const OpArgs& args,
    const PlainTensor<uint8_t>& input, const std::vector<uint8_t>& weights,
    const QuantParams& in_q, const QuantParams& w_q, const QuantParams& out_q,
    const PlainTensor<uint8_t>* second = nullptr,
    const QuantParams* second_q = nullptr, uint8_t pad_fill = 0);

}  // namespace uninest

#endif  // UNINEST_ORACLE_HPP_
