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
#ifndef UNINEST_LOOP_NEST_HPP_
#define UNINEST_LOOP_NEST_HPP_

#include "uninest/kernel_config.hpp"
#include "uninest/kernels.hpp"
#include "uninest/shape.hpp"
#include "uninest/tensor.hpp"

namespace uninest {

// Per-channel affine operands (scale, shift), stored as padded blocked
// channel vectors of length padded_channels.
struct AffineVectors {
  const float* scale = nullptr;
  const float* shift = nullptr;
};

struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The single loop nest every layer executes through. Iterates output-channel
// blocks (in parallel), input-channel blocks, output rows and output-width
// tiles, and delegates the innermost reduction to a kernel.
//
// Contracts:
//  - `input` must already carry any spatial padding (p's pad fields describe
//    bookkeeping only and must be zero here); pad_spatial materializes
//    padding beforehand.
//  - `output` is preallocated to output_shape(p, input dims).
//  - FMA requires `weights` packed with out_block == C_b and
//    in_block == cfg.f_cb; MAX and UPSAMPLE forbid weights.
//  - Pointwise binary requires `second` (add) or `affine` (affine mode) and a
//    1x1x1 window with unit strides.
// Violations throw ContractError before any computation.
//
// Parallelism: up to `threads` workers, each owning a disjoint contiguous
// range of output-channel blocks; used workers = min(block count, threads).
// Outputs are bit-identical for every thread count.
void run_layer(const LayerParams& p, ReductionOp op, const OpArgs& args,
               const BlockedTensor<float>& input,
               const PackedWeights<float>* weights,
               const BlockedTensor<float>* second, const AffineVectors* affine,
               const KernelConfig& cfg, BlockedTensor<float>& output,
               int threads, bool prefer_vectorized = true);

// Single-layer convenience on plain tensors: packs the input, materializes
// padding from p's pad fields, packs `weights` (the logical
// [G][K][F_C][F_H][F_W] array, or scale/shift planes for affine), runs the
// layer and unpacks the result. Weight tiling follows default_config for the
// layer's class.
PlainTensor<float> run_layer_plain(const LayerParams& p, ReductionOp op,
                                   const OpArgs& args,
                                   const PlainTensor<float>& input,
                                   const std::vector<float>& weights,
                                   const PlainTensor<float>* second = nullptr,
                                   int threads = 1,
                                   bool prefer_vectorized = true,
                                   int channel_block = kDefaultChannelBlock);

}  // namespace uninest

#endif  // UNINEST_LOOP_NEST_HPP_
