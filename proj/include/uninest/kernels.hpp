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
#ifndef UNINEST_KERNELS_HPP_
#define UNINEST_KERNELS_HPP_

#include "uninest/instrument.hpp"
#include "uninest/shape.hpp"

namespace uninest {

// Every kernel runs three phases over a width x C_b output tile:
//   LOAD    - set up the accumulator tile (zero/seed on the first
//             input-channel block, previous partials otherwise)
//   COMPUTE - reduce F_H x F_W x F_Cb input elements per output
//   STORE   - write the partial update back to the output tile
// Kernels touch nothing outside their declared tile, input region and weight
// tile, and may run concurrently on disjoint tiles.

// Optional phase recorder for tests. Production callers pass nullptr.
struct PhaseProbe {
  int loads = 0;
  int computes = 0;
  int stores = 0;
};

// FMA kernel for layers whose output block shares one reduction window
// (G == 1 convolutions, fully connected, aligned group convolutions). The
// input scalar is broadcast across lanes and scaled by a per-lane weight
// vector.
//
//   out tile  : out[ll * c_b + lane],            ll < width
//   input     : in[x * in_row_stride + (ll * s_w + y) * c_b + in_lane0 + ii]
//   weights   : w[((x * f_w + y) * w_in_block + ii) * c_b + lane]
struct FmaBroadcastArgs {
  float* out = nullptr;
  const float* in = nullptr;
  const float* w = nullptr;
  int width = 0;
  int c_b = 0;
  int f_h = 1, f_w = 1;
  int live_f = 1;        // live input-channel lanes in this block (ii extent)
  int in_lane0 = 0;      // channel offset inside the input block
  int in_row_stride = 0; // padded input width * c_b
  int s_w = 1;
  int w_in_block = 1;    // F_Cb the weights were packed with
  bool first = false;    // zero accumulators instead of loading partials
  int live_out = 0;      // live output lanes (masked store when < c_b)
};

// Lane-mapped kernels for layers where output lane l reads input lane l of
// the same channel block (F_C = 1, S_C = 1, K = 1): depthwise convolution,
// pooling, ReLU.
//
//   input     : in[x * in_row_stride + (ll * s_w + y) * c_b + lane]
//   weights   : w[(x * f_w + y) * c_b + lane]        (FMA only)
struct LanewiseArgs {
  float* out = nullptr;
  const float* in = nullptr;
  const float* w = nullptr;
  int width = 0;
  int c_b = 0;
  int f_h = 1, f_w = 1;
  int in_row_stride = 0;
  int s_w = 1;
  bool first = true;
  float seed = 0.0f; // max kernels: initial accumulator value
  int live_out = 0;
};

// Pointwise binary kernels (window 1x1x1). `second` is the residual operand
// for add; `scale`/`shift` are per-block channel vectors for affine. The
// output tile may alias the input tile (in-place execution).
struct PointwiseArgs {
  float* out = nullptr;
  const float* in = nullptr;
  const float* second = nullptr;
  const float* scale = nullptr;
  const float* shift = nullptr;
  int width = 0;
  int c_b = 0;
  int live_out = 0;
};

// Nearest-neighbour upsampling: output column l0 + ll copies input column
// (l0 + ll) / scale of `in_row` (a row base in the matching channel block).
struct UpsampleArgs {
  float* out = nullptr;
  const float* in_row = nullptr;
  int l0 = 0;
  int scale = 1;
  int width = 0;
  int c_b = 0;
  int live_out = 0;
};

void fma_broadcast_reference(const FmaBroadcastArgs& a, PhaseProbe* probe = nullptr);
void fma_broadcast_vector(const FmaBroadcastArgs& a, PhaseProbe* probe = nullptr);
void fma_lanewise_reference(const LanewiseArgs& a, PhaseProbe* probe = nullptr);
void fma_lanewise_vector(const LanewiseArgs& a, PhaseProbe* probe = nullptr);
void max_lanewise_reference(const LanewiseArgs& a, PhaseProbe* probe = nullptr);
void max_lanewise_vector(const LanewiseArgs& a, PhaseProbe* probe = nullptr);
void pointwise_add_reference(const PointwiseArgs& a, PhaseProbe* probe = nullptr);
void pointwise_add_vector(const PointwiseArgs& a, PhaseProbe* probe = nullptr);
void affine_reference(const PointwiseArgs& a, PhaseProbe* probe = nullptr);
void affine_vector(const PointwiseArgs& a, PhaseProbe* probe = nullptr);
void upsample_reference(const UpsampleArgs& a, PhaseProbe* probe = nullptr);
void upsample_vector(const UpsampleArgs& a, PhaseProbe* probe = nullptr);

// A selected kernel implementation for one (op, tile width).
struct KernelVariant {
  ReductionOp op = ReductionOp::kFma;
  int width = 0;
  bool vectorized = false;
  KernelTag tag = KernelTag::kNone;
};

// Returns the vectorized variant when one exists for (op, width) and the
// caller prefers it, otherwise the reference variant. Never fails: every op
// has a reference implementation at every width. `generic_window` marks
// layers outside the broadcast/lane-mapped access patterns (e.g. overlapping
// group reductions), which only the generic reference kernel serves.
KernelVariant select_kernel(ReductionOp op, int width, bool prefer_vectorized,
                            bool generic_window = false);

}  // namespace uninest

#endif  // UNINEST_KERNELS_HPP_
