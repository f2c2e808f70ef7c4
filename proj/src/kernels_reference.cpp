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

// Portable reference kernels: plain C++ twins of the vectorized kernels with
// identical LOAD / COMPUTE / STORE structure and the accumulation order fixed
// to the canonical loop order (x, y, ii outer; tile lanes inner).

#include "uninest/kernels.hpp"

namespace uninest {
namespace {

// Largest accumulator tile any valid KernelConfig can request
// (o_wb * c_b <= register budget * widest lane count).
constexpr int kMaxAccScalars = 256;

inline void store_masked(float* out, const float* acc, int width, int c_b,
                         int live_out) {
  // Padding lanes are written as zero so blocked buffers at rest always hold
  // the additive identity in dead lanes.
  for (int ll = 0; ll < width; ++ll) {
    for (int lane = 0; lane < live_out; ++lane) {
      out[ll * c_b + lane] = acc[ll * c_b + lane];
    }
    for (int lane = live_out; lane < c_b; ++lane) out[ll * c_b + lane] = 0.0f;
  }
}

}  // namespace

void fma_broadcast_reference(const FmaBroadcastArgs& a, PhaseProbe* probe) {
  float acc[kMaxAccScalars];
  // LOAD
  if (probe) probe->loads++;
  if (a.first) {
    for (int i = 0; i < a.width * a.c_b; ++i) acc[i] = 0.0f;
  } else {
    for (int i = 0; i < a.width * a.c_b; ++i) acc[i] = a.out[i];
  }
  // COMPUTE
  if (probe) probe->computes++;
  for (int x = 0; x < a.f_h; ++x) {
    for (int y = 0; y < a.f_w; ++y) {
      for (int ii = 0; ii < a.live_f; ++ii) {
        const float* w = a.w + (static_cast<size_t>(x) * a.f_w + y) *
                                   a.w_in_block * a.c_b +
                         static_cast<size_t>(ii) * a.c_b;
        for (int ll = 0; ll < a.width; ++ll) {
          const float in = a.in[static_cast<size_t>(x) * a.in_row_stride +
                                (static_cast<size_t>(ll) * a.s_w + y) * a.c_b +
                                a.in_lane0 + ii];
          for (int lane = 0; lane < a.c_b; ++lane) {
            acc[ll * a.c_b + lane] += in * w[lane];
          }
        }
      }
    }
  }
  // STORE
  if (probe) probe->stores++;
  store_masked(a.out, acc, a.width, a.c_b, a.live_out);
}

void fma_lanewise_reference(const LanewiseArgs& a, PhaseProbe* probe) {
  float acc[kMaxAccScalars];
  if (probe) probe->loads++;
  if (a.first) {
    for (int i = 0; i < a.width * a.c_b; ++i) acc[i] = 0.0f;
  } else {
    for (int i = 0; i < a.width * a.c_b; ++i) acc[i] = a.out[i];
  }
  if (probe) probe->computes++;
  for (int x = 0; x < a.f_h; ++x) {
    for (int y = 0; y < a.f_w; ++y) {
      const float* w = a.w + (static_cast<size_t>(x) * a.f_w + y) * a.c_b;
      for (int ll = 0; ll < a.width; ++ll) {
        const float* in = a.in + static_cast<size_t>(x) * a.in_row_stride +
                          (static_cast<size_t>(ll) * a.s_w + y) * a.c_b;
        for (int lane = 0; lane < a.c_b; ++lane) {
          acc[ll * a.c_b + lane] += in[lane] * w[lane];
        }
      }
    }
  }
  if (probe) probe->stores++;
  store_masked(a.out, acc, a.width, a.c_b, a.live_out);
}

void max_lanewise_reference(const LanewiseArgs& a, PhaseProbe* probe) {
  float acc[kMaxAccScalars];
  if (probe) probe->loads++;
  if (a.first) {
    for (int i = 0; i < a.width * a.c_b; ++i) acc[i] = a.seed;
  } else {
    for (int i = 0; i < a.width * a.c_b; ++i) acc[i] = a.out[i];
  }
  if (probe) probe->computes++;
  for (int x = 0; x < a.f_h; ++x) {
    for (int y = 0; y < a.f_w; ++y) {
      for (int ll = 0; ll < a.width; ++ll) {
        const float* in = a.in + static_cast<size_t>(x) * a.in_row_stride +
                          (static_cast<size_t>(ll) * a.s_w + y) * a.c_b;
        for (int lane = 0; lane < a.c_b; ++lane) {
          float& v = acc[ll * a.c_b + lane];
          v = in[lane] > v ? in[lane] : v;
        }
      }
    }
  }
  if (probe) probe->stores++;
  store_masked(a.out, acc, a.width, a.c_b, a.live_out);
}

void pointwise_add_reference(const PointwiseArgs& a, PhaseProbe* probe) {
  float acc[kMaxAccScalars];
  if (probe) probe->loads++;
  for (int i = 0; i < a.width * a.c_b; ++i) acc[i] = a.in[i];
  if (probe) probe->computes++;
  for (int i = 0; i < a.width * a.c_b; ++i) acc[i] += a.second[i];
  if (probe) probe->stores++;
  store_masked(a.out, acc, a.width, a.c_b, a.live_out);
}

void affine_reference(const PointwiseArgs& a, PhaseProbe* probe) {
  float acc[kMaxAccScalars];
  // LOAD seeds with the shift plane; the scale multiply accumulates on top.
  if (probe) probe->loads++;
  for (int ll = 0; ll < a.width; ++ll) {
    for (int lane = 0; lane < a.c_b; ++lane) {
      acc[ll * a.c_b + lane] = a.shift[lane];
    }
  }
  if (probe) probe->computes++;
  for (int ll = 0; ll < a.width; ++ll) {
    for (int lane = 0; lane < a.c_b; ++lane) {
      acc[ll * a.c_b + lane] += a.in[ll * a.c_b + lane] * a.scale[lane];
    }
  }
  if (probe) probe->stores++;
  store_masked(a.out, acc, a.width, a.c_b, a.live_out);
}

void upsample_reference(const UpsampleArgs& a, PhaseProbe* probe) {
  float acc[kMaxAccScalars];
  if (probe) probe->loads++;
  if (probe) probe->computes++;
  for (int ll = 0; ll < a.width; ++ll) {
    const float* in = a.in_row +
                      static_cast<size_t>((a.l0 + ll) / a.scale) * a.c_b;
    for (int lane = 0; lane < a.c_b; ++lane) acc[ll * a.c_b + lane] = in[lane];
  }
  if (probe) probe->stores++;
  store_masked(a.out, acc, a.width, a.c_b, a.live_out);
}

KernelVariant select_kernel(ReductionOp op, int width, bool prefer_vectorized,
                            bool generic_window) {
  KernelVariant v;
  v.op = op;
  v.width = width;
  if (generic_window) {
    // Only the generic reference kernel handles arbitrary channel windows.
    v.vectorized = false;
    v.tag = KernelTag::kGeneric;
    return v;
  }
  v.vectorized = prefer_vectorized;
  switch (op) {
    case ReductionOp::kFma: v.tag = KernelTag::kFmaBroadcast; break;
    case ReductionOp::kMax: v.tag = KernelTag::kMaxLanewise; break;
    case ReductionOp::kPointwiseFmaBinary: v.tag = KernelTag::kPointwiseAdd; break;
    case ReductionOp::kUpsampleNearest: v.tag = KernelTag::kUpsample; break;
  }
  return v;
}

}  // namespace uninest
