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

// Vectorized kernels over the fixed-width vector abstraction. The accumulator
// tile lives in vector registers across the whole reduction; lanes may be
// reassociated relative to the reference kernels, so FMA results agree within
// accumulation-order tolerance (max results are bit-exact).

#include "uninest/kernels.hpp"
#include "uninest/vec.hpp"

namespace uninest {
namespace {

constexpr int kMaxAccVecs = 32;

inline void load_tile(vfloat* acc, const float* out, int n) {
  for (int i = 0; i < n; ++i) acc[i] = vload(out + i * kVecLanes);
}

inline void zero_tile(vfloat* acc, int n) {
  const vfloat z = vsplat(0.0f);
  for (int i = 0; i < n; ++i) acc[i] = z;
}

inline void store_tile(const vfloat* acc, float* out, int width, int c_b,
                       int live_out) {
  const int vpc = c_b / kVecLanes;
  if (live_out == c_b) {
    for (int i = 0; i < width * vpc; ++i) vstore(out + i * kVecLanes, acc[i]);
    return;
  }
  // Masked tail block: live lanes take the accumulator, padding lanes are
  // written as zero so blocked buffers at rest hold the additive identity.
  for (int ll = 0; ll < width; ++ll) {
    for (int v = 0; v < vpc; ++v) {
      const int lane0 = v * kVecLanes;
      const int live = live_out - lane0;
      const vfloat a = acc[ll * vpc + v];
      if (live >= kVecLanes) {
        vstore(out + ll * c_b + lane0, a);
      } else {
        for (int l = 0; l < kVecLanes; ++l) {
          out[ll * c_b + lane0 + l] = l < live ? a[l] : 0.0f;
        }
      }
    }
  }
}

// Interior fast path: compile-time width and vectors-per-channel-block keep
// the accumulators enumerable so they stay in registers.
template <int kWidth, int kVpc>
void fma_broadcast_fixed(const FmaBroadcastArgs& a) {
  vfloat acc[kWidth * kVpc];
  if (a.first) {
    zero_tile(acc, kWidth * kVpc);
  } else {
    load_tile(acc, a.out, kWidth * kVpc);
  }
  const int col_step = a.s_w * a.c_b;
  for (int x = 0; x < a.f_h; ++x) {
    const float* in_row = a.in + static_cast<size_t>(x) * a.in_row_stride +
                          a.in_lane0;
    const float* w_row = a.w + static_cast<size_t>(x) * a.f_w * a.w_in_block *
                                   a.c_b;
    for (int y = 0; y < a.f_w; ++y) {
      const float* in_col = in_row + y * a.c_b;
      const float* w_col = w_row + static_cast<size_t>(y) * a.w_in_block * a.c_b;
      for (int ii = 0; ii < a.live_f; ++ii) {
        const float* w = w_col + static_cast<size_t>(ii) * a.c_b;
        vfloat wv[kVpc];
        for (int v = 0; v < kVpc; ++v) wv[v] = vload(w + v * kVecLanes);
        for (int ll = 0; ll < kWidth; ++ll) {
          const vfloat in = vsplat(in_col[ll * col_step + ii]);
          for (int v = 0; v < kVpc; ++v) {
            acc[ll * kVpc + v] += in * wv[v];
          }
        }
      }
    }
  }
  store_tile(acc, a.out, kWidth, a.c_b, a.live_out);
}

// Runtime-width fallback for remainder tiles and non-default channel blocks.
void fma_broadcast_any(const FmaBroadcastArgs& a) {
  const int vpc = a.c_b / kVecLanes;
  vfloat acc[kMaxAccVecs];
  const int n = a.width * vpc;
  if (a.first) {
    zero_tile(acc, n);
  } else {
    load_tile(acc, a.out, n);
  }
  const int col_step = a.s_w * a.c_b;
  for (int x = 0; x < a.f_h; ++x) {
    const float* in_row = a.in + static_cast<size_t>(x) * a.in_row_stride +
                          a.in_lane0;
    const float* w_row = a.w + static_cast<size_t>(x) * a.f_w * a.w_in_block *
                                   a.c_b;
    for (int y = 0; y < a.f_w; ++y) {
      const float* in_col = in_row + y * a.c_b;
      const float* w_col = w_row + static_cast<size_t>(y) * a.w_in_block * a.c_b;
      for (int ii = 0; ii < a.live_f; ++ii) {
        const float* w = w_col + static_cast<size_t>(ii) * a.c_b;
        for (int ll = 0; ll < a.width; ++ll) {
          const vfloat in = vsplat(in_col[ll * col_step + ii]);
          for (int v = 0; v < vpc; ++v) {
            acc[ll * vpc + v] += in * vload(w + v * kVecLanes);
          }
        }
      }
    }
  }
  store_tile(acc, a.out, a.width, a.c_b, a.live_out);
}

}  // namespace

void fma_broadcast_vector(const FmaBroadcastArgs& a, PhaseProbe* probe) {
  if (probe) {
    probe->loads++;
    probe->computes++;
    probe->stores++;
  }
  if (a.c_b == kVecLanes) {
    switch (a.width) {
      case 6: fma_broadcast_fixed<6, 1>(a); return;
      case 5: fma_broadcast_fixed<5, 1>(a); return;
      case 4: fma_broadcast_fixed<4, 1>(a); return;
      case 3: fma_broadcast_fixed<3, 1>(a); return;
      case 2: fma_broadcast_fixed<2, 1>(a); return;
      case 1: fma_broadcast_fixed<1, 1>(a); return;
      default: break;
    }
  } else if (a.c_b == 2 * kVecLanes) {
    switch (a.width) {
      case 6: fma_broadcast_fixed<6, 2>(a); return;
      case 5: fma_broadcast_fixed<5, 2>(a); return;
      case 4: fma_broadcast_fixed<4, 2>(a); return;
      case 3: fma_broadcast_fixed<3, 2>(a); return;
      case 2: fma_broadcast_fixed<2, 2>(a); return;
      case 1: fma_broadcast_fixed<1, 2>(a); return;
      default: break;
    }
  }
  fma_broadcast_any(a);
}

void fma_lanewise_vector(const LanewiseArgs& a, PhaseProbe* probe) {
  if (probe) {
    probe->loads++;
    probe->computes++;
    probe->stores++;
  }
  const int vpc = a.c_b / kVecLanes;
  vfloat acc[kMaxAccVecs];
  const int n = a.width * vpc;
  if (a.first) {
    zero_tile(acc, n);
  } else {
    load_tile(acc, a.out, n);
  }
  for (int x = 0; x < a.f_h; ++x) {
    const float* in_row = a.in + static_cast<size_t>(x) * a.in_row_stride;
    const float* w_row = a.w + (static_cast<size_t>(x) * a.f_w) * a.c_b;
    for (int y = 0; y < a.f_w; ++y) {
      const float* w = w_row + static_cast<size_t>(y) * a.c_b;
      for (int ll = 0; ll < a.width; ++ll) {
        const float* in = in_row + (static_cast<size_t>(ll) * a.s_w + y) * a.c_b;
        for (int v = 0; v < vpc; ++v) {
          acc[ll * vpc + v] +=
              vload(in + v * kVecLanes) * vload(w + v * kVecLanes);
        }
      }
    }
  }
  store_tile(acc, a.out, a.width, a.c_b, a.live_out);
}

void max_lanewise_vector(const LanewiseArgs& a, PhaseProbe* probe) {
  if (probe) {
    probe->loads++;
    probe->computes++;
    probe->stores++;
  }
  const int vpc = a.c_b / kVecLanes;
  vfloat acc[kMaxAccVecs];
  const int n = a.width * vpc;
  if (a.first) {
    const vfloat s = vsplat(a.seed);
    for (int i = 0; i < n; ++i) acc[i] = s;
  } else {
    load_tile(acc, a.out, n);
  }
  for (int x = 0; x < a.f_h; ++x) {
    const float* in_row = a.in + static_cast<size_t>(x) * a.in_row_stride;
    for (int y = 0; y < a.f_w; ++y) {
      for (int ll = 0; ll < a.width; ++ll) {
        const float* in = in_row + (static_cast<size_t>(ll) * a.s_w + y) * a.c_b;
        for (int v = 0; v < vpc; ++v) {
          acc[ll * vpc + v] = vmax(acc[ll * vpc + v], vload(in + v * kVecLanes));
        }
      }
    }
  }
  store_tile(acc, a.out, a.width, a.c_b, a.live_out);
}

void pointwise_add_vector(const PointwiseArgs& a, PhaseProbe* probe) {
  if (probe) {
    probe->loads++;
    probe->computes++;
    probe->stores++;
  }
  const int vpc = a.c_b / kVecLanes;
  vfloat acc[kMaxAccVecs];
  const int n = a.width * vpc;
  for (int i = 0; i < n; ++i) acc[i] = vload(a.in + i * kVecLanes);
  for (int i = 0; i < n; ++i) acc[i] += vload(a.second + i * kVecLanes);
  store_tile(acc, a.out, a.width, a.c_b, a.live_out);
}

void affine_vector(const PointwiseArgs& a, PhaseProbe* probe) {
  if (probe) {
    probe->loads++;
    probe->computes++;
    probe->stores++;
  }
  const int vpc = a.c_b / kVecLanes;
  vfloat acc[kMaxAccVecs];
  vfloat sc[8], sh[8];
  for (int v = 0; v < vpc; ++v) {
    sc[v] = vload(a.scale + v * kVecLanes);
    sh[v] = vload(a.shift + v * kVecLanes);
  }
  for (int ll = 0; ll < a.width; ++ll) {
    for (int v = 0; v < vpc; ++v) {
      acc[ll * vpc + v] =
          sh[v] + vload(a.in + (ll * vpc + v) * kVecLanes) * sc[v];
    }
  }
  store_tile(acc, a.out, a.width, a.c_b, a.live_out);
}

void upsample_vector(const UpsampleArgs& a, PhaseProbe* probe) {
  if (probe) {
    probe->loads++;
    probe->computes++;
    probe->stores++;
  }
  const int vpc = a.c_b / kVecLanes;
  vfloat acc[kMaxAccVecs];
  for (int ll = 0; ll < a.width; ++ll) {
    const float* in =
        a.in_row + static_cast<size_t>((a.l0 + ll) / a.scale) * a.c_b;
    for (int v = 0; v < vpc; ++v) acc[ll * vpc + v] = vload(in + v * kVecLanes);
  }
  store_tile(acc, a.out, a.width, a.c_b, a.live_out);
}

}  // namespace uninest
