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
#ifndef UNINEST_PACKING_HPP_
#define UNINEST_PACKING_HPP_

#include "uninest/instrument.hpp"
#include "uninest/tensor.hpp"

namespace uninest {

// The only layout conversions in the system. Models call pack once at entry
// and unpack once at exit; weights are packed at load time. Everything in
// between stays in the blocked format.

// Element (h, w, c) of `src` lands in block c / block, lane c % block.
// Padding lanes are filled with `fill` (zero keeps FMA reductions neutral).
template <typename T>
BlockedTensor<T> pack_activations(const PlainTensor<T>& src, int block,
                                  T fill = T(0)) {
  counters().pack_calls.fetch_add(1, std::memory_order_relaxed);
  BlockedTensor<T> dst(src.height, src.width, src.channels, block);
  if (fill != T(0)) {
    for (size_t i = 0; i < dst.size(); ++i) dst.data[i] = fill;
  }
  for (int h = 0; h < src.height; ++h) {
    for (int w = 0; w < src.width; ++w) {
      const T* s = &src.data[src.index(h, w, 0)];
      for (int c = 0; c < src.channels; ++c) dst.at(h, w, c) = s[c];
    }
  }
  return dst;
}

// Packs into caller-provided storage (model runner arenas). Same contract as
// pack_activations.
template <typename T>
void pack_activations_into(const PlainTensor<T>& src, BlockedTensor<T>& dst,
                           T fill = T(0)) {
  counters().pack_calls.fetch_add(1, std::memory_order_relaxed);
  for (size_t i = 0; i < dst.size(); ++i) dst.data[i] = fill;
  for (int h = 0; h < src.height; ++h) {
    for (int w = 0; w < src.width; ++w) {
      const T* s = &src.data[src.index(h, w, 0)];
      for (int c = 0; c < src.channels; ++c) dst.at(h, w, c) = s[c];
    }
  }
}

// Exact inverse of pack_activations; padding lanes are dropped.
template <typename T>
PlainTensor<T> unpack_activations(const BlockedTensor<T>& src) {
  counters().unpack_calls.fetch_add(1, std::memory_order_relaxed);
  PlainTensor<T> dst(src.height, src.width, src.channels);
  for (int h = 0; h < src.height; ++h) {
    for (int w = 0; w < src.width; ++w) {
      T* d = &dst.data[dst.index(h, w, 0)];
      for (int c = 0; c < src.channels; ++c) d[c] = src.at(h, w, c);
    }
  }
  return dst;
}

// Packs a plain [G][K][F_C][F_H][F_W] weight array into the co-tiled layout.
// Padded lanes stay zero.
template <typename T>
PackedWeights<T> pack_weights(const T* src, int groups, int k, int f_c,
                              int f_h, int f_w, int out_block, int in_block) {
  PackedWeights<T> dst;
  dst.groups = groups;
  dst.filters_per_group = k;
  dst.filter_channels = f_c;
  dst.filter_height = f_h;
  dst.filter_width = f_w;
  dst.out_block = out_block;
  dst.in_block = in_block;
  dst.data.assign(dst.expected_size(), T(0));
  size_t s = 0;
  for (int g = 0; g < groups; ++g) {
    for (int kk = 0; kk < k; ++kk) {
      for (int fc = 0; fc < f_c; ++fc) {
        for (int fh = 0; fh < f_h; ++fh) {
          for (int fw = 0; fw < f_w; ++fw) {
            dst.data[dst.index(g, kk, fc, fh, fw)] = src[s++];
          }
        }
      }
    }
  }
  return dst;
}

template <typename T>
PackedWeights<T> pack_weights(const std::vector<T>& src, int groups, int k,
                              int f_c, int f_h, int f_w, int out_block,
                              int in_block) {
  assert(src.size() == static_cast<size_t>(groups) * k * f_c * f_h * f_w);
  return pack_weights(src.data(), groups, k, f_c, f_h, f_w, out_block,
                      in_block);
}

// Spatial padding materialized in the blocked format, writing into a
// preallocated destination. The interior equals src; the border holds `fill`
// in live lanes and zero in channel-pad lanes.
template <typename T>
void pad_spatial_into(const BlockedTensor<T>& src, BlockedTensor<T>& dst,
                      int pad_top, int pad_left, T fill) {
  const int blocks = src.block_count();
  const int blk = src.block;
  for (int b = 0; b < blocks; ++b) {
    const int live = src.channels - b * blk < blk ? src.channels - b * blk : blk;
    for (int h = 0; h < dst.height; ++h) {
      const int sh = h - pad_top;
      const bool row_live = sh >= 0 && sh < src.height;
      for (int w = 0; w < dst.width; ++w) {
        const int sw = w - pad_left;
        T* d = dst.lane_ptr(b, h, w);
        if (row_live && sw >= 0 && sw < src.width) {
          const T* s = src.lane_ptr(b, sh, sw);
          for (int l = 0; l < blk; ++l) d[l] = s[l];
        } else {
          for (int l = 0; l < live; ++l) d[l] = fill;
          for (int l = live; l < blk; ++l) d[l] = T(0);
        }
      }
    }
  }
}

template <typename T>
BlockedTensor<T> pad_spatial(const BlockedTensor<T>& src, int pad_top,
                             int pad_bottom, int pad_left, int pad_right,
                             T fill) {
  BlockedTensor<T> dst(src.height + pad_top + pad_bottom,
                       src.width + pad_left + pad_right, src.channels,
                       src.block);
  pad_spatial_into(src, dst, pad_top, pad_left, fill);
  return dst;
}

}  // namespace uninest

#endif  // UNINEST_PACKING_HPP_
