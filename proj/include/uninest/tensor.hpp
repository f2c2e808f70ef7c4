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
#ifndef UNINEST_TENSOR_HPP_
#define UNINEST_TENSOR_HPP_

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace uninest {

inline constexpr int ceil_div(int a, int b) { return (a + b - 1) / b; }
inline constexpr int round_up(int a, int b) { return ceil_div(a, b) * b; }

// Dense HWC tensor, channels fastest. This is the only format the engine
// accepts at the model boundary; everything internal is blocked.
template <typename T>
struct PlainTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<T> data;

  PlainTensor() = default;
  PlainTensor(int h, int w, int c)
      : height(h), width(w), channels(c),
        data(static_cast<size_t>(h) * w * c, T(0)) {}

  size_t index(int h, int w, int c) const {
    return (static_cast<size_t>(h) * width + w) * channels + c;
  }
  T& at(int h, int w, int c) { return data[index(h, w, c)]; }
  const T& at(int h, int w, int c) const { return data[index(h, w, c)]; }
  size_t size() const { return data.size(); }
};

// Channel-blocked activation buffer: [channel_block][height][width][lane],
// lane fastest. All layers read and write this layout; the block size is the
// machine channel block C_b. Lanes past `channels` are padding and always
// hold zero in buffers at rest.
//
// A BlockedTensor either owns its storage or aliases an external arena
// (ping-pong buffers in the model runner). Copying an aliasing tensor would
// be ambiguous, so copies are disabled; use explicit clone() when needed.
template <typename T>
struct BlockedTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  int block = 1;
  T* data = nullptr;

  BlockedTensor() = default;
  BlockedTensor(int h, int w, int c, int blk)
      : height(h), width(w), channels(c), block(blk),
        storage_(buffer_size(h, w, c, blk), T(0)) {
    data = storage_.data();
  }
  // Aliasing view over external storage. `ptr` must cover buffer_size().
  static BlockedTensor view(int h, int w, int c, int blk, T* ptr) {
    BlockedTensor t;
    t.height = h;
    t.width = w;
    t.channels = c;
    t.block = blk;
    t.data = ptr;
    return t;
  }

  BlockedTensor(const BlockedTensor&) = delete;
  BlockedTensor& operator=(const BlockedTensor&) = delete;
  BlockedTensor(BlockedTensor&& o) noexcept { move_from(std::move(o)); }
  BlockedTensor& operator=(BlockedTensor&& o) noexcept {
    move_from(std::move(o));
    return *this;
  }

  BlockedTensor clone() const {
    BlockedTensor t(height, width, channels, block);
    for (size_t i = 0; i < t.size(); ++i) t.data[i] = data[i];
    return t;
  }

  int padded_channels() const { return round_up(channels, block); }
  int block_count() const { return padded_channels() / block; }
  static size_t buffer_size(int h, int w, int c, int blk) {
    return static_cast<size_t>(round_up(c, blk)) * h * w;
  }
  size_t size() const { return buffer_size(height, width, channels, block); }

  size_t index(int h, int w, int c) const {
    const int cb = c / block;
    const int lane = c % block;
    return ((static_cast<size_t>(cb) * height + h) * width + w) * block + lane;
  }
  T& at(int h, int w, int c) { return data[index(h, w, c)]; }
  const T& at(int h, int w, int c) const { return data[index(h, w, c)]; }

  // Pointer to the lane-0 element of (block_idx, h, w).
  T* lane_ptr(int block_idx, int h, int w) {
    return data +
           ((static_cast<size_t>(block_idx) * height + h) * width + w) * block;
  }
  const T* lane_ptr(int block_idx, int h, int w) const {
    return data +
           ((static_cast<size_t>(block_idx) * height + h) * width + w) * block;
  }

 private:
  std::vector<T> storage_;
  void move_from(BlockedTensor&& o) {
    height = o.height;
    width = o.width;
    channels = o.channels;
    block = o.block;
    storage_ = std::move(o.storage_);
    data = storage_.empty() ? o.data : storage_.data();
    o.data = nullptr;
  }
};

// Weight buffer co-tiled with the blocked activation format. Filters are laid
// out as [output-channel block][input-channel block][f_h][f_w][lane-in][lane-out]
// so the kernel walks it with unit stride. Output channel of filter (g, k) is
// g * K + k; padded lanes are zero-filled.
template <typename T>
struct PackedWeights {
  int groups = 1;            // G
  int filters_per_group = 1; // K
  int filter_channels = 1;   // F_C
  int filter_height = 1;     // F_H
  int filter_width = 1;      // F_W
  int out_block = 1;         // lanes per output-channel block (C_b)
  int in_block = 1;          // F_Cb
  std::vector<T> data;

  int output_channels() const { return groups * filters_per_group; }
  int out_blocks() const { return ceil_div(output_channels(), out_block); }
  int in_blocks() const { return ceil_div(filter_channels, in_block); }
  // Scalars spanned by one (out-block, in-block) tile.
  size_t tile_span() const {
    return static_cast<size_t>(filter_height) * filter_width * in_block *
           out_block;
  }
  size_t expected_size() const {
    return static_cast<size_t>(out_blocks()) * in_blocks() * tile_span();
  }
  const T* tile(int ob, int ib) const {
    return data.data() + (static_cast<size_t>(ob) * in_blocks() + ib) * tile_span();
  }
  // Index of logical weight (g, k, fc, fh, fw) in the packed buffer.
  size_t index(int g, int k, int fc, int fh, int fw) const {
    const int oc = g * filters_per_group + k;
    const int ob = oc / out_block;
    const int lane = oc % out_block;
    const int ib = fc / in_block;
    const int ii = fc % in_block;
    return (static_cast<size_t>(ob) * in_blocks() + ib) * tile_span() +
           ((static_cast<size_t>(fh) * filter_width + fw) * in_block + ii) *
               out_block +
           lane;
  }
};

}  // namespace uninest

#endif  // UNINEST_TENSOR_HPP_
