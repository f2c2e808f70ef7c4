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
#ifndef UNINEST_SHAPE_HPP_
#define UNINEST_SHAPE_HPP_

#include <limits>
#include <stdexcept>
#include <string>

namespace uninest {

// The seven parameters describing a sliding-window reduction layer, plus
// spatial padding. A reduction window of f_h x f_w x f_c slides with strides
// (s_h, s_w, s_c); k filters are applied to each window position.
struct LayerParams {
  int f_h = 1, f_w = 1, f_c = 1;
  int s_h = 1, s_w = 1, s_c = 1;
  int k = 1;
  int pad_top = 0, pad_bottom = 0, pad_left = 0, pad_right = 0;

  bool has_padding() const {
    return pad_top | pad_bottom | pad_left | pad_right;
  }
};

// The operation that combines window elements into one output.
enum class ReductionOp {
  kFma,                // multiply-accumulate with weights
  kMax,                // running maximum, no weights
  kPointwiseFmaBinary, // second-tensor accumulate (add) or per-channel affine
  kUpsampleNearest,    // index replication
};

enum class PointwiseMode { kAdd, kAffine };

// Per-op auxiliary arguments that are not part of the seven window
// parameters.
struct OpArgs {
  float max_seed = -std::numeric_limits<float>::infinity();
  unsigned char max_seed_u8 = 0; // quantized-path max seed
  PointwiseMode mode = PointwiseMode::kAdd;
  int upsample_scale = 1;
};

enum class LayerClass {
  kSingleElement,
  kSingleChannel,
  kPartialChannel,
  kFullChannel,
  kFull,
};

const char* layer_class_name(LayerClass c);

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct OutputGeometry {
  int o_h = 0, o_w = 0, o_c = 0;
  int groups = 0;
};

// Output shape of a contracting layer:
//   O_H = floor((I_H + pads - F_H) / S_H) + 1   (width analogous)
//   G   = floor((I_C - F_C) / S_C) + 1
//   O_C = K * G
// Division is floor division: trailing elements that do not fill a window are
// dropped. Throws ShapeError naming the offending dimension when a window
// exceeds the (padded) input.
OutputGeometry output_shape(const LayerParams& p, int i_h, int i_w, int i_c);

// Classification by window extents relative to the input:
//   SingleElement  : F_H = F_W = F_C = 1, K = 1
//   SingleChannel  : F_C = 1, K = 1
//   Full           : F_H = I_H, F_W = I_W, F_C = I_C
//   FullChannel    : F_C = I_C
//   PartialChannel : anything else
// Rows are tested strictest-first so each layer maps to a unique class.
LayerClass classify(const LayerParams& p, int i_h, int i_w, int i_c);

}  // namespace uninest

#endif  // UNINEST_SHAPE_HPP_
