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
#ifndef UNINEST_LAYERS_HPP_
#define UNINEST_LAYERS_HPP_

#include <limits>
#include <string>

#include "uninest/shape.hpp"

namespace uninest {

// Concrete layers are data-only descriptors. None of them owns a loop nest:
// binding a descriptor against an input shape yields (LayerParams, op, args)
// and execution always goes through run_layer.

enum class LayerKind {
  kConv,
  kDepthwise,
  kGroupConv,
  kMaxPool,
  kRelu,
  kFullyConnected,
  kAdd,
  kAffine,
  kUpsample,
  kCheckpoint, // buffer op in model graphs, not a compute layer
};

const char* layer_kind_name(LayerKind k);

struct Padding {
  enum Mode { kValid, kSame, kExplicit };
  Mode mode = kValid;
  int top = 0, bottom = 0, left = 0, right = 0;
};

struct LayerDesc {
  LayerKind kind = LayerKind::kConv;
  int f_h = 1, f_w = 1;
  int s_h = 1, s_w = 1;
  int out_channels = 0;       // conv / fully connected
  int channels_per_group = 1; // group conv F_C
  int filters_per_group = 1;  // group conv K
  int channel_stride = 0;     // group conv S_C; 0 means F_C (disjoint groups)
  Padding pad;
  int upsample_scale = 1;
};

LayerDesc conv2d(int f_h, int f_w, int stride, int out_channels,
                 Padding pad = {});
LayerDesc depthwise_conv(int f_h, int f_w, int stride, Padding pad = {});
LayerDesc group_conv(int f_h, int f_w, int stride, int channels_per_group,
                     int filters_per_group, Padding pad = {},
                     int channel_stride = 0);
LayerDesc maxpool(int f_h, int f_w, int stride);
LayerDesc relu();
LayerDesc fully_connected(int out_features);
LayerDesc add();
LayerDesc batchnorm_affine();
LayerDesc upsample_nearest(int scale);

// A descriptor bound to a concrete input shape.
struct BoundDesc {
  LayerParams params; // includes resolved padding
  ReductionOp op = ReductionOp::kFma;
  OpArgs args;
  int out_h = 0, out_w = 0, out_c = 0;
  int groups = 1;
  long long weight_count = 0; // logical scalars, affine counts scale+shift
  bool in_place = false;      // elementwise layers may run in place
};

// Resolves window, strides, K and padding against the input shape:
//   conv            F_C = I_C, S_C = 1, G = 1, K = out_channels
//   depthwise       F_C = 1,  S_C = 1, K = 1, G = I_C
//   group conv      F_C = channels_per_group, S_C = channel_stride, K given
//   maxpool / relu  MAX reduction; relu seeds the maximum with zero
//   fully connected F = I_H x I_W x I_C, G = 1, K = out_features
//   add / affine    pointwise binary; upsample is an output-driven index map
BoundDesc bind_layer(const LayerDesc& d, int i_h, int i_w, int i_c);

}  // namespace uninest

#endif  // UNINEST_LAYERS_HPP_
