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
#include "uninest/layers.hpp"

#include <algorithm>

namespace uninest {

const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::kConv: return "conv";
    case LayerKind::kDepthwise: return "dwconv";
    case LayerKind::kGroupConv: return "groupconv";
    case LayerKind::kMaxPool: return "maxpool";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kFullyConnected: return "fc";
    case LayerKind::kAdd: return "add";
    case LayerKind::kAffine: return "affine";
    case LayerKind::kUpsample: return "upsample";
    case LayerKind::kCheckpoint: return "checkpoint";
  }
  return "?";
}

LayerDesc conv2d(int f_h, int f_w, int stride, int out_channels, Padding pad) {
  LayerDesc d;
  d.kind = LayerKind::kConv;
  d.f_h = f_h;
  d.f_w = f_w;
  d.s_h = d.s_w = stride;
  d.out_channels = out_channels;
  d.pad = pad;
  return d;
}

LayerDesc depthwise_conv(int f_h, int f_w, int stride, Padding pad) {
  LayerDesc d;
  d.kind = LayerKind::kDepthwise;
  d.f_h = f_h;
  d.f_w = f_w;
  d.s_h = d.s_w = stride;
  d.pad = pad;
  return d;
}

LayerDesc group_conv(int f_h, int f_w, int stride, int channels_per_group,
                     int filters_per_group, Padding pad, int channel_stride) {
  LayerDesc d;
  d.kind = LayerKind::kGroupConv;
  d.f_h = f_h;
  d.f_w = f_w;
  d.s_h = d.s_w = stride;
  d.channels_per_group = channels_per_group;
  d.filters_per_group = filters_per_group;
  d.channel_stride = channel_stride;
  d.pad = pad;
  return d;
}

LayerDesc maxpool(int f_h, int f_w, int stride) {
  LayerDesc d;
  d.kind = LayerKind::kMaxPool;
  d.f_h = f_h;
  d.f_w = f_w;
  d.s_h = d.s_w = stride;
  return d;
}

LayerDesc relu() {
  LayerDesc d;
  d.kind = LayerKind::kRelu;
  return d;
}

LayerDesc fully_connected(int out_features) {
  LayerDesc d;
  d.kind = LayerKind::kFullyConnected;
  d.out_channels = out_features;
  return d;
}

LayerDesc add() {
  LayerDesc d;
  d.kind = LayerKind::kAdd;
  return d;
}

LayerDesc batchnorm_affine() {
  LayerDesc d;
  d.kind = LayerKind::kAffine;
  return d;
}

LayerDesc upsample_nearest(int scale) {
  LayerDesc d;
  d.kind = LayerKind::kUpsample;
  d.upsample_scale = scale;
  return d;
}

namespace {

// TensorFlow-style padding resolution: 'same' keeps ceil(i / s) outputs with
// the extra pad cell at the bottom/right.
void resolve_padding(const Padding& pad, int i_h, int i_w, LayerParams& p) {
  switch (pad.mode) {
    case Padding::kValid:
      break;
    case Padding::kExplicit:
      p.pad_top = pad.top;
      p.pad_bottom = pad.bottom;
      p.pad_left = pad.left;
      p.pad_right = pad.right;
      break;
    case Padding::kSame: {
      const int o_h = (i_h + p.s_h - 1) / p.s_h;
      const int o_w = (i_w + p.s_w - 1) / p.s_w;
      const int total_h = std::max((o_h - 1) * p.s_h + p.f_h - i_h, 0);
      const int total_w = std::max((o_w - 1) * p.s_w + p.f_w - i_w, 0);
      p.pad_top = total_h / 2;
      p.pad_bottom = total_h - p.pad_top;
      p.pad_left = total_w / 2;
      p.pad_right = total_w - p.pad_left;
      break;
    }
  }
}

}  // namespace

BoundDesc bind_layer(const LayerDesc& d, int i_h, int i_w, int i_c) {
  BoundDesc b;
  LayerParams& p = b.params;
  switch (d.kind) {
    case LayerKind::kConv:
      p.f_h = d.f_h;
      p.f_w = d.f_w;
      p.f_c = i_c;
      p.s_h = d.s_h;
      p.s_w = d.s_w;
      p.k = d.out_channels;
      b.op = ReductionOp::kFma;
      break;
    case LayerKind::kDepthwise:
      p.f_h = d.f_h;
      p.f_w = d.f_w;
      p.f_c = 1;
      p.s_h = d.s_h;
      p.s_w = d.s_w;
      p.k = 1;
      b.op = ReductionOp::kFma;
      break;
    case LayerKind::kGroupConv:
      p.f_h = d.f_h;
      p.f_w = d.f_w;
      p.f_c = d.channels_per_group;
      p.s_h = d.s_h;
      p.s_w = d.s_w;
      p.s_c = d.channel_stride > 0 ? d.channel_stride : d.channels_per_group;
      p.k = d.filters_per_group;
      b.op = ReductionOp::kFma;
      break;
    case LayerKind::kMaxPool:
      p.f_h = d.f_h;
      p.f_w = d.f_w;
      p.s_h = d.s_h;
      p.s_w = d.s_w;
      b.op = ReductionOp::kMax;
      b.args.max_seed = -std::numeric_limits<float>::infinity();
      b.args.max_seed_u8 = 0;
      break;
    case LayerKind::kRelu:
      b.op = ReductionOp::kMax;
      b.args.max_seed = 0.0f; // max(x, 0)
      b.in_place = true;
      break;
    case LayerKind::kFullyConnected:
      p.f_h = i_h;
      p.f_w = i_w;
      p.f_c = i_c;
      p.k = d.out_channels;
      b.op = ReductionOp::kFma;
      break;
    case LayerKind::kAdd:
      b.op = ReductionOp::kPointwiseFmaBinary;
      b.args.mode = PointwiseMode::kAdd;
      b.in_place = true;
      break;
    case LayerKind::kAffine:
      b.op = ReductionOp::kPointwiseFmaBinary;
      b.args.mode = PointwiseMode::kAffine;
      b.in_place = true;
      break;
    case LayerKind::kUpsample:
      b.op = ReductionOp::kUpsampleNearest;
      b.args.upsample_scale = d.upsample_scale;
      b.out_h = i_h * d.upsample_scale;
      b.out_w = i_w * d.upsample_scale;
      b.out_c = i_c;
      b.groups = i_c;
      return b;
    case LayerKind::kCheckpoint:
      b.out_h = i_h;
      b.out_w = i_w;
      b.out_c = i_c;
      return b;
  }
  resolve_padding(d.pad, i_h, i_w, p);
  const OutputGeometry geo = output_shape(p, i_h, i_w, i_c);
  b.out_h = geo.o_h;
  b.out_w = geo.o_w;
  b.out_c = geo.o_c;
  b.groups = geo.groups;
  if (b.op == ReductionOp::kFma) {
    b.weight_count = static_cast<long long>(geo.groups) * p.k * p.f_c * p.f_h *
                     p.f_w;
  } else if (d.kind == LayerKind::kAffine) {
    b.weight_count = 2LL * i_c; // scale and shift planes
  }
  return b;
}

}  // namespace uninest
