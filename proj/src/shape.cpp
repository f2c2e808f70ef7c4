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
#include "uninest/shape.hpp"

#include "uninest/instrument.hpp"

namespace uninest {

Counters& counters() {
  static Counters c;
  return c;
}

const char* layer_class_name(LayerClass c) {
  switch (c) {
    case LayerClass::kSingleElement: return "single_element";
    case LayerClass::kSingleChannel: return "single_channel";
    case LayerClass::kPartialChannel: return "partial_channel";
    case LayerClass::kFullChannel: return "full_channel";
    case LayerClass::kFull: return "full";
  }
  return "?";
}

OutputGeometry output_shape(const LayerParams& p, int i_h, int i_w, int i_c) {
  if (p.f_h < 1 || p.f_w < 1 || p.f_c < 1 || p.k < 1 || p.s_h < 1 ||
      p.s_w < 1 || p.s_c < 1) {
    throw ShapeError("layer parameters must be >= 1");
  }
  if (p.pad_top < 0 || p.pad_bottom < 0 || p.pad_left < 0 || p.pad_right < 0) {
    throw ShapeError("padding must be >= 0");
  }
  const int padded_h = i_h + p.pad_top + p.pad_bottom;
  const int padded_w = i_w + p.pad_left + p.pad_right;
  if (p.f_h > padded_h) {
    throw ShapeError("window height " + std::to_string(p.f_h) +
                     " exceeds padded input height " + std::to_string(padded_h));
  }
  if (p.f_w > padded_w) {
    throw ShapeError("window width " + std::to_string(p.f_w) +
                     " exceeds padded input width " + std::to_string(padded_w));
  }
  if (p.f_c > i_c) {
    throw ShapeError("window channels " + std::to_string(p.f_c) +
                     " exceed input channels " + std::to_string(i_c));
  }
  OutputGeometry g;
  g.o_h = (padded_h - p.f_h) / p.s_h + 1;
  g.o_w = (padded_w - p.f_w) / p.s_w + 1;
  g.groups = (i_c - p.f_c) / p.s_c + 1;
  g.o_c = p.k * g.groups;
  return g;
}

LayerClass classify(const LayerParams& p, int i_h, int i_w, int i_c) {
  if (p.f_h == 1 && p.f_w == 1 && p.f_c == 1 && p.k == 1) {
    return LayerClass::kSingleElement;
  }
  if (p.f_c == 1 && p.k == 1) return LayerClass::kSingleChannel;
  if (p.f_c == i_c && p.f_h == i_h && p.f_w == i_w) return LayerClass::kFull;
  if (p.f_c == i_c) return LayerClass::kFullChannel;
  return LayerClass::kPartialChannel;
}

}  // namespace uninest
