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
#include "uninest/oracle.hpp"

#include <limits>

namespace uninest {
namespace {

template <typename T>
T read_padded(const PlainTensor<T>& t, int h, int w, int c, T fill) {
  if (h < 0 || h >= t.height || w < 0 || w >= t.width) return fill;
  return t.at(h, w, c);
}

size_t weight_index(const LayerParams& p, int g, int k, int fc, int fh,
                    int fw) {
  return ((((static_cast<size_t>(g) * p.k + k) * p.f_c + fc) * p.f_h + fh) *
          p.f_w) +
         fw;
}

}  // namespace

PlainTensor<float> oracle_layer(const LayerParams& p, ReductionOp op,
                                const OpArgs& args,
                                const PlainTensor<float>& input,
                                const std::vector<float>& weights,
                                const PlainTensor<float>* second,
                                float pad_fill) {
  if (op == ReductionOp::kUpsampleNearest) {
    const int s = args.upsample_scale;
    PlainTensor<float> out(input.height * s, input.width * s, input.channels);
    for (int h = 0; h < out.height; ++h) {
      for (int w = 0; w < out.width; ++w) {
        for (int c = 0; c < out.channels; ++c) {
          out.at(h, w, c) = input.at(h / s, w / s, c);
        }
      }
    }
    return out;
  }

  const OutputGeometry geo =
      output_shape(p, input.height, input.width, input.channels);
  PlainTensor<float> out(geo.o_h, geo.o_w, geo.o_c);

  if (op == ReductionOp::kPointwiseFmaBinary) {
    for (int h = 0; h < out.height; ++h) {
      for (int w = 0; w < out.width; ++w) {
        for (int c = 0; c < out.channels; ++c) {
          if (args.mode == PointwiseMode::kAdd) {
            out.at(h, w, c) = input.at(h, w, c) + second->at(h, w, c);
          } else {
            const double scale = weights[c];
            const double shift = weights[input.channels + c];
            out.at(h, w, c) =
                static_cast<float>(shift + input.at(h, w, c) * scale);
          }
        }
      }
    }
    return out;
  }

  for (int g = 0; g < geo.groups; ++g) {
    for (int k = 0; k < p.k; ++k) {
      const int oc = g * p.k + k;
      for (int oh = 0; oh < geo.o_h; ++oh) {
        for (int ow = 0; ow < geo.o_w; ++ow) {
          if (op == ReductionOp::kMax) {
            float acc = args.max_seed;
            for (int fh = 0; fh < p.f_h; ++fh) {
              for (int fw = 0; fw < p.f_w; ++fw) {
                for (int fc = 0; fc < p.f_c; ++fc) {
                  const int ih = oh * p.s_h + fh - p.pad_top;
                  const int iw = ow * p.s_w + fw - p.pad_left;
                  const int ic = g * p.s_c + fc;
                  const float v = read_padded(input, ih, iw, ic, pad_fill);
                  acc = v > acc ? v : acc;
                }
              }
            }
            out.at(oh, ow, oc) = acc;
          } else {
            double acc = 0.0;
            for (int fh = 0; fh < p.f_h; ++fh) {
              for (int fw = 0; fw < p.f_w; ++fw) {
                for (int fc = 0; fc < p.f_c; ++fc) {
                  const int ih = oh * p.s_h + fh - p.pad_top;
                  const int iw = ow * p.s_w + fw - p.pad_left;
                  const int ic = g * p.s_c + fc;
                  const double v = read_padded(input, ih, iw, ic, pad_fill);
                  acc += v * weights[weight_index(p, g, k, fc, fh, fw)];
                }
              }
            }
            out.at(oh, ow, oc) = static_cast<float>(acc);
          }
        }
      }
    }
  }
  return out;
}

PlainTensor<uint8_t> oracle_layer_quantized(
    const LayerParams& p, ReductionOp op, const OpArgs& args,
    const PlainTensor<uint8_t>& input, const std::vector<uint8_t>& weights,
    const QuantParams& in_q, const QuantParams& w_q, const QuantParams& out_q,
    const PlainTensor<uint8_t>* second, const QuantParams* second_q,
    uint8_t pad_fill) {
  if (op == ReductionOp::kUpsampleNearest) {
    const int s = args.upsample_scale;
    PlainTensor<uint8_t> out(input.height * s, input.width * s,
                             input.channels);
    for (int h = 0; h < out.height; ++h) {
      for (int w = 0; w < out.width; ++w) {
        for (int c = 0; c < out.channels; ++c) {
          out.at(h, w, c) = input.at(h / s, w / s, c);
        }
      }
    }
    return out;
  }

  const OutputGeometry geo =
      output_shape(p, input.height, input.width, input.channels);
  PlainTensor<uint8_t> out(geo.o_h, geo.o_w, geo.o_c);

  if (op == ReductionOp::kPointwiseFmaBinary) {
    for (int h = 0; h < out.height; ++h) {
      for (int w = 0; w < out.width; ++w) {
        for (int c = 0; c < out.channels; ++c) {
          double real;
          if (args.mode == PointwiseMode::kAdd) {
            real = in_q.scale * (input.at(h, w, c) - in_q.zero_point) +
                   second_q->scale * (second->at(h, w, c) - second_q->zero_point);
          } else {
            const double scale =
                w_q.scale * (weights[c] - w_q.zero_point);
            const double shift =
                w_q.scale * (weights[input.channels + c] - w_q.zero_point);
            real = in_q.scale * (input.at(h, w, c) - in_q.zero_point) * scale +
                   shift;
          }
          out.at(h, w, c) = saturate_u8(round_half_away(real / out_q.scale) +
                                        out_q.zero_point);
        }
      }
    }
    return out;
  }

  const double factor = in_q.scale * w_q.scale / out_q.scale;
  for (int g = 0; g < geo.groups; ++g) {
    for (int k = 0; k < p.k; ++k) {
      const int oc = g * p.k + k;
      for (int oh = 0; oh < geo.o_h; ++oh) {
        for (int ow = 0; ow < geo.o_w; ++ow) {
          if (op == ReductionOp::kMax) {
            uint8_t acc = args.max_seed_u8;
            for (int fh = 0; fh < p.f_h; ++fh) {
              for (int fw = 0; fw < p.f_w; ++fw) {
                for (int fc = 0; fc < p.f_c; ++fc) {
                  const int ih = oh * p.s_h + fh - p.pad_top;
                  const int iw = ow * p.s_w + fw - p.pad_left;
                  const int ic = g * p.s_c + fc;
                  const uint8_t v = read_padded(input, ih, iw, ic, pad_fill);
                  acc = v > acc ? v : acc;
                }
              }
            }
            out.at(oh, ow, oc) = acc;
          } else {
            int32_t acc = 0;
            for (int fh = 0; fh < p.f_h; ++fh) {
              for (int fw = 0; fw < p.f_w; ++fw) {
                for (int fc = 0; fc < p.f_c; ++fc) {
                  const int ih = oh * p.s_h + fh - p.pad_top;
                  const int iw = ow * p.s_w + fw - p.pad_left;
                  const int ic = g * p.s_c + fc;
                  const int32_t v = read_padded(input, ih, iw, ic, pad_fill);
                  const int32_t w =
                      weights[weight_index(p, g, k, fc, fh, fw)];
                  acc += (v - in_q.zero_point) * (w - w_q.zero_point);
                }
              }
            }
            out.at(oh, ow, oc) = requantize_acc(acc, factor, out_q.zero_point);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace uninest
