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
#include "uninest/loop_nest.hpp"

#include <algorithm>
#include <functional>

#include "uninest/packing.hpp"
#include "uninest/parallel.hpp"

namespace uninest {
namespace {

enum class Route {
  kFmaBroadcast,
  kFmaLanewise,
  kMax,
  kPointwiseAdd,
  kAffine,
  kUpsample,
  kGeneric,
};

KernelTag route_tag(Route r) {
  switch (r) {
    case Route::kFmaBroadcast: return KernelTag::kFmaBroadcast;
    case Route::kFmaLanewise: return KernelTag::kFmaLanewise;
    case Route::kMax: return KernelTag::kMaxLanewise;
    case Route::kPointwiseAdd: return KernelTag::kPointwiseAdd;
    case Route::kAffine: return KernelTag::kAffine;
    case Route::kUpsample: return KernelTag::kUpsample;
    case Route::kGeneric: return KernelTag::kGeneric;
  }
  return KernelTag::kNone;
}

bool lane_mapped(const LayerParams& p) {
  return p.f_c == 1 && p.s_c == 1 && p.k == 1;
}

struct DriverCtx {
  const LayerParams* p;
  ReductionOp op;
  const OpArgs* args;
  const BlockedTensor<float>* in;
  const PackedWeights<float>* w;
  const BlockedTensor<float>* second;
  AffineVectors affine;
  const KernelConfig* cfg;
  BlockedTensor<float>* out;
  Route route;
  bool vectorized;
  OutputGeometry geo;
};

// Generic reference kernel: full per-lane addressing. The only kernel that
// serves arbitrary channel windows (overlapping groups, K not aligned to the
// channel block). Reference implementation only.
void generic_kernel(const DriverCtx& c, int b, int i0, int live_f, int j,
                    int l, int width, bool first) {
  const LayerParams& p = *c.p;
  const int c_b = c.out->block;
  const int o_c = c.geo.o_c;
  const int live_out = std::min(c_b, o_c - b * c_b);
  float acc[256];
  for (int ll = 0; ll < width; ++ll) {
    for (int lane = 0; lane < live_out; ++lane) {
      float v;
      if (first) {
        v = c.op == ReductionOp::kMax ? c.args->max_seed : 0.0f;
      } else {
        v = c.out->at(j, l + ll, b * c_b + lane);
      }
      acc[ll * c_b + lane] = v;
    }
  }
  for (int x = 0; x < p.f_h; ++x) {
    for (int y = 0; y < p.f_w; ++y) {
      for (int ii = 0; ii < live_f; ++ii) {
        for (int ll = 0; ll < width; ++ll) {
          const int row = j * p.s_h + x;
          const int col = (l + ll) * p.s_w + y;
          for (int lane = 0; lane < live_out; ++lane) {
            const int oc = b * c_b + lane;
            const int g = oc / p.k;
            const int k = oc % p.k;
            const int ch = g * p.s_c + i0 + ii;
            const float in = c.in->at(row, col, ch);
            float& v = acc[ll * c_b + lane];
            if (c.op == ReductionOp::kMax) {
              v = in > v ? in : v;
            } else {
              v += in * c.w->data[c.w->index(g, k, i0 + ii, x, y)];
            }
          }
        }
      }
    }
  }
  for (int ll = 0; ll < width; ++ll) {
    float* outp = c.out->lane_ptr(b, j, l + ll);
    for (int lane = 0; lane < live_out; ++lane) outp[lane] = acc[ll * c_b + lane];
    for (int lane = live_out; lane < c_b; ++lane) outp[lane] = 0.0f;
  }
}

void run_block(const DriverCtx& c, int b, long long* macs) {
  const LayerParams& p = *c.p;
  const BlockedTensor<float>& in = *c.in;
  BlockedTensor<float>& out = *c.out;
  const int c_b = out.block;
  const int o_h = out.height;
  const int o_w = out.width;
  const int o_wb = c.cfg->o_wb;
  const int live_out = std::min(c_b, out.channels - b * c_b);
  const size_t in_row_stride = static_cast<size_t>(in.width) * c_b;

  switch (c.route) {
    case Route::kFmaBroadcast: {
      const int g = (b * c_b) / p.k;
      const int cbase0 = g * p.s_c;
      const int in_block = c.w->in_block;
      bool first = true;
      for (int i = 0; i < p.f_c;) {
        const int ch = cbase0 + i;
        const int live_f = std::min({p.f_c - i, c_b - ch % c_b,
                                     in_block - i % in_block});
        FmaBroadcastArgs a;
        a.c_b = c_b;
        a.f_h = p.f_h;
        a.f_w = p.f_w;
        a.live_f = live_f;
        a.in_lane0 = ch % c_b;
        a.in_row_stride = static_cast<int>(in_row_stride);
        a.s_w = p.s_w;
        a.w_in_block = in_block;
        a.first = first;
        a.live_out = live_out;
        const float* w_tile = c.w->tile(b, i / in_block) +
                              static_cast<size_t>(i % in_block) * c_b;
        const int ib = ch / c_b;
        for (int j = 0; j < o_h; ++j) {
          const float* in_row = in.lane_ptr(ib, j * p.s_h, 0);
          float* out_row = out.lane_ptr(b, j, 0);
          for (int l = 0; l < o_w; l += o_wb) {
            a.width = std::min(o_wb, o_w - l);
            a.out = out_row + static_cast<size_t>(l) * c_b;
            a.in = in_row + static_cast<size_t>(l) * p.s_w * c_b;
            a.w = w_tile;
            if (c.vectorized) {
              fma_broadcast_vector(a);
            } else {
              fma_broadcast_reference(a);
            }
          }
        }
        if (macs) {
          *macs += static_cast<long long>(live_out) * o_h * o_w * p.f_h *
                   p.f_w * live_f;
        }
        i += live_f;
        first = false;
      }
      break;
    }
    case Route::kFmaLanewise:
    case Route::kMax: {
      LanewiseArgs a;
      a.c_b = c_b;
      a.f_h = p.f_h;
      a.f_w = p.f_w;
      a.in_row_stride = static_cast<int>(in_row_stride);
      a.s_w = p.s_w;
      a.first = true;
      a.seed = c.args->max_seed;
      a.live_out = live_out;
      const float* w_tile =
          c.route == Route::kFmaLanewise ? c.w->tile(b, 0) : nullptr;
      for (int j = 0; j < o_h; ++j) {
        const float* in_row = in.lane_ptr(b, j * p.s_h, 0);
        float* out_row = out.lane_ptr(b, j, 0);
        for (int l = 0; l < o_w; l += o_wb) {
          a.width = std::min(o_wb, o_w - l);
          a.out = out_row + static_cast<size_t>(l) * c_b;
          a.in = in_row + static_cast<size_t>(l) * p.s_w * c_b;
          a.w = w_tile;
          if (c.route == Route::kFmaLanewise) {
            if (c.vectorized) {
              fma_lanewise_vector(a);
            } else {
              fma_lanewise_reference(a);
            }
          } else {
            if (c.vectorized) {
              max_lanewise_vector(a);
            } else {
              max_lanewise_reference(a);
            }
          }
        }
      }
      if (macs && c.route == Route::kFmaLanewise) {
        *macs += static_cast<long long>(live_out) * o_h * o_w * p.f_h * p.f_w;
      }
      break;
    }
    case Route::kPointwiseAdd:
    case Route::kAffine: {
      PointwiseArgs a;
      a.c_b = c_b;
      a.live_out = live_out;
      if (c.route == Route::kAffine) {
        a.scale = c.affine.scale + static_cast<size_t>(b) * c_b;
        a.shift = c.affine.shift + static_cast<size_t>(b) * c_b;
      }
      for (int j = 0; j < o_h; ++j) {
        const float* in_row = in.lane_ptr(b, j, 0);
        float* out_row = out.lane_ptr(b, j, 0);
        const float* second_row =
            c.second ? c.second->lane_ptr(b, j, 0) : nullptr;
        for (int l = 0; l < o_w; l += o_wb) {
          a.width = std::min(o_wb, o_w - l);
          a.out = out_row + static_cast<size_t>(l) * c_b;
          a.in = in_row + static_cast<size_t>(l) * c_b;
          a.second = second_row ? second_row + static_cast<size_t>(l) * c_b
                                : nullptr;
          if (c.route == Route::kPointwiseAdd) {
            if (c.vectorized) {
              pointwise_add_vector(a);
            } else {
              pointwise_add_reference(a);
            }
          } else {
            if (c.vectorized) {
              affine_vector(a);
            } else {
              affine_reference(a);
            }
          }
        }
      }
      if (macs && c.route == Route::kAffine) {
        *macs += static_cast<long long>(live_out) * o_h * o_w;
      }
      break;
    }
    case Route::kUpsample: {
      UpsampleArgs a;
      a.c_b = c_b;
      a.scale = c.args->upsample_scale;
      a.live_out = live_out;
      for (int j = 0; j < o_h; ++j) {
        a.in_row = in.lane_ptr(b, j / a.scale, 0);
        float* out_row = out.lane_ptr(b, j, 0);
        for (int l = 0; l < o_w; l += o_wb) {
          a.width = std::min(o_wb, o_w - l);
          a.l0 = l;
          a.out = out_row + static_cast<size_t>(l) * c_b;
          if (c.vectorized) {
            upsample_vector(a);
          } else {
            upsample_reference(a);
          }
        }
      }
      break;
    }
    case Route::kGeneric: {
      const int f_cb = c.w ? c.w->in_block : 1;
      bool first = true;
      for (int i = 0; i < p.f_c;) {
        const int live_f = std::min(f_cb - i % f_cb, p.f_c - i);
        for (int j = 0; j < o_h; ++j) {
          for (int l = 0; l < o_w; l += o_wb) {
            const int width = std::min(o_wb, o_w - l);
            generic_kernel(c, b, i, live_f, j, l, width, first);
          }
        }
        if (macs && c.op == ReductionOp::kFma) {
          *macs += static_cast<long long>(live_out) * o_h * o_w * p.f_h *
                   p.f_w * live_f;
        }
        i += live_f;
        first = false;
      }
      break;
    }
  }
}

Route pick_route(const LayerParams& p, ReductionOp op, const OpArgs& args,
                 const OutputGeometry& geo, int c_b) {
  switch (op) {
    case ReductionOp::kUpsampleNearest:
      return Route::kUpsample;
    case ReductionOp::kPointwiseFmaBinary:
      return args.mode == PointwiseMode::kAdd ? Route::kPointwiseAdd
                                              : Route::kAffine;
    case ReductionOp::kMax:
      return lane_mapped(p) ? Route::kMax : Route::kGeneric;
    case ReductionOp::kFma:
      if (lane_mapped(p)) return Route::kFmaLanewise;
      if (geo.groups == 1 || p.k % c_b == 0) return Route::kFmaBroadcast;
      return Route::kGeneric;
  }
  return Route::kGeneric;
}

void check_contracts(const DriverCtx& c) {
  const LayerParams& p = *c.p;
  if (p.has_padding()) {
    throw ContractError("run_layer expects materialized padding");
  }
  if (c.in->block != c.out->block) {
    throw ContractError("input and output channel blocks differ");
  }
  validate_config(*c.cfg, c.out->block);
  if (c.op == ReductionOp::kUpsampleNearest) {
    const int s = c.args->upsample_scale;
    if (s < 1) throw ContractError("upsample scale must be >= 1");
    if (c.out->height != c.in->height * s || c.out->width != c.in->width * s ||
        c.out->channels != c.in->channels) {
      throw ContractError("upsample output shape mismatch");
    }
    if (c.w) throw ContractError("upsample takes no weights");
    return;
  }
  if (c.geo.o_h != c.out->height || c.geo.o_w != c.out->width ||
      c.geo.o_c != c.out->channels) {
    throw ContractError("output tensor does not match output_shape");
  }
  switch (c.op) {
    case ReductionOp::kFma: {
      if (!c.w) throw ContractError("FMA layer requires weights");
      const PackedWeights<float>& w = *c.w;
      if (w.groups != c.geo.groups || w.filters_per_group != p.k ||
          w.filter_channels != p.f_c || w.filter_height != p.f_h ||
          w.filter_width != p.f_w) {
        throw ContractError("packed weights do not match layer parameters");
      }
      if (w.out_block != c.out->block || w.in_block != c.cfg->f_cb) {
        throw ContractError("packed weight tiling does not match config");
      }
      break;
    }
    case ReductionOp::kMax:
      if (c.w) throw ContractError("max layer takes no weights");
      break;
    case ReductionOp::kPointwiseFmaBinary: {
      if (p.f_h != 1 || p.f_w != 1 || p.f_c != 1 || p.s_h != 1 ||
          p.s_w != 1 || p.s_c != 1 || p.k != 1) {
        throw ContractError("pointwise binary layer requires a 1x1x1 window");
      }
      if (c.args->mode == PointwiseMode::kAdd) {
        if (!c.second) throw ContractError("pointwise add requires a second input");
        if (c.second->height != c.out->height ||
            c.second->width != c.out->width ||
            c.second->channels != c.out->channels) {
          throw ContractError("second input shape mismatch");
        }
      } else if (!c.affine.scale || !c.affine.shift) {
        throw ContractError("affine layer requires scale and shift vectors");
      }
      break;
    }
    default:
      break;
  }
}

}  // namespace

void run_layer(const LayerParams& p, ReductionOp op, const OpArgs& args,
               const BlockedTensor<float>& input,
               const PackedWeights<float>* weights,
               const BlockedTensor<float>* second, const AffineVectors* affine,
               const KernelConfig& cfg, BlockedTensor<float>& output,
               int threads, bool prefer_vectorized) {
  DriverCtx c;
  c.p = &p;
  c.op = op;
  c.args = &args;
  c.in = &input;
  c.w = weights;
  c.second = second;
  if (affine) c.affine = *affine;
  c.cfg = &cfg;
  c.out = &output;
  if (op != ReductionOp::kUpsampleNearest) {
    c.geo = output_shape(p, input.height, input.width, input.channels);
  } else {
    c.geo.o_h = output.height;
    c.geo.o_w = output.width;
    c.geo.o_c = output.channels;
    c.geo.groups = output.channels;
  }
  c.route = pick_route(p, op, args, c.geo, output.block);
  check_contracts(c);
  const KernelVariant variant = select_kernel(
      op, cfg.o_wb, prefer_vectorized, c.route == Route::kGeneric);
  c.vectorized = variant.vectorized;

  counters().driver_entries.fetch_add(1, std::memory_order_relaxed);
  counters().last_tag = route_tag(c.route);
  const bool count_macs = counters().count_macs;

  const int blocks = output.block_count();
  const int p_avail = blocks;
  const int workers = std::max(1, std::min(p_avail, threads));
  const std::function<void(int)> body = [&](int t) {
    const int lo = static_cast<int>(static_cast<long long>(blocks) * t / workers);
    const int hi =
        static_cast<int>(static_cast<long long>(blocks) * (t + 1) / workers);
    long long macs = 0;
    for (int b = lo; b < hi; ++b) run_block(c, b, count_macs ? &macs : nullptr);
    if (count_macs) counters().fma_macs.fetch_add(macs, std::memory_order_relaxed);
  };
  parallel_run(workers, body);
}

PlainTensor<float> run_layer_plain(const LayerParams& p, ReductionOp op,
                                   const OpArgs& args,
                                   const PlainTensor<float>& input,
                                   const std::vector<float>& weights,
                                   const PlainTensor<float>* second,
                                   int threads, bool prefer_vectorized,
                                   int channel_block) {
  const int c_b = channel_block;
  BlockedTensor<float> in = pack_activations(input, c_b);
  if (p.has_padding()) {
    const float fill = op == ReductionOp::kMax
                           ? -std::numeric_limits<float>::infinity()
                           : 0.0f;
    in = pad_spatial(in, p.pad_top, p.pad_bottom, p.pad_left, p.pad_right,
                     fill);
  }
  LayerParams rp = p;
  rp.pad_top = rp.pad_bottom = rp.pad_left = rp.pad_right = 0;

  OutputGeometry geo;
  if (op == ReductionOp::kUpsampleNearest) {
    geo.o_h = input.height * args.upsample_scale;
    geo.o_w = input.width * args.upsample_scale;
    geo.o_c = input.channels;
    geo.groups = input.channels;
  } else {
    geo = output_shape(p, input.height, input.width, input.channels);
  }
  BlockedTensor<float> out(geo.o_h, geo.o_w, geo.o_c, c_b);

  const LayerClass cls = classify(p, input.height, input.width,
                                  input.channels);
  const KernelConfig cfg = default_config(cls, p, geo.groups, c_b);

  PackedWeights<float> packed;
  const PackedWeights<float>* wptr = nullptr;
  std::vector<float> scale_pad, shift_pad;
  AffineVectors affine;
  const AffineVectors* affine_ptr = nullptr;
  if (op == ReductionOp::kFma) {
    packed = pack_weights(weights, geo.groups, p.k, p.f_c, p.f_h, p.f_w, c_b,
                          cfg.f_cb);
    wptr = &packed;
  } else if (op == ReductionOp::kPointwiseFmaBinary &&
             args.mode == PointwiseMode::kAffine) {
    const int padded = round_up(input.channels, c_b);
    scale_pad.assign(padded, 0.0f);
    shift_pad.assign(padded, 0.0f);
    for (int c = 0; c < input.channels; ++c) {
      scale_pad[c] = weights[c];
      shift_pad[c] = weights[input.channels + c];
    }
    affine.scale = scale_pad.data();
    affine.shift = shift_pad.data();
    affine_ptr = &affine;
  }
  BlockedTensor<float> second_blocked;
  const BlockedTensor<float>* second_ptr = nullptr;
  if (second) {
    second_blocked = pack_activations(*second, c_b);
    second_ptr = &second_blocked;
  }

  run_layer(rp, op, args, in, wptr, second_ptr, affine_ptr, cfg, out, threads,
            prefer_vectorized);
  return unpack_activations(out);
}

}  // namespace uninest
