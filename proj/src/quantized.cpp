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
#include "uninest/quantized.hpp"

#include <algorithm>
#include <functional>

#include "uninest/loop_nest.hpp"
#include "uninest/parallel.hpp"

namespace uninest {

PlainTensor<uint8_t> quantize(const PlainTensor<float>& t,
                              const QuantParams& q) {
  PlainTensor<uint8_t> out(t.height, t.width, t.channels);
  for (size_t i = 0; i < t.data.size(); ++i) {
    out.data[i] = quantize_value(t.data[i], q);
  }
  return out;
}

PlainTensor<float> dequantize(const PlainTensor<uint8_t>& t,
                              const QuantParams& q) {
  PlainTensor<float> out(t.height, t.width, t.channels);
  for (size_t i = 0; i < t.data.size(); ++i) {
    out.data[i] = dequantize_value(t.data[i], q);
  }
  return out;
}

bool quantized_window_fits_int32(const LayerParams& p) {
  const long long worst =
      static_cast<long long>(p.f_h) * p.f_w * p.f_c * 255 * 255;
  return worst <= 0x7fffffffLL;
}

namespace {

struct QCtx {
  const LayerParams* p;
  ReductionOp op;
  const OpArgs* args;
  const BlockedTensor<uint8_t>* in;
  const QuantLayerOperands* ops;
  BlockedTensor<uint8_t>* out;
  OutputGeometry geo;
  double fma_factor;
};

// One output-channel block: int32 accumulation over the full reduction
// window, requantize to uint8 in the STORE phase. Scalar arithmetic keeps
// the path bit-exact by construction.
void run_block_quantized(const QCtx& c, int b) {
  const LayerParams& p = *c.p;
  const BlockedTensor<uint8_t>& in = *c.in;
  BlockedTensor<uint8_t>& out = *c.out;
  const int c_b = out.block;
  const int live_out = std::min(c_b, out.channels - b * c_b);
  const int in_zp = c.ops->in_q.zero_point;
  const int w_zp = c.ops->w_q.zero_point;

  for (int j = 0; j < out.height; ++j) {
    for (int l = 0; l < out.width; ++l) {
      uint8_t* outp = out.lane_ptr(b, j, l);
      for (int lane = 0; lane < live_out; ++lane) {
        const int oc = b * c_b + lane;
        uint8_t result = 0;
        switch (c.op) {
          case ReductionOp::kUpsampleNearest: {
            const int s = c.args->upsample_scale;
            result = in.at(j / s, l / s, oc);
            break;
          }
          case ReductionOp::kPointwiseFmaBinary: {
            double real;
            if (c.args->mode == PointwiseMode::kAdd) {
              real = c.ops->in_q.scale * (in.at(j, l, oc) - in_zp) +
                     c.ops->second_q.scale *
                         (c.ops->second->at(j, l, oc) -
                          c.ops->second_q.zero_point);
            } else {
              const size_t idx = static_cast<size_t>(b) * c_b + lane;
              const double scale =
                  c.ops->w_q.scale * (c.ops->affine_scale[idx] - w_zp);
              const double shift =
                  c.ops->w_q.scale * (c.ops->affine_shift[idx] - w_zp);
              real = c.ops->in_q.scale * (in.at(j, l, oc) - in_zp) * scale +
                     shift;
            }
            result = saturate_u8(round_half_away(real / c.ops->out_q.scale) +
                                 c.ops->out_q.zero_point);
            break;
          }
          case ReductionOp::kMax: {
            const int g = oc; // K = 1 for max layers
            uint8_t acc = c.args->max_seed_u8;
            for (int x = 0; x < p.f_h; ++x) {
              for (int y = 0; y < p.f_w; ++y) {
                const uint8_t v =
                    in.at(j * p.s_h + x, l * p.s_w + y, g * p.s_c);
                acc = v > acc ? v : acc;
              }
            }
            result = acc;
            break;
          }
          case ReductionOp::kFma: {
            const int g = oc / p.k;
            const int k = oc % p.k;
            const int ch0 = g * p.s_c;
            int32_t acc = 0;
            for (int x = 0; x < p.f_h; ++x) {
              for (int y = 0; y < p.f_w; ++y) {
                for (int fc = 0; fc < p.f_c; ++fc) {
                  const int32_t v =
                      in.at(j * p.s_h + x, l * p.s_w + y, ch0 + fc);
                  const int32_t w =
                      c.ops->weights->data[c.ops->weights->index(g, k, fc, x, y)];
                  acc += (v - in_zp) * (w - w_zp);
                }
              }
            }
            result = requantize_acc(acc, c.fma_factor,
                                    c.ops->out_q.zero_point);
            break;
          }
        }
        outp[lane] = result;
      }
      for (int lane = live_out; lane < c_b; ++lane) outp[lane] = 0;
    }
  }
}

}  // namespace

void run_layer_quantized(const LayerParams& p, ReductionOp op,
                         const OpArgs& args,
                         const BlockedTensor<uint8_t>& input,
                         const QuantLayerOperands& operands,
                         const KernelConfig& cfg,
                         BlockedTensor<uint8_t>& output, int threads) {
  if (p.has_padding()) {
    throw ContractError("run_layer_quantized expects materialized padding");
  }
  if (operands.in_q.scale <= 0 || operands.w_q.scale <= 0 ||
      operands.out_q.scale <= 0) {
    throw ContractError("quantization scales must be positive");
  }
  if (op == ReductionOp::kFma && !quantized_window_fits_int32(p)) {
    throw ContractError(
        "quantized reduction window overflows the int32 accumulator");
  }
  if (op == ReductionOp::kFma && !operands.weights) {
    throw ContractError("quantized FMA layer requires weights");
  }
  validate_config(cfg, output.block);

  QCtx c;
  c.p = &p;
  c.op = op;
  c.args = &args;
  c.in = &input;
  c.ops = &operands;
  c.out = &output;
  if (op != ReductionOp::kUpsampleNearest) {
    c.geo = output_shape(p, input.height, input.width, input.channels);
    if (c.geo.o_h != output.height || c.geo.o_w != output.width ||
        c.geo.o_c != output.channels) {
      throw ContractError("output tensor does not match output_shape");
    }
  }
  c.fma_factor =
      operands.in_q.scale * operands.w_q.scale / operands.out_q.scale;

  counters().driver_entries.fetch_add(1, std::memory_order_relaxed);

  const int blocks = output.block_count();
  const int workers = std::max(1, std::min(blocks, threads));
  const std::function<void(int)> body = [&](int t) {
    const int lo = static_cast<int>(static_cast<long long>(blocks) * t / workers);
    const int hi =
        static_cast<int>(static_cast<long long>(blocks) * (t + 1) / workers);
    for (int b = lo; b < hi; ++b) run_block_quantized(c, b);
  };
  parallel_run(workers, body);
}

}  // namespace uninest
