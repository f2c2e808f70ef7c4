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
#include <doctest.h>

#include "test_util.hpp"
#include "uninest/oracle.hpp"
#include "uninest/quantized.hpp"

using namespace uninest;
using namespace uninest::testing;

namespace {

constexpr int kCb = 16;

PlainTensor<uint8_t> run_quant_fma(const LayerParams& p,
                                   const PlainTensor<uint8_t>& in,
                                   const std::vector<uint8_t>& w,
                                   const QuantParams& in_q,
                                   const QuantParams& w_q,
                                   const QuantParams& out_q, int threads = 1) {
  const auto geo = output_shape(p, in.height, in.width, in.channels);
  BlockedTensor<uint8_t> bin = pack_activations(in, kCb);
  BlockedTensor<uint8_t> out(geo.o_h, geo.o_w, geo.o_c, kCb);
  const auto cls = classify(p, in.height, in.width, in.channels);
  const auto cfg = default_config(cls, p, geo.groups, kCb);
  QuantLayerOperands ops;
  PackedWeights<uint8_t> pw = pack_weights(w, geo.groups, p.k, p.f_c, p.f_h,
                                           p.f_w, kCb, cfg.f_cb);
  ops.weights = &pw;
  ops.in_q = in_q;
  ops.w_q = w_q;
  ops.out_q = out_q;
  run_layer_quantized(p, ReductionOp::kFma, OpArgs{}, bin, ops, cfg, out,
                      threads);
  return unpack_activations(out);
}

}  // namespace

TEST_CASE("quantize / dequantize round-trips representable values") {
  QuantParams q{0.25, 10};
  CHECK(quantize_value(0.0f, QuantParams{1.0, 0}) == 0);
  for (int v = 0; v <= 255; ++v) {
    const float x = dequantize_value(static_cast<uint8_t>(v), q);
    CHECK(quantize_value(x, q) == v);
  }
}

TEST_CASE("quantize saturates out-of-range values") {
  QuantParams q{1.0, 0};
  CHECK(quantize_value(300.0f, q) == 255);
  CHECK(quantize_value(-5.0f, q) == 0);
  QuantParams q2{0.5, 200};
  CHECK(quantize_value(100.0f, q2) == 255); // 200 + 200 clamps
}

TEST_CASE("rounding is half away from zero") {
  CHECK(round_half_away(2.5) == 3);
  CHECK(round_half_away(-2.5) == -3);
  CHECK(round_half_away(2.4) == 2);
  CHECK(round_half_away(-2.4) == -2);
}

TEST_CASE("all-zero input with zero zero-points gives zero output") {
  PlainTensor<uint8_t> in(3, 3, 4); // zeros
  LayerParams p;
  p.f_h = p.f_w = 3;
  p.f_c = 4;
  p.k = 5;
  const std::vector<uint8_t> w(5 * 4 * 9, 0);
  QuantParams unit{1.0, 0};
  const auto out = run_quant_fma(p, in, w, unit, unit, unit);
  for (auto v : out.data) CHECK(v == 0);
}

TEST_CASE("1x1 unit-weight conv with unit scales is the identity on uint8") {
  Lcg64 rng(61);
  const auto in = random_tensor_u8(rng, 4, 4, 9);
  LayerParams p;
  p.f_c = 9;
  p.k = 9;
  QuantParams unit{1.0, 0};
  std::vector<uint8_t> w(9 * 9, 0);
  for (int k = 0; k < 9; ++k) w[k * 9 + k] = 1;
  const auto out = run_quant_fma(p, in, w, unit, unit, unit);
  CHECK(out.data == in.data);
}

TEST_CASE("random quantized conv is bit-exact against the integer oracle") {
  Lcg64 rng(62);
  for (int rep = 0; rep < 40; ++rep) {
    const int h = rand_in(rng, 3, 9);
    const int w = rand_in(rng, 3, 9);
    const int c = rand_in(rng, 1, 24);
    LayerParams p;
    p.f_h = rand_in(rng, 1, 3);
    p.f_w = rand_in(rng, 1, 3);
    p.f_c = c;
    p.s_h = rand_in(rng, 1, 2);
    p.s_w = rand_in(rng, 1, 2);
    p.k = rand_in(rng, 1, 20);
    if (p.f_h > h) p.f_h = h;
    if (p.f_w > w) p.f_w = w;
    const auto in = random_tensor_u8(rng, h, w, c);
    std::vector<uint8_t> wts(static_cast<size_t>(p.k) * c * p.f_h * p.f_w);
    for (auto& v : wts) v = rng.next_u8();
    QuantParams in_q{1.0 / 32, 128}, w_q{1.0 / 128, 128}, out_q{1.0 / 16, 100};
    const auto got = run_quant_fma(p, in, wts, in_q, w_q, out_q);
    const auto want = oracle_layer_quantized(p, ReductionOp::kFma, OpArgs{},
                                             in, wts, in_q, w_q, out_q);
    REQUIRE(got.data.size() == want.data.size());
    CHECK(got.data == want.data);
  }
}

TEST_CASE("quantized max pooling and relu are bit-exact vs the oracle") {
  Lcg64 rng(63);
  const auto in = random_tensor_u8(rng, 8, 8, 21);
  LayerParams pool;
  pool.f_h = pool.f_w = 2;
  pool.s_h = pool.s_w = 2;
  OpArgs args;
  args.max_seed_u8 = 0;
  BlockedTensor<uint8_t> bin = pack_activations(in, kCb);
  BlockedTensor<uint8_t> out(4, 4, 21, kCb);
  QuantLayerOperands ops;
  const auto cfg = default_config(LayerClass::kSingleChannel, pool, 21, kCb);
  run_layer_quantized(pool, ReductionOp::kMax, args, bin, ops, cfg, out, 2);
  const auto got = unpack_activations(out);
  const auto want = oracle_layer_quantized(pool, ReductionOp::kMax, args, in,
                                           {}, ops.in_q, ops.w_q, ops.out_q);
  CHECK(got.data == want.data);
}

TEST_CASE("padded quantized max pooling matches the oracle") {
  // Spatial padding on the uint8 max path fills with 0 (the uint8 minimum),
  // so padded cells never win; engine and oracle agree bitwise.
  Lcg64 rng(65);
  const auto in = random_tensor_u8(rng, 5, 5, 7);
  LayerParams p;
  p.f_h = p.f_w = 3;
  p.s_h = p.s_w = 2;
  p.pad_top = p.pad_bottom = p.pad_left = p.pad_right = 1;
  OpArgs args;
  args.max_seed_u8 = 0;

  auto bin = pack_activations(in, kCb);
  auto padded = pad_spatial(bin, 1, 1, 1, 1, static_cast<uint8_t>(0));
  LayerParams rp = p;
  rp.pad_top = rp.pad_bottom = rp.pad_left = rp.pad_right = 0;
  const auto geo = output_shape(p, 5, 5, 7);
  BlockedTensor<uint8_t> out(geo.o_h, geo.o_w, geo.o_c, kCb);
  QuantLayerOperands ops;
  const auto cfg = default_config(LayerClass::kSingleChannel, rp, 7, kCb);
  run_layer_quantized(rp, ReductionOp::kMax, args, padded, ops, cfg, out, 2);
  const auto got = unpack_activations(out);
  const auto want = oracle_layer_quantized(p, ReductionOp::kMax, args, in, {},
                                           ops.in_q, ops.w_q, ops.out_q,
                                           nullptr, nullptr, 0);
  CHECK(got.data == want.data);
}

TEST_CASE("quantized inference is identical across thread counts") {
  Lcg64 rng(64);
  const auto in = random_tensor_u8(rng, 6, 6, 40);
  LayerParams p;
  p.f_h = p.f_w = 3;
  p.f_c = 40;
  p.k = 48;
  std::vector<uint8_t> w(static_cast<size_t>(48) * 40 * 9);
  for (auto& v : w) v = rng.next_u8();
  QuantParams in_q{1.0 / 32, 128}, w_q{1.0 / 128, 128}, out_q{1.0 / 16, 100};
  const auto a = run_quant_fma(p, in, w, in_q, w_q, out_q, 1);
  const auto b = run_quant_fma(p, in, w, in_q, w_q, out_q, 4);
  CHECK(a.data == b.data);
}

TEST_CASE("overflow-risk windows are rejected at the contract boundary") {
  LayerParams p;
  p.f_h = 200;
  p.f_w = 200;
  p.f_c = 1; // 40,000-element window
  CHECK(!quantized_window_fits_int32(p));
  BlockedTensor<uint8_t> in(200, 200, 1, kCb);
  BlockedTensor<uint8_t> out(1, 1, 1, kCb);
  PackedWeights<uint8_t> w =
      pack_weights(std::vector<uint8_t>(40000, 1), 1, 1, 1, 200, 200, kCb, 1);
  QuantLayerOperands ops;
  ops.weights = &w;
  KernelConfig cfg = default_config(LayerClass::kSingleChannel, p, 1, kCb);
  CHECK_THROWS_AS(
      run_layer_quantized(p, ReductionOp::kFma, OpArgs{}, in, ops, cfg, out, 1),
      ContractError);
  LayerParams ok;
  ok.f_h = 3;
  ok.f_w = 3;
  ok.f_c = 512;
  CHECK(quantized_window_fits_int32(ok));
}
