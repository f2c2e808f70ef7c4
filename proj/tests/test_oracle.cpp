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

using namespace uninest;
using namespace uninest::testing;

TEST_CASE("hand-computed 1x1 conv: [[1,2],[3,4]] scaled by 2") {
  PlainTensor<float> in(2, 2, 1);
  in.data = {1, 2, 3, 4};
  LayerParams p; // 1x1x1, K=1
  const auto out = oracle_layer(p, ReductionOp::kFma, OpArgs{}, in, {2.0f});
  REQUIRE(out.data.size() == 4);
  CHECK(out.data[0] == 2.0f);
  CHECK(out.data[1] == 4.0f);
  CHECK(out.data[2] == 6.0f);
  CHECK(out.data[3] == 8.0f);
}

TEST_CASE("full reduction with all-ones weights sums the input") {
  Lcg64 rng(21);
  const auto in = random_tensor(rng, 1, 1, 17);
  LayerParams p;
  p.f_c = 17;
  const std::vector<float> ones(17, 1.0f);
  const auto out = oracle_layer(p, ReductionOp::kFma, OpArgs{}, in, ones);
  double sum = 0;
  for (float v : in.data) sum += v;
  REQUIRE(out.data.size() == 1);
  CHECK(out.data[0] == doctest::Approx(sum).epsilon(1e-6));
}

TEST_CASE("depthwise with a unit center tap is the identity") {
  Lcg64 rng(22);
  const auto in = random_tensor(rng, 6, 6, 5);
  LayerParams p;
  p.f_h = p.f_w = 3;
  p.pad_top = p.pad_bottom = p.pad_left = p.pad_right = 1;
  std::vector<float> w(5 * 9, 0.0f);
  for (int g = 0; g < 5; ++g) w[g * 9 + 4] = 1.0f; // center of each 3x3 tap
  const auto out = oracle_layer(p, ReductionOp::kFma, OpArgs{}, in, w);
  REQUIRE(out.data.size() == in.data.size());
  CHECK(bit_equal(out, in));
}

TEST_CASE("full-channel 1x1 oracle equals the fully-connected oracle") {
  // Self-consistency: a 1x1 conv over a 1x1 spatial grid is a matrix-vector
  // product, i.e. a full reduction on the reshaped input.
  Lcg64 rng(23);
  const int C = 19, K = 7;
  const auto in = random_tensor(rng, 1, 1, C);
  const auto w = random_weights(rng, static_cast<size_t>(K) * C);
  LayerParams conv;
  conv.f_c = C;
  conv.k = K;
  LayerParams fc;
  fc.f_h = 1;
  fc.f_w = 1;
  fc.f_c = C;
  fc.k = K;
  const auto a = oracle_layer(conv, ReductionOp::kFma, OpArgs{}, in, w);
  const auto b = oracle_layer(fc, ReductionOp::kFma, OpArgs{}, in, w);
  CHECK(bit_equal(a, b));
}

TEST_CASE("max pooling oracle on a 3x3 grid") {
  PlainTensor<float> in(3, 3, 1);
  in.data = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  LayerParams p;
  p.f_h = p.f_w = 3;
  OpArgs args;
  const auto out = oracle_layer(p, ReductionOp::kMax, args, in, {});
  REQUIRE(out.data.size() == 1);
  CHECK(out.data[0] == 9.0f);
}

TEST_CASE("relu oracle clamps negatives") {
  PlainTensor<float> in(1, 1, 2);
  in.data = {-3.0f, 5.0f};
  LayerParams p;
  OpArgs args;
  args.max_seed = 0.0f;
  const auto out = oracle_layer(p, ReductionOp::kMax, args, in, {});
  CHECK(out.data[0] == 0.0f);
  CHECK(out.data[1] == 5.0f);
}

TEST_CASE("quantized oracle identity: unit weight, unit scales") {
  PlainTensor<uint8_t> in(1, 1, 1);
  in.data = {57};
  LayerParams p;
  QuantParams unit{1.0, 0};
  // weight value 1 with zero-point 0 multiplies by exactly one
  const auto out = oracle_layer_quantized(p, ReductionOp::kFma, OpArgs{}, in,
                                          {1}, unit, unit, unit);
  REQUIRE(out.data.size() == 1);
  CHECK(out.data[0] == 57);
}

TEST_CASE("quantized oracle saturates at 255") {
  PlainTensor<uint8_t> in(1, 1, 1);
  in.data = {200};
  LayerParams p;
  QuantParams unit{1.0, 0};
  QuantParams w{4.0, 0}; // weight 2 -> real weight 8 -> 1600, clamps
  const auto out = oracle_layer_quantized(p, ReductionOp::kFma, OpArgs{}, in,
                                          {2}, unit, w, unit);
  CHECK(out.data[0] == 255);
}
