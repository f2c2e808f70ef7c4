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
#ifndef UNINEST_TESTS_TEST_UTIL_HPP_
#define UNINEST_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "uninest/loop_nest.hpp"
#include "uninest/oracle.hpp"
#include "uninest/packing.hpp"
#include "uninest/shape.hpp"
#include "uninest/tensor.hpp"
#include "uninest/weight_gen.hpp"

namespace uninest::testing {

inline PlainTensor<float> random_tensor(Lcg64& rng, int h, int w, int c,
                                        float lo = -1.0f, float hi = 1.0f) {
  PlainTensor<float> t(h, w, c);
  for (auto& v : t.data) v = lo + (rng.next_float() + 0.5f) * (hi - lo);
  return t;
}

inline PlainTensor<uint8_t> random_tensor_u8(Lcg64& rng, int h, int w, int c) {
  PlainTensor<uint8_t> t(h, w, c);
  for (auto& v : t.data) v = rng.next_u8();
  return t;
}

inline std::vector<float> random_weights(Lcg64& rng, size_t n) {
  std::vector<float> w(n);
  for (auto& v : w) v = rng.next_float();
  return w;
}

inline int rand_in(Lcg64& rng, int lo, int hi) { // inclusive
  return lo + static_cast<int>(rng.next() % static_cast<uint64_t>(hi - lo + 1));
}

// Max |a-b| / max(1, |b|) over all elements.
inline double max_rel_err(const PlainTensor<float>& a,
                          const PlainTensor<float>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double diff = std::fabs(double(a.data[i]) - double(b.data[i]));
    const double mag = std::max(1.0, std::fabs(double(b.data[i])));
    worst = std::max(worst, diff / mag);
  }
  return worst;
}

inline bool bit_equal(const PlainTensor<float>& a,
                      const PlainTensor<float>& b) {
  if (a.data.size() != b.data.size()) return false;
  for (size_t i = 0; i < a.data.size(); ++i) {
    if (a.data[i] != b.data[i]) return false;
  }
  return true;
}

// A randomized layer case: parameters, input, and logical weights.
struct LayerCase {
  LayerParams p;
  ReductionOp op = ReductionOp::kFma;
  OpArgs args;
  PlainTensor<float> input;
  PlainTensor<float> second;
  bool has_second = false;
  std::vector<float> weights;
};

// Draws a random case for the given layer class. Shapes stay small so the
// randomized suites run in seconds.
inline LayerCase random_case(Lcg64& rng, LayerClass cls) {
  LayerCase c;
  LayerParams& p = c.p;
  int h = rand_in(rng, 3, 12);
  int w = rand_in(rng, 3, 12);
  int ch = rand_in(rng, 1, 40);
  switch (cls) {
    case LayerClass::kSingleElement: {
      // relu, add, affine, upsample, or a 1x1x1-window FMA
      const int pick = rand_in(rng, 0, 4);
      if (pick == 0) {
        c.op = ReductionOp::kMax;
        c.args.max_seed = 0.0f; // relu
      } else if (pick == 1) {
        c.op = ReductionOp::kPointwiseFmaBinary;
        c.args.mode = PointwiseMode::kAdd;
        c.has_second = true;
      } else if (pick == 2) {
        c.op = ReductionOp::kPointwiseFmaBinary;
        c.args.mode = PointwiseMode::kAffine;
      } else if (pick == 3) {
        c.op = ReductionOp::kUpsampleNearest;
        c.args.upsample_scale = rand_in(rng, 1, 3);
      } else {
        c.op = ReductionOp::kFma; // per-channel scaling conv
      }
      break;
    }
    case LayerClass::kSingleChannel: {
      p.f_h = rand_in(rng, 1, std::min(4, h));
      p.f_w = rand_in(rng, 1, std::min(4, w));
      if (p.f_h == 1 && p.f_w == 1) p.f_h = 2;
      p.s_h = rand_in(rng, 1, 2);
      p.s_w = rand_in(rng, 1, 2);
      c.op = rand_in(rng, 0, 1) ? ReductionOp::kMax : ReductionOp::kFma;
      if (rand_in(rng, 0, 3) == 0) {
        p.pad_top = p.pad_bottom = p.pad_left = p.pad_right = 1;
      }
      break;
    }
    case LayerClass::kPartialChannel: {
      // group reductions, sometimes with overlapping windows (S_C < F_C)
      p.f_h = rand_in(rng, 2, std::min(3, h));
      p.f_w = rand_in(rng, 2, std::min(3, w));
      p.f_c = rand_in(rng, 2, 6);
      const bool disjoint = rand_in(rng, 0, 1) == 1;
      p.s_c = disjoint ? p.f_c : rand_in(rng, 1, p.f_c);
      const int groups = rand_in(rng, 2, 4);
      ch = (groups - 1) * p.s_c + p.f_c;
      p.k = rand_in(rng, 1, 20);
      c.op = ReductionOp::kFma;
      break;
    }
    case LayerClass::kFullChannel: {
      h = rand_in(rng, 4, 12);
      w = rand_in(rng, 4, 12);
      p.f_h = rand_in(rng, 1, 3);
      p.f_w = rand_in(rng, 1, 3);
      p.f_c = ch;
      p.s_h = rand_in(rng, 1, 2);
      p.s_w = rand_in(rng, 1, 2);
      p.k = rand_in(rng, 1, 40);
      c.op = ReductionOp::kFma;
      if (p.f_h > 1 && rand_in(rng, 0, 2) == 0) {
        p.pad_top = p.pad_bottom = p.pad_left = p.pad_right = 1;
      }
      // keep it a strict FullChannel row, not Full
      if (p.f_h == h && p.f_w == w) p.f_h = 1;
      break;
    }
    case LayerClass::kFull: {
      h = rand_in(rng, 1, 5);
      w = rand_in(rng, 1, 5);
      ch = rand_in(rng, 1, 24);
      p.f_h = h;
      p.f_w = w;
      p.f_c = ch;
      p.k = rand_in(rng, 1, 40);
      c.op = ReductionOp::kFma;
      break;
    }
  }
  c.input = random_tensor(rng, h, w, ch);
  if (c.has_second) c.second = random_tensor(rng, h, w, ch);

  const OutputGeometry geo = output_shape(p, h, w, ch);
  if (c.op == ReductionOp::kFma) {
    c.weights = random_weights(
        rng, static_cast<size_t>(geo.groups) * p.k * p.f_c * p.f_h * p.f_w);
  } else if (c.op == ReductionOp::kPointwiseFmaBinary &&
             c.args.mode == PointwiseMode::kAffine) {
    c.weights = random_weights(rng, 2 * static_cast<size_t>(ch));
  }
  return c;
}

inline PlainTensor<float> run_case(const LayerCase& c, int threads = 1,
                                   bool vectorized = true) {
  return run_layer_plain(c.p, c.op, c.args, c.input, c.weights,
                         c.has_second ? &c.second : nullptr, threads,
                         vectorized);
}

inline PlainTensor<float> oracle_case(const LayerCase& c) {
  const float fill = c.op == ReductionOp::kMax
                         ? -std::numeric_limits<float>::infinity()
                         : 0.0f;
  return oracle_layer(c.p, c.op, c.args, c.input, c.weights,
                      c.has_second ? &c.second : nullptr, fill);
}

}  // namespace uninest::testing

#endif  // UNINEST_TESTS_TEST_UTIL_HPP_
