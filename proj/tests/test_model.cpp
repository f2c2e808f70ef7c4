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

#include <cstdio>
#include <map>

#include "test_util.hpp"
#include "uninest/model.hpp"
#include "uninest/tensor_io.hpp"

using namespace uninest;
using namespace uninest::testing;

#ifndef UNINEST_CONFIG_DIR
#define UNINEST_CONFIG_DIR "configs"
#endif

namespace {

std::string cfg_path(const char* name) {
  return std::string(UNINEST_CONFIG_DIR) + "/" + name;
}

// Executes a plan layer by layer with fresh owning buffers (no arena reuse,
// nothing in place). Bitwise agreement with ModelPlan::infer shows the
// ping-pong buffer plan never lets a layer corrupt its own input.
PlainTensor<float> infer_fresh(const ModelPlan& plan,
                               const PlainTensor<float>& input, int p_max) {
  const int c_b = plan.c_b;
  BlockedTensor<float> cur = pack_activations(input, c_b);
  std::map<int, BlockedTensor<float>> slots;
  for (const PlanLayer& L : plan.layers) {
    if (L.kind == LayerKind::kCheckpoint) {
      slots[L.slot] = cur.clone();
      continue;
    }
    BlockedTensor<float> src =
        L.on_checkpoint ? slots.at(L.slot).clone() : cur.clone();
    if (L.params.has_padding()) {
      src = pad_spatial(src, L.params.pad_top, L.params.pad_bottom,
                        L.params.pad_left, L.params.pad_right, L.pad_fill);
    }
    BlockedTensor<float> out(L.out_h, L.out_w, L.out_c, c_b);
    AffineVectors affine{L.affine_scale.data(), L.affine_shift.data()};
    run_layer(L.run_params, L.op, L.args, src,
              L.op == ReductionOp::kFma ? &L.weights : nullptr,
              L.kind == LayerKind::kAdd ? &slots.at(L.slot) : nullptr,
              L.kind == LayerKind::kAffine ? &affine : nullptr, L.cfg, out,
              p_max);
    if (L.on_checkpoint) {
      slots[L.slot] = std::move(out);
    } else {
      cur = std::move(out);
    }
  }
  return unpack_activations(cur);
}

}  // namespace

TEST_CASE("shipped configs reproduce the published parameter counts") {
  CHECK(count_model_params(parse_config_file(cfg_path("resnet.cfg"))) == 77744);
  CHECK(count_model_params(parse_config_file(cfg_path("autoencoder.cfg"))) ==
        133120);
  CHECK(count_model_params(parse_config_file(cfg_path("dscnn.cfg"))) == 20288);
  CHECK(count_model_params(parse_config_file(cfg_path("mobilenet.cfg"))) ==
        3201472);
}

TEST_CASE("square-filter dscnn variant binds and runs") {
  auto plan = load_model_seeded(cfg_path("dscnn_square.cfg"), 2);
  CHECK(plan.param_count == 16512);
  PlainTensor<float> in(plan.in_h, plan.in_w, plan.in_c);
  Lcg64 rng(70);
  for (auto& v : in.data) v = rng.next_float();
  const auto out = plan.infer(in, 2);
  CHECK(out.channels == 12);
  for (float v : out.data) CHECK(std::isfinite(v));
}

TEST_CASE("empty or malformed configs are rejected") {
  CHECK_THROWS_AS(parse_config_text(""), ModelError);
  CHECK_THROWS_AS(parse_config_text("input 8 8 4\n"), ModelError);
  CHECK_THROWS_AS(parse_config_text("input 8 8 4\nwarp k3x3\n"), ModelError);
  CHECK_THROWS_AS(parse_config_text("input 8 8 4\nconv k3x3 bogus c8\n"),
                  ModelError);
  CHECK_THROWS_AS(parse_config_text("conv k3x3 c8\n"), ModelError);
}

TEST_CASE("shape-propagation failure names the first inconsistent layer") {
  const char* text =
      "input 8 8 4\n"
      "conv k3x3 s1 c8\n"   // 6x6x8
      "maxpool k9x9 s1\n";  // window exceeds 6x6
  try {
    count_model_params(parse_config_text(text));
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("layer 2") != std::string::npos);
    CHECK(msg.find("maxpool") != std::string::npos);
  }
}

TEST_CASE("weight-length mismatch reports expected vs actual") {
  const auto cfg = parse_config_text("input 1 1 8\nfc c4\n");
  std::vector<float> w(31, 0.0f); // expects 32
  std::vector<uint8_t> qw(31, 0);
  try {
    bind_model(cfg, w, qw);
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("31") != std::string::npos);
    CHECK(msg.find("32") != std::string::npos);
  }
}

TEST_CASE("single-layer identity model memory formula") {
  // float bytes = 4 * (params + (in + out) + input staging)
  const auto cfg = parse_config_text("input 1 1 16\nfc c16\n");
  auto plan = bind_model(cfg, std::vector<float>(256, 0.0f),
                         std::vector<uint8_t>(256, 0));
  const auto m = memory_report(plan, DType::kFloat32);
  CHECK(m.param_scalars == 256);
  CHECK(m.intermediate_scalars == 16 + 16);
  CHECK(m.input_scalars == 16);
  CHECK(m.total_bytes == 4 * (256 + 32 + 16));
}

TEST_CASE("memory reports are within 2% of the published table") {
  struct Row {
    const char* cfg;
    double float_mib;
    double quant_mib;
  };
  // float column fits the published accounting to nearly exactly; the
  // quantized column is irreconcilable for resnet/dscnn (see the acceptance
  // suite), so only the two consistent models are asserted here.
  const Row rows[] = {
      {"autoencoder.cfg", 0.509, 0.128},
      {"dscnn.cfg", 0.144, -1.0},
      {"resnet.cfg", 0.433, -1.0},
      {"mobilenet.cfg", 13.162, 3.361},
  };
  for (const auto& r : rows) {
    auto plan = load_model_seeded(cfg_path(r.cfg), 1);
    const double f =
        memory_report(plan, DType::kFloat32).total_bytes / 1048576.0;
    CHECK(std::fabs(f - r.float_mib) / r.float_mib < 0.02);
    if (r.quant_mib > 0) {
      const double q =
          memory_report(plan, DType::kUint8).total_bytes / 1048576.0;
      CHECK(std::fabs(q - r.quant_mib) / r.quant_mib < 0.02);
    }
  }
}

TEST_CASE("inference packs once and unpacks once regardless of depth") {
  auto plan = load_model_seeded(cfg_path("dscnn.cfg"), 3);
  PlainTensor<float> in(plan.in_h, plan.in_w, plan.in_c);
  Lcg64 rng(71);
  for (auto& v : in.data) v = rng.next_float();
  counters().reset();
  const auto out = plan.infer(in, 1);
  CHECK(counters().pack_calls.load() == 1);
  CHECK(counters().unpack_calls.load() == 1);
  CHECK(out.channels == 27);
  for (float v : out.data) CHECK(std::isfinite(v));
}

TEST_CASE("thread ceiling: identical outputs for p_max 1, 2, 4") {
  for (const char* name : {"dscnn.cfg", "resnet.cfg"}) {
    auto plan = load_model_seeded(cfg_path(name), 5);
    PlainTensor<float> in(plan.in_h, plan.in_w, plan.in_c);
    Lcg64 rng(72);
    for (auto& v : in.data) v = rng.next_float();
    const auto a = plan.infer(in, 1);
    const auto b = plan.infer(in, 2);
    const auto c = plan.infer(in, 4);
    CHECK(bit_equal(a, b));
    CHECK(bit_equal(a, c));
  }
}

TEST_CASE("per-layer parallelism is the output block count") {
  auto plan = load_model_seeded(cfg_path("resnet.cfg"), 5);
  // the 32-channel stack-2 convolutions expose exactly two blocks
  bool saw32 = false, saw16 = false;
  for (const auto& L : plan.layers) {
    if (L.kind == LayerKind::kConv && L.out_c == 32) {
      CHECK(L.p_avail == 2);
      saw32 = true;
    }
    if (L.kind == LayerKind::kConv && L.out_c == 16) {
      CHECK(L.p_avail == 1);
      saw16 = true;
    }
  }
  CHECK(saw32);
  CHECK(saw16);
}

TEST_CASE("arena reuse never corrupts a layer's input (fresh-buffer twin)") {
  for (const char* name : {"resnet.cfg", "dscnn.cfg", "autoencoder.cfg"}) {
    auto plan = load_model_seeded(cfg_path(name), 9);
    PlainTensor<float> in(plan.in_h, plan.in_w, plan.in_c);
    Lcg64 rng(73);
    for (auto& v : in.data) v = rng.next_float();
    const auto a = plan.infer(in, 2);
    const auto b = infer_fresh(plan, in, 2);
    CHECK(bit_equal(a, b));
  }
}

TEST_CASE("repeated inference on one plan instance is stable") {
  auto plan = load_model_seeded(cfg_path("resnet.cfg"), 11);
  PlainTensor<float> in(plan.in_h, plan.in_w, plan.in_c);
  Lcg64 rng(74);
  for (auto& v : in.data) v = rng.next_float();
  const auto a = plan.infer(in, 4);
  const auto b = plan.infer(in, 4);
  CHECK(bit_equal(a, b));
}

TEST_CASE("seeded weights are deterministic across plan instances") {
  auto p1 = load_model_seeded(cfg_path("dscnn.cfg"), 42);
  auto p2 = load_model_seeded(cfg_path("dscnn.cfg"), 42);
  PlainTensor<float> in(p1.in_h, p1.in_w, p1.in_c);
  Lcg64 rng(75);
  for (auto& v : in.data) v = rng.next_float();
  CHECK(bit_equal(p1.infer(in, 2), p2.infer(in, 2)));
}

TEST_CASE("executed multiply-accumulates match the closed-form count") {
  auto plan = load_model_seeded(cfg_path("dscnn.cfg"), 13);
  PlainTensor<float> in(plan.in_h, plan.in_w, plan.in_c);
  Lcg64 rng(76);
  for (auto& v : in.data) v = rng.next_float();
  long long expect = 0;
  for (const auto& L : plan.layers) {
    if (L.op == ReductionOp::kFma) {
      expect += static_cast<long long>(L.out_h) * L.out_w * L.groups *
                L.params.k * L.params.f_h * L.params.f_w * L.params.f_c;
    } else if (L.kind == LayerKind::kAffine) {
      expect += static_cast<long long>(L.out_h) * L.out_w * L.out_c;
    }
  }
  counters().reset();
  counters().count_macs = true;
  plan.infer(in, 2);
  counters().count_macs = false;
  CHECK(counters().fma_macs.load() == expect);
}

TEST_CASE("single-layer work accounting: O_H*O_W*G*K*F_H*F_W*F_C") {
  Lcg64 rng(77);
  LayerCase c = random_case(rng, LayerClass::kFullChannel);
  counters().reset();
  counters().count_macs = true;
  run_case(c);
  counters().count_macs = false;
  const auto geo =
      output_shape(c.p, c.input.height, c.input.width, c.input.channels);
  const long long expect = static_cast<long long>(geo.o_h) * geo.o_w *
                           geo.groups * c.p.k * c.p.f_h * c.p.f_w * c.p.f_c;
  CHECK(counters().fma_macs.load() == expect);
}

TEST_CASE("float and quantized tensor files round-trip") {
  Lcg64 rng(78);
  const auto t = random_tensor(rng, 3, 4, 5);
  save_tensor("io_test_tensor.bin", t);
  const auto back = load_tensor("io_test_tensor.bin");
  CHECK(back.height == 3);
  CHECK(back.width == 4);
  CHECK(back.channels == 5);
  CHECK(bit_equal(back, t));

  std::vector<QuantTensorBlob> blobs(2);
  blobs[0].q = {0.125, 3};
  blobs[0].data = {1, 2, 3, 4, 5};
  blobs[1].q = {2.5, 200};
  blobs[1].data = {9, 8};
  save_quantized_weights("io_test_q.bin", blobs);
  const auto qback = load_quantized_weights("io_test_q.bin", {5, 2});
  CHECK(qback[0].q.scale == 0.125);
  CHECK(qback[0].q.zero_point == 3);
  CHECK(qback[0].data == blobs[0].data);
  CHECK(qback[1].q.scale == 2.5);
  CHECK(qback[1].q.zero_point == 200);
  CHECK(qback[1].data == blobs[1].data);
  std::remove("io_test_tensor.bin");
  std::remove("io_test_q.bin");
}

TEST_CASE("weight files load through the model path") {
  const auto cfg_text = "input 1 1 8\nfc c4\nrelu\nfc c2\n";
  const auto cfg = parse_config_text(cfg_text);
  const long long n = count_model_params(cfg);
  CHECK(n == 8 * 4 + 4 * 2);
  Lcg64 rng(79);
  const auto w = random_weights(rng, static_cast<size_t>(n));
  save_weights("io_test_w.bin", w);
  std::FILE* f = std::fopen("io_test_cfg.cfg", "w");
  std::fputs(cfg_text, f);
  std::fclose(f);
  auto plan = load_model("io_test_cfg.cfg", "io_test_w.bin");
  CHECK(plan.param_count == n);
  PlainTensor<float> in(1, 1, 8);
  for (auto& v : in.data) v = rng.next_float();
  const auto out = plan.infer(in, 1);
  CHECK(out.channels == 2);
  std::remove("io_test_w.bin");
  std::remove("io_test_cfg.cfg");
}

TEST_CASE("quantized weight files drive the model path") {
  const auto cfg_text = "input 1 1 8\nfc c4\nrelu\nfc c2\n";
  std::FILE* f = std::fopen("io_test_qm.cfg", "w");
  std::fputs(cfg_text, f);
  std::fclose(f);
  std::vector<QuantTensorBlob> blobs(2);
  blobs[0].q = {1.0 / 64, 120};
  blobs[0].data = generate_weights_u8(5, 32);
  blobs[1].q = {1.0 / 32, 131};
  blobs[1].data = generate_weights_u8(6, 8);
  save_quantized_weights("io_test_qm.bin", blobs);
  auto plan = load_model_quantized("io_test_qm.cfg", "io_test_qm.bin");
  CHECK(plan.param_count == 40);
  CHECK(plan.layers[0].w_q.zero_point == 120);
  CHECK(plan.layers[2].w_q.zero_point == 131);
  PlainTensor<uint8_t> in(1, 1, 8);
  Lcg64 rng(82);
  for (auto& v : in.data) v = rng.next_u8();
  const auto out = plan.infer_quantized(in, 1);
  CHECK(out.channels == 2);
  // float side binds the dequantized weights
  PlainTensor<float> fin(1, 1, 8);
  for (auto& v : fin.data) v = rng.next_float();
  CHECK(plan.infer(fin, 1).channels == 2);
  std::remove("io_test_qm.cfg");
  std::remove("io_test_qm.bin");
}

TEST_CASE("quantized end-to-end inference is deterministic across p_max") {
  auto plan = load_model_seeded(cfg_path("dscnn.cfg"), 17);
  PlainTensor<uint8_t> in(plan.in_h, plan.in_w, plan.in_c);
  Lcg64 rng(80);
  for (auto& v : in.data) v = rng.next_u8();
  const auto a = plan.infer_quantized(in, 1);
  const auto b = plan.infer_quantized(in, 4);
  CHECK(a.data == b.data);
}

TEST_CASE("upsample layers flow through model configs") {
  const auto cfg = parse_config_text(
      "input 4 4 8\nconv k3x3 s1 pad same c16\nrelu\nupsample x2\n"
      "dwconv k3x3 s1 pad same\n");
  const long long n = count_model_params(cfg);
  auto plan = bind_model(
      cfg, generate_weights(3, static_cast<size_t>(n)),
      generate_weights_u8(3, static_cast<size_t>(n)));
  PlainTensor<float> in(4, 4, 8);
  Lcg64 rng(81);
  for (auto& v : in.data) v = rng.next_float();
  const auto out = plan.infer(in, 2);
  CHECK(out.height == 8);
  CHECK(out.width == 8);
  CHECK(out.channels == 16);
}
