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

// Command-line driver: per-layer timing, end-to-end throughput with thread
// ceilings, memory reports, and oracle-equivalence verification. CSV goes to
// stdout, diagnostics to stderr; exit code 0/1.

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include "uninest/bench.hpp"
#include "uninest/layers.hpp"
#include "uninest/loop_nest.hpp"
#include "uninest/model.hpp"
#include "uninest/oracle.hpp"
#include "uninest/packing.hpp"
#include "uninest/quantized.hpp"
#include "uninest/weight_gen.hpp"

using namespace uninest;

namespace {

bool parse_shape(const std::string& s, int* h, int* w, int* c) {
  return std::sscanf(s.c_str(), "%dx%dx%d", h, w, c) == 3;
}

LayerDesc layer_by_name(const std::string& name, int out_channels,
                        int stride) {
  Padding same;
  same.mode = Padding::kSame;
  if (name == "conv3x3") return conv2d(3, 3, stride, out_channels, same);
  if (name == "conv1x1") return conv2d(1, 1, stride, out_channels);
  if (name == "dwconv3x3") return depthwise_conv(3, 3, stride, same);
  if (name == "maxpool2x2") return maxpool(2, 2, 2);
  if (name == "relu") return relu();
  if (name == "fc") return fully_connected(out_channels);
  throw CLI::ValidationError("--layer", "unknown layer '" + name + "'");
}

int cmd_bench_layer(const std::string& layer, const std::string& shape,
                    const std::string& kernel, int trials, int warmup,
                    int out_channels, int stride) {
  int h = 0, w = 0, c = 0;
  if (!parse_shape(shape, &h, &w, &c)) {
    std::fprintf(stderr, "error: --shape expects HxWxC\n");
    return 1;
  }
  const bool vectorized = kernel == "vectorized";
  const LayerDesc desc = layer_by_name(layer, out_channels, stride);
  const BoundDesc b = bind_layer(desc, h, w, c);

  Lcg64 rng(1);
  PlainTensor<float> input(h, w, c);
  for (auto& v : input.data) v = rng.next_float();
  const auto weights =
      generate_weights(2, static_cast<size_t>(b.weight_count));

  // Time the layer execution only: pack and pad once outside the loop.
  BlockedTensor<float> in = pack_activations(input, kDefaultChannelBlock);
  LayerParams rp = b.params;
  if (rp.has_padding()) {
    const float fill = b.op == ReductionOp::kMax
                           ? -std::numeric_limits<float>::infinity()
                           : 0.0f;
    in = pad_spatial(in, rp.pad_top, rp.pad_bottom, rp.pad_left, rp.pad_right,
                     fill);
    rp.pad_top = rp.pad_bottom = rp.pad_left = rp.pad_right = 0;
  }
  BlockedTensor<float> out(b.out_h, b.out_w, b.out_c, kDefaultChannelBlock);
  const LayerClass cls = classify(b.params, h, w, c);
  const KernelConfig cfg = default_config(cls, b.params, b.groups,
                                          kDefaultChannelBlock);
  PackedWeights<float> pw;
  if (b.op == ReductionOp::kFma) {
    pw = pack_weights(weights, b.groups, b.params.k, b.params.f_c,
                      b.params.f_h, b.params.f_w, kDefaultChannelBlock,
                      cfg.f_cb);
  }
  const auto r = measure(
      [&] {
        run_layer(rp, b.op, b.args, in,
                  b.op == ReductionOp::kFma ? &pw : nullptr, nullptr, nullptr,
                  cfg, out, 1, vectorized);
      },
      trials, warmup);

  std::printf(
      "layer,height,width,channels,kernel,trials,min_seconds,median_seconds,"
      "min_cycles\n");
  std::printf("%s,%d,%d,%d,%s,%d,%.9f,%.9f,%" PRIu64 "\n", layer.c_str(), h, w,
              c, vectorized ? "vectorized" : "reference", r.trials,
              r.min_seconds, r.median_seconds, r.min_cycles);
  return 0;
}

int cmd_bench_model(const std::string& config, std::vector<int> pmax,
                    int trials, int warmup, uint64_t seed) {
  auto plan = load_model_seeded(config, seed);
  Lcg64 rng(3);
  PlainTensor<float> input(plan.in_h, plan.in_w, plan.in_c);
  for (auto& v : input.data) v = rng.next_float();

  struct Row {
    int p;
    BenchResult r;
  };
  std::vector<Row> rows;
  for (int p : pmax) {
    const auto r = measure([&] { plan.infer(input, p); }, trials, warmup);
    rows.push_back({p, r});
    std::fprintf(stderr, "p_max=%d: min %.6f s\n", p, r.min_seconds);
  }
  size_t best = 0;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].r.min_seconds < rows[best].r.min_seconds) best = i;
  }
  std::printf(
      "config,p_max,trials,min_seconds,median_seconds,fps,fastest\n");
  for (size_t i = 0; i < rows.size(); ++i) {
    std::printf("%s,%d,%d,%.9f,%.9f,%.3f,%d\n", config.c_str(), rows[i].p,
                rows[i].r.trials, rows[i].r.min_seconds,
                rows[i].r.median_seconds, 1.0 / rows[i].r.min_seconds,
                i == best ? 1 : 0);
  }
  return 0;
}

int cmd_report_memory(const std::string& config, const std::string& dtype) {
  auto plan = load_model_seeded(config, 1);
  const DType dt = dtype == "uint8" ? DType::kUint8 : DType::kFloat32;
  const auto m = memory_report(plan, dt);
  const int elem = dt == DType::kFloat32 ? 4 : 1;
  std::printf(
      "config,dtype,total_bytes,total_mib,param_bytes,intermediate_bytes,"
      "input_bytes,int32_extra_bytes,runtime_buffer_bytes\n");
  std::printf("%s,%s,%lld,%.3f,%lld,%lld,%lld,%lld,%lld\n", config.c_str(),
              dtype.c_str(), m.total_bytes, m.total_bytes / 1048576.0,
              m.param_scalars * elem, m.intermediate_scalars * elem,
              m.input_scalars * elem,
              dt == DType::kUint8 ? 4 * m.max_intermediate_hw : 0LL,
              m.runtime_buffer_bytes);
  return 0;
}

// --- verify: randomized oracle-equivalence suites ---

struct VerifyStats {
  int passed = 0;
  int failed = 0;
};

void report(VerifyStats& s, bool ok, const char* what) {
  (ok ? s.passed : s.failed)++;
  if (!ok) std::fprintf(stderr, "FAIL: %s\n", what);
}

LayerParams random_params_for(Lcg64& rng, LayerClass cls, int* h, int* w,
                              int* c, ReductionOp* op) {
  auto ri = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng.next() % uint64_t(hi - lo + 1));
  };
  LayerParams p;
  *h = ri(3, 10);
  *w = ri(3, 10);
  *c = ri(1, 32);
  *op = ReductionOp::kFma;
  switch (cls) {
    case LayerClass::kSingleElement:
      break;
    case LayerClass::kSingleChannel:
      p.f_h = ri(2, 3);
      p.f_w = ri(1, 3);
      p.s_h = ri(1, 2);
      p.s_w = ri(1, 2);
      if (ri(0, 1)) *op = ReductionOp::kMax;
      break;
    case LayerClass::kPartialChannel: {
      p.f_h = ri(2, 3);
      p.f_w = ri(2, 3);
      p.f_c = ri(2, 5);
      p.s_c = ri(0, 1) ? p.f_c : ri(1, p.f_c);
      const int groups = ri(2, 4);
      *c = (groups - 1) * p.s_c + p.f_c;
      p.k = ri(1, 12);
      *h = ri(4, 10);
      *w = ri(4, 10);
      break;
    }
    case LayerClass::kFullChannel:
      p.f_h = ri(1, 3);
      p.f_w = ri(1, 3);
      p.f_c = *c;
      p.s_h = ri(1, 2);
      p.s_w = ri(1, 2);
      p.k = ri(1, 32);
      *h = ri(4, 10);
      *w = ri(4, 10);
      if (p.f_h == *h && p.f_w == *w) p.f_h = 1;
      break;
    case LayerClass::kFull:
      *h = ri(1, 4);
      *w = ri(1, 4);
      p.f_h = *h;
      p.f_w = *w;
      p.f_c = *c;
      p.k = ri(1, 32);
      break;
  }
  return p;
}

int cmd_verify(const std::string& suite, int cases, uint64_t seed,
               const std::string& config_dir) {
  Lcg64 rng(seed);
  VerifyStats stats;
  auto ri = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng.next() % uint64_t(hi - lo + 1));
  };

  if (suite == "layers") {
    const LayerClass classes[] = {
        LayerClass::kSingleElement, LayerClass::kSingleChannel,
        LayerClass::kPartialChannel, LayerClass::kFullChannel,
        LayerClass::kFull};
    for (LayerClass cls : classes) {
      for (int i = 0; i < cases; ++i) {
        int h, w, c;
        ReductionOp op;
        const LayerParams p = random_params_for(rng, cls, &h, &w, &c, &op);
        PlainTensor<float> in(h, w, c);
        for (auto& v : in.data) v = rng.next_float();
        const auto geo = output_shape(p, h, w, c);
        std::vector<float> wts;
        if (op == ReductionOp::kFma) {
          wts.resize(static_cast<size_t>(geo.groups) * p.k * p.f_c * p.f_h *
                     p.f_w);
          for (auto& v : wts) v = rng.next_float();
        }
        OpArgs args;
        const auto got =
            run_layer_plain(p, op, args, in, wts, nullptr, 1 + (i % 3));
        const auto want =
            oracle_layer(p, op, args, in, wts, nullptr,
                         op == ReductionOp::kMax
                             ? -std::numeric_limits<float>::infinity()
                             : 0.0f);
        bool ok = got.data.size() == want.data.size();
        if (ok && op == ReductionOp::kMax) {
          for (size_t j = 0; j < got.data.size(); ++j) {
            ok &= got.data[j] == want.data[j];
          }
        } else if (ok) {
          for (size_t j = 0; j < got.data.size(); ++j) {
            const double diff =
                std::fabs(double(got.data[j]) - double(want.data[j]));
            const double mag = std::max(1.0, std::fabs(double(want.data[j])));
            ok &= diff / mag <= 1e-5;
          }
        }
        report(stats, ok, layer_class_name(cls));
      }
    }
  } else if (suite == "models") {
    const long long counts[] = {3201472, 77744, 20288, 133120};
    const char* names[] = {"mobilenet.cfg", "resnet.cfg", "dscnn.cfg",
                           "autoencoder.cfg"};
    for (int i = 0; i < 4; ++i) {
      const std::string path = config_dir + "/" + names[i];
      auto plan = load_model_seeded(path, seed);
      report(stats, plan.param_count == counts[i], "parameter count");
      PlainTensor<float> in(plan.in_h, plan.in_w, plan.in_c);
      for (auto& v : in.data) v = rng.next_float();
      counters().reset();
      const auto out1 = plan.infer(in, 1);
      report(stats,
             counters().pack_calls.load() == 1 &&
                 counters().unpack_calls.load() == 1,
             "single pack/unpack");
      const auto out2 = plan.infer(in, 2);
      const auto out4 = plan.infer(in, 4);
      bool same = true, finite = true;
      for (size_t j = 0; j < out1.data.size(); ++j) {
        same &= out1.data[j] == out2.data[j] && out1.data[j] == out4.data[j];
        finite &= std::isfinite(out1.data[j]) != 0;
      }
      report(stats, same, "thread-count determinism");
      report(stats, finite, "finite outputs");
    }
  } else if (suite == "quantized") {
    for (int i = 0; i < cases; ++i) {
      const int h = ri(3, 8), w = ri(3, 8), c = ri(1, 16);
      LayerParams p;
      p.f_h = ri(1, 3);
      p.f_w = ri(1, 3);
      p.f_c = c;
      p.k = ri(1, 16);
      if (p.f_h > h) p.f_h = h;
      if (p.f_w > w) p.f_w = w;
      PlainTensor<uint8_t> in(h, w, c);
      for (auto& v : in.data) v = rng.next_u8();
      std::vector<uint8_t> wts(static_cast<size_t>(p.k) * c * p.f_h * p.f_w);
      for (auto& v : wts) v = rng.next_u8();
      QuantParams in_q{1.0 / 32, 128}, w_q{1.0 / 128, 128},
          out_q{1.0 / 16, 100};
      const auto geo = output_shape(p, h, w, c);
      BlockedTensor<uint8_t> bin = pack_activations(in, kDefaultChannelBlock);
      BlockedTensor<uint8_t> bout(geo.o_h, geo.o_w, geo.o_c,
                                  kDefaultChannelBlock);
      const auto cls = classify(p, h, w, c);
      const auto cfg =
          default_config(cls, p, geo.groups, kDefaultChannelBlock);
      PackedWeights<uint8_t> pw =
          pack_weights(wts, geo.groups, p.k, p.f_c, p.f_h, p.f_w,
                       kDefaultChannelBlock, cfg.f_cb);
      QuantLayerOperands ops;
      ops.weights = &pw;
      ops.in_q = in_q;
      ops.w_q = w_q;
      ops.out_q = out_q;
      run_layer_quantized(p, ReductionOp::kFma, OpArgs{}, bin, ops, cfg, bout,
                          1 + (i % 3));
      const auto got = unpack_activations(bout);
      const auto want = oracle_layer_quantized(p, ReductionOp::kFma, OpArgs{},
                                               in, wts, in_q, w_q, out_q);
      report(stats, got.data == want.data, "quantized conv exactness");
    }
  } else {
    std::fprintf(stderr, "error: unknown suite '%s'\n", suite.c_str());
    return 1;
  }

  std::printf("suite=%s passed=%d failed=%d\n", suite.c_str(), stats.passed,
              stats.failed);
  return stats.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uninest: a portable DNN inference engine"};
  app.require_subcommand(1);

  std::string layer = "conv3x3", shape = "48x48x16", kernel = "vectorized";
  int trials = 100, warmup = 3, out_channels = 64, stride = 1;
  auto* bl = app.add_subcommand("bench-layer", "time one layer");
  bl->add_option("--layer", layer,
                 "conv3x3|conv1x1|dwconv3x3|maxpool2x2|relu|fc");
  bl->add_option("--shape", shape, "input as HxWxC");
  bl->add_option("--kernel", kernel, "reference|vectorized");
  bl->add_option("--trials", trials);
  bl->add_option("--warmup", warmup);
  bl->add_option("--out-channels", out_channels);
  bl->add_option("--stride", stride);

  std::string config;
  std::vector<int> pmax{1, 2, 4};
  uint64_t seed = 1;
  auto* bm = app.add_subcommand("bench-model", "time end-to-end inference");
  bm->add_option("--config", config)->required();
  bm->add_option("--pmax", pmax, "thread ceilings to sweep")->delimiter(',');
  bm->add_option("--trials", trials);
  bm->add_option("--warmup", warmup);
  bm->add_option("--seed", seed);

  std::string dtype = "float";
  auto* rm = app.add_subcommand("report-memory", "model memory accounting");
  rm->add_option("--config", config)->required();
  rm->add_option("--dtype", dtype, "float|uint8");

  std::string suite = "layers", config_dir = "configs";
  int cases = 200;
  auto* vf = app.add_subcommand("verify", "oracle-equivalence suites");
  vf->add_option("--suite", suite, "layers|models|quantized");
  vf->add_option("--cases", cases);
  vf->add_option("--seed", seed);
  vf->add_option("--configs", config_dir, "directory with model configs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bl->parsed()) {
      return cmd_bench_layer(layer, shape, kernel, trials, warmup,
                             out_channels, stride);
    }
    if (bm->parsed()) {
      return cmd_bench_model(config, pmax, trials, warmup, seed);
    }
    if (rm->parsed()) return cmd_report_memory(config, dtype);
    if (vf->parsed()) return cmd_verify(suite, cases, seed, config_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
