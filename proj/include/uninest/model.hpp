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
#ifndef UNINEST_MODEL_HPP_
#define UNINEST_MODEL_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uninest/layers.hpp"
#include "uninest/loop_nest.hpp"
#include "uninest/quantized.hpp"
#include "uninest/tensor.hpp"

namespace uninest {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One parsed config entry: a layer descriptor plus graph attributes
// (checkpoint slot usage for residual connections).
struct ConfigEntry {
  LayerDesc desc;
  std::string slot;        // checkpoint id for checkpoint/add
  bool on_checkpoint = false; // layer transforms the checkpoint buffer
  int line = 0;
};

struct ModelConfig {
  int in_h = 0, in_w = 0, in_c = 0;
  std::vector<ConfigEntry> entries;
};

ModelConfig parse_config_text(const std::string& text);
ModelConfig parse_config_file(const std::string& path);

// A config layer bound to shapes, with packed operands for both data types.
struct PlanLayer {
  LayerKind kind;
  std::string name;
  LayerParams params;     // includes resolved padding (bookkeeping)
  LayerParams run_params; // padding stripped; what run_layer receives
  ReductionOp op = ReductionOp::kFma;
  OpArgs args;
  LayerClass cls = LayerClass::kSingleElement;
  int in_h = 0, in_w = 0, in_c = 0;
  int out_h = 0, out_w = 0, out_c = 0;
  int groups = 1;
  bool in_place = false;
  bool on_checkpoint = false;
  int slot = -1;
  long long weight_count = 0;
  size_t weight_offset = 0;
  KernelConfig cfg;
  int p_avail = 1;
  float pad_fill = 0.0f;
  uint8_t pad_fill_u8 = 0;

  PackedWeights<float> weights;
  std::vector<float> affine_scale, affine_shift; // padded blocked vectors

  PackedWeights<uint8_t> qweights;
  std::vector<uint8_t> qaffine_scale, qaffine_shift;
  QuantParams in_q, w_q, out_q;
};

struct MemoryBreakdown {
  long long param_scalars = 0;
  long long intermediate_scalars = 0; // largest simultaneous in+out pair
  long long input_scalars = 0;        // plain input staging
  long long max_intermediate_hw = 0;  // largest H*W among hidden outputs
  long long total_bytes = 0;          // per the accounting formula
  long long runtime_buffer_bytes = 0; // what the runner actually allocates
};

enum class DType { kFloat32, kUint8 };

class ModelPlan {
 public:
  int in_h = 0, in_w = 0, in_c = 0;
  int c_b = kDefaultChannelBlock;
  std::vector<PlanLayer> layers;
  long long param_count = 0;

  // Accounting inputs (logical scalar counts).
  long long report_pair = 0;
  long long report_input = 0;
  long long report_max_hw = 0;

  // Runtime buffer sizes in scalars.
  size_t arena_scalars = 0;
  size_t pad_scalars = 0;
  std::vector<size_t> slot_scalars;

  bool prefer_vectorized = true;

  // Runs one inference. Packs the input once at entry, executes every layer
  // in the blocked format (padding materialized into a scratch buffer when a
  // layer asks for it), unpacks once at exit. Each layer runs on
  // p = min(p_avail, p_max) workers. Not reentrant on one plan instance;
  // separate instances may run concurrently.
  PlainTensor<float> infer(const PlainTensor<float>& input, int p_max);
  PlainTensor<uint8_t> infer_quantized(const PlainTensor<uint8_t>& input,
                                       int p_max);

  QuantParams input_qparams() const;
  QuantParams output_qparams() const;

 private:
  friend ModelPlan load_model(const std::string&, const std::string&);
  friend ModelPlan load_model_seeded(const std::string&, uint64_t);
  friend ModelPlan bind_model(const ModelConfig&, const std::vector<float>&,
                              const std::vector<uint8_t>&,
                              const std::vector<QuantParams>*);

  std::vector<float> arena_[2];
  std::vector<float> pad_arena_;
  std::vector<std::vector<float>> slots_;
  std::vector<uint8_t> qarena_[2];
  std::vector<uint8_t> qpad_arena_;
  std::vector<std::vector<uint8_t>> qslots_;
};

// Binds a parsed config against a full logical weight stream (float) and a
// parallel uint8 stream for the quantized path. Shape-propagation failures
// name the first inconsistent layer; a weight-length mismatch reports
// expected vs actual counts. `layer_wq`, when given, supplies per-weighted-
// layer quantization parameters in model order (from a quantized weight
// file); otherwise a fixed default is used.
ModelPlan bind_model(const ModelConfig& cfg, const std::vector<float>& weights,
                     const std::vector<uint8_t>& qweights,
                     const std::vector<QuantParams>* layer_wq = nullptr);

// Counts the logical weights a config needs without binding operand buffers.
long long count_model_params(const ModelConfig& cfg);

ModelPlan load_model(const std::string& config_path,
                     const std::string& weight_path);
ModelPlan load_model_seeded(const std::string& config_path, uint64_t seed);

// Loads uint8 weights from a quantized weight file (one per-tensor header +
// payload per weighted layer, in model order). The float path binds the
// dequantized weights.
ModelPlan load_model_quantized(const std::string& config_path,
                               const std::string& qweight_path);

// Memory accounting:
//   float32: bytes = 4 * (params + largest in+out pair + input staging)
//   uint8  : bytes = params + largest pair + input staging
//                    + 4 * (largest intermediate H*W product)
// Pairs and sizes are logical (unpadded) scalar counts; in-place layers
// contribute max(in, out). runtime_buffer_bytes reports the actual arena
// allocation including channel padding and materialized spatial padding.
MemoryBreakdown memory_report(const ModelPlan& plan, DType dtype);

}  // namespace uninest

#endif  // UNINEST_MODEL_HPP_
