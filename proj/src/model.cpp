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
#include "uninest/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "uninest/packing.hpp"
#include "uninest/tensor_io.hpp"
#include "uninest/weight_gen.hpp"

namespace uninest {
namespace {

// Fixed per-tensor quantization bindings for the uint8 path. Any consistent
// values work for exactness testing; these keep conv accumulations in a sane
// dynamic range.
constexpr double kActScale = 1.0 / 32.0;
constexpr int kActZeroPoint = 128;
constexpr double kWeightScale = 1.0 / 128.0;
constexpr int kWeightZeroPoint = 128;

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> t;
  std::istringstream is(line);
  std::string s;
  while (is >> s) {
    if (s[0] == '#') break;
    t.push_back(s);
  }
  return t;
}

int parse_int(const std::string& s, int line) {
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ModelError("config line " + std::to_string(line) +
                     ": expected integer, got '" + s + "'");
  }
}

// kHxW -> (H, W); sN or sNxM -> (N, M)
void parse_pair(const std::string& body, int line, int* a, int* b) {
  const size_t x = body.find('x');
  if (x == std::string::npos) {
    *a = *b = parse_int(body, line);
  } else {
    *a = parse_int(body.substr(0, x), line);
    *b = parse_int(body.substr(x + 1), line);
  }
}

Padding parse_padding(const std::string& s, int line) {
  Padding p;
  if (s == "same") {
    p.mode = Padding::kSame;
  } else if (s == "valid") {
    p.mode = Padding::kValid;
  } else {
    p.mode = Padding::kExplicit;
    std::istringstream is(s);
    std::string part;
    int vals[4];
    int n = 0;
    while (std::getline(is, part, ',') && n < 4) {
      vals[n++] = parse_int(part, line);
    }
    if (n != 4) {
      throw ModelError("config line " + std::to_string(line) +
                       ": pad expects same|valid|T,B,L,R");
    }
    p.top = vals[0];
    p.bottom = vals[1];
    p.left = vals[2];
    p.right = vals[3];
  }
  return p;
}

}  // namespace

ModelConfig parse_config_text(const std::string& text) {
  ModelConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool have_input = false;
  while (std::getline(is, line)) {
    ++lineno;
    const auto tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string& kind = tok[0];
    if (kind == "input") {
      if (tok.size() != 4) {
        throw ModelError("config line " + std::to_string(lineno) +
                         ": input expects H W C");
      }
      cfg.in_h = parse_int(tok[1], lineno);
      cfg.in_w = parse_int(tok[2], lineno);
      cfg.in_c = parse_int(tok[3], lineno);
      have_input = true;
      continue;
    }
    ConfigEntry e;
    e.line = lineno;
    LayerDesc& d = e.desc;
    if (kind == "conv") {
      d.kind = LayerKind::kConv;
    } else if (kind == "dwconv") {
      d.kind = LayerKind::kDepthwise;
    } else if (kind == "groupconv") {
      d.kind = LayerKind::kGroupConv;
    } else if (kind == "maxpool") {
      d.kind = LayerKind::kMaxPool;
    } else if (kind == "relu") {
      d.kind = LayerKind::kRelu;
    } else if (kind == "fc") {
      d.kind = LayerKind::kFullyConnected;
    } else if (kind == "add") {
      d.kind = LayerKind::kAdd;
    } else if (kind == "affine") {
      d.kind = LayerKind::kAffine;
    } else if (kind == "upsample") {
      d.kind = LayerKind::kUpsample;
    } else if (kind == "checkpoint") {
      d.kind = LayerKind::kCheckpoint;
    } else {
      throw ModelError("config line " + std::to_string(lineno) +
                       ": unknown layer type '" + kind + "'");
    }
    for (size_t i = 1; i < tok.size(); ++i) {
      const std::string& t = tok[i];
      if (t[0] == 'k' && t.size() > 1 && std::isdigit(t[1])) {
        parse_pair(t.substr(1), lineno, &d.f_h, &d.f_w);
      } else if (t[0] == 's' && t.size() > 1 && std::isdigit(t[1]) &&
                 t.substr(0, 3) != "scg") {
        parse_pair(t.substr(1), lineno, &d.s_h, &d.s_w);
      } else if (t[0] == 'c' && t.size() > 1 && std::isdigit(t[1])) {
        d.out_channels = parse_int(t.substr(1), lineno);
      } else if (t.rfind("cg", 0) == 0) {
        d.channels_per_group = parse_int(t.substr(2), lineno);
      } else if (t.rfind("kg", 0) == 0) {
        d.filters_per_group = parse_int(t.substr(2), lineno);
      } else if (t.rfind("scg", 0) == 0) {
        d.channel_stride = parse_int(t.substr(3), lineno);
      } else if (t == "pad") {
        if (i + 1 >= tok.size()) {
          throw ModelError("config line " + std::to_string(lineno) +
                           ": pad expects an argument");
        }
        d.pad = parse_padding(tok[++i], lineno);
      } else if (t == "on") {
        if (i + 1 >= tok.size()) {
          throw ModelError("config line " + std::to_string(lineno) +
                           ": on expects a checkpoint id");
        }
        e.on_checkpoint = true;
        e.slot = tok[++i];
      } else if (t[0] == 'x' && t.size() > 1 && std::isdigit(t[1])) {
        d.upsample_scale = parse_int(t.substr(1), lineno);
      } else if (d.kind == LayerKind::kCheckpoint ||
                 d.kind == LayerKind::kAdd) {
        e.slot = t;
      } else {
        throw ModelError("config line " + std::to_string(lineno) +
                         ": unexpected token '" + t + "'");
      }
    }
    if ((d.kind == LayerKind::kCheckpoint || d.kind == LayerKind::kAdd) &&
        e.slot.empty()) {
      throw ModelError("config line " + std::to_string(lineno) + ": " + kind +
                       " expects a checkpoint id");
    }
    cfg.entries.push_back(std::move(e));
  }
  if (!have_input) throw ModelError("config declares no input shape");
  if (cfg.entries.empty()) throw ModelError("config declares no layers");
  return cfg;
}

ModelConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ModelError("cannot open config: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

struct ShapeState {
  int h, w, c;
};

// Binds one entry and advances the shape. `slot_shapes` tracks checkpoint
// buffer shapes by id.
BoundDesc bind_entry(const ConfigEntry& e, ShapeState& cur,
                     std::map<std::string, ShapeState>& slot_shapes,
                     int index) {
  ShapeState in = cur;
  if (e.on_checkpoint) {
    auto it = slot_shapes.find(e.slot);
    if (it == slot_shapes.end()) {
      throw ModelError("layer " + std::to_string(index + 1) + " (" +
                       layer_kind_name(e.desc.kind) +
                       "): unknown checkpoint '" + e.slot + "'");
    }
    in = it->second;
  }
  BoundDesc b;
  try {
    b = bind_layer(e.desc, in.h, in.w, in.c);
  } catch (const ShapeError& err) {
    throw ModelError("layer " + std::to_string(index + 1) + " (" +
                     layer_kind_name(e.desc.kind) + "): " + err.what());
  }
  if (e.desc.kind == LayerKind::kCheckpoint) {
    slot_shapes[e.slot] = cur;
    return b;
  }
  if (e.desc.kind == LayerKind::kAdd) {
    auto it = slot_shapes.find(e.slot);
    if (it == slot_shapes.end()) {
      throw ModelError("layer " + std::to_string(index + 1) +
                       " (add): unknown checkpoint '" + e.slot + "'");
    }
    const ShapeState& s = it->second;
    if (s.h != in.h || s.w != in.w || s.c != in.c) {
      throw ModelError("layer " + std::to_string(index + 1) +
                       " (add): checkpoint shape mismatch");
    }
  }
  if (e.on_checkpoint) {
    slot_shapes[e.slot] = {b.out_h, b.out_w, b.out_c};
  } else {
    cur = {b.out_h, b.out_w, b.out_c};
  }
  return b;
}

void pack_affine_planes(const float* scale, const float* shift, int channels,
                        int c_b, std::vector<float>& out_scale,
                        std::vector<float>& out_shift) {
  const int padded = round_up(channels, c_b);
  out_scale.assign(padded, 0.0f);
  out_shift.assign(padded, 0.0f);
  for (int c = 0; c < channels; ++c) {
    out_scale[c] = scale[c];
    out_shift[c] = shift[c];
  }
}

void pack_affine_planes_u8(const uint8_t* scale, const uint8_t* shift,
                           int channels, int c_b, int zp,
                           std::vector<uint8_t>& out_scale,
                           std::vector<uint8_t>& out_shift) {
  const int padded = round_up(channels, c_b);
  // Dead lanes hold the zero-point so they dequantize to zero.
  out_scale.assign(padded, static_cast<uint8_t>(zp));
  out_shift.assign(padded, static_cast<uint8_t>(zp));
  for (int c = 0; c < channels; ++c) {
    out_scale[c] = scale[c];
    out_shift[c] = shift[c];
  }
}

}  // namespace

long long count_model_params(const ModelConfig& cfg) {
  ShapeState cur{cfg.in_h, cfg.in_w, cfg.in_c};
  std::map<std::string, ShapeState> slots;
  long long total = 0;
  int idx = 0;
  for (const auto& e : cfg.entries) {
    total += bind_entry(e, cur, slots, idx).weight_count;
    ++idx;
  }
  return total;
}

ModelPlan bind_model(const ModelConfig& cfg, const std::vector<float>& weights,
                     const std::vector<uint8_t>& qweights,
                     const std::vector<QuantParams>* layer_wq) {
  size_t weighted_index = 0;
  ModelPlan plan;
  plan.in_h = cfg.in_h;
  plan.in_w = cfg.in_w;
  plan.in_c = cfg.in_c;
  const int c_b = plan.c_b;

  const long long expected = count_model_params(cfg);
  if (static_cast<long long>(weights.size()) != expected) {
    throw ModelError("weight payload holds " + std::to_string(weights.size()) +
                     " values, model expects " + std::to_string(expected));
  }
  if (static_cast<long long>(qweights.size()) != expected) {
    throw ModelError("quantized weight payload holds " +
                     std::to_string(qweights.size()) + " values, model expects " +
                     std::to_string(expected));
  }

  ShapeState cur{cfg.in_h, cfg.in_w, cfg.in_c};
  std::map<std::string, ShapeState> slot_shapes;
  std::map<std::string, int> slot_ids;
  size_t offset = 0;
  int idx = 0;

  size_t arena = BlockedTensor<float>::buffer_size(cfg.in_h, cfg.in_w,
                                                   cfg.in_c, c_b);
  size_t pad_arena = 0;
  std::vector<size_t> slot_sizes;
  long long pair_max =
      0; // logical; the ping-pong capacity requirement in scalars
  long long max_hw = 0;

  QuantParams act_q{kActScale, kActZeroPoint};

  for (const auto& e : cfg.entries) {
    ShapeState in_shape = cur;
    if (e.on_checkpoint) {
      auto it = slot_shapes.find(e.slot);
      if (it == slot_shapes.end()) {
        throw ModelError("layer " + std::to_string(idx + 1) +
                         ": unknown checkpoint '" + e.slot + "'");
      }
      in_shape = it->second;
    }
    const BoundDesc b = bind_entry(e, cur, slot_shapes, idx);

    PlanLayer L;
    L.kind = e.desc.kind;
    L.name = std::string(layer_kind_name(e.desc.kind)) + "@" +
             std::to_string(idx);
    L.params = b.params;
    L.run_params = b.params;
    L.run_params.pad_top = L.run_params.pad_bottom = 0;
    L.run_params.pad_left = L.run_params.pad_right = 0;
    L.op = b.op;
    L.args = b.args;
    L.in_h = in_shape.h;
    L.in_w = in_shape.w;
    L.in_c = in_shape.c;
    L.out_h = b.out_h;
    L.out_w = b.out_w;
    L.out_c = b.out_c;
    L.groups = b.groups;
    L.in_place = b.in_place;
    L.on_checkpoint = e.on_checkpoint;
    L.weight_count = b.weight_count;
    L.weight_offset = offset;
    L.in_q = act_q;
    L.w_q = QuantParams{kWeightScale, kWeightZeroPoint};
    if (layer_wq && b.weight_count > 0) {
      if (weighted_index >= layer_wq->size()) {
        throw ModelError("quantized weight file holds too few tensors");
      }
      L.w_q = (*layer_wq)[weighted_index++];
    }
    L.out_q = act_q; // max/upsample/pointwise keep the input params
    if (L.op == ReductionOp::kMax) {
      // Quantized max seeds: pooling starts at the uint8 minimum, relu at
      // the quantized representation of zero.
      L.args.max_seed_u8 =
          L.kind == LayerKind::kRelu
              ? static_cast<uint8_t>(L.in_q.zero_point)
              : 0;
    }
    if (L.kind != LayerKind::kCheckpoint) {
      L.cls = classify(L.params, L.in_h, L.in_w, L.in_c);
      L.cfg = default_config(L.cls, L.params, L.groups, c_b);
      L.p_avail = ceil_div(L.out_c, c_b);
      if (L.op == ReductionOp::kMax) {
        // Padded cells must never win the maximum.
        L.pad_fill = -std::numeric_limits<float>::infinity();
        L.pad_fill_u8 = 0;
      }
      if (L.op == ReductionOp::kFma &&
          !quantized_window_fits_int32(L.params)) {
        throw ModelError("layer " + std::to_string(idx + 1) + " (" +
                         layer_kind_name(L.kind) +
                         "): quantized reduction window overflows int32");
      }
    }

    if (L.kind == LayerKind::kCheckpoint) {
      auto [it, fresh] = slot_ids.try_emplace(e.slot,
                                              static_cast<int>(slot_sizes.size()));
      if (fresh) slot_sizes.push_back(0);
      L.slot = it->second;
      slot_sizes[L.slot] =
          std::max(slot_sizes[L.slot],
                   BlockedTensor<float>::buffer_size(L.in_h, L.in_w, L.in_c,
                                                     c_b));
      plan.layers.push_back(std::move(L));
      ++idx;
      continue;
    }

    // Operand packing.
    if (L.op == ReductionOp::kFma) {
      L.weights = pack_weights(weights.data() + offset, L.groups, L.params.k,
                               L.params.f_c, L.params.f_h, L.params.f_w, c_b,
                               L.cfg.f_cb);
      L.qweights = pack_weights(qweights.data() + offset, L.groups,
                                L.params.k, L.params.f_c, L.params.f_h,
                                L.params.f_w, c_b, L.cfg.f_cb);
    } else if (L.kind == LayerKind::kAffine) {
      pack_affine_planes(weights.data() + offset,
                         weights.data() + offset + L.in_c, L.in_c, c_b,
                         L.affine_scale, L.affine_shift);
      pack_affine_planes_u8(qweights.data() + offset,
                            qweights.data() + offset + L.in_c, L.in_c, c_b,
                            L.w_q.zero_point, L.qaffine_scale,
                            L.qaffine_shift);
    }
    offset += static_cast<size_t>(L.weight_count);

    if (L.kind == LayerKind::kAdd || L.on_checkpoint) {
      auto it = slot_ids.find(e.slot);
      if (it == slot_ids.end()) {
        throw ModelError("layer " + std::to_string(idx + 1) +
                         ": checkpoint '" + e.slot + "' never saved");
      }
      L.slot = it->second;
    }

    // Buffer accounting. Logical scalar counts feed the memory report;
    // blocked buffer sizes feed the runtime arenas.
    const long long in_logical =
        static_cast<long long>(L.in_h) * L.in_w * L.in_c;
    const long long out_logical =
        static_cast<long long>(L.out_h) * L.out_w * L.out_c;
    pair_max = std::max(pair_max, L.in_place ? std::max(in_logical, out_logical)
                                             : in_logical + out_logical);
    const bool hidden = &e != &cfg.entries.back();
    if (hidden) {
      max_hw = std::max(max_hw, static_cast<long long>(L.out_h) * L.out_w);
    }

    const size_t out_blocked =
        BlockedTensor<float>::buffer_size(L.out_h, L.out_w, L.out_c, c_b);
    if (L.on_checkpoint) {
      // Skip-path layers bounce through the pad arena, then swap into the
      // checkpoint slot.
      pad_arena = std::max(pad_arena, out_blocked);
      slot_sizes[L.slot] = std::max(slot_sizes[L.slot], out_blocked);
    } else {
      arena = std::max(arena, out_blocked);
    }
    if (L.params.has_padding()) {
      const size_t padded = BlockedTensor<float>::buffer_size(
          L.in_h + L.params.pad_top + L.params.pad_bottom,
          L.in_w + L.params.pad_left + L.params.pad_right, L.in_c, c_b);
      pad_arena = std::max(pad_arena, padded);
    }

    plan.layers.push_back(std::move(L));
    ++idx;
  }

  // Skip-path layers swap the pad arena with their checkpoint slot, so those
  // buffers must share one capacity.
  bool any_skip = false;
  for (const auto& L : plan.layers) any_skip |= L.on_checkpoint;
  if (any_skip) {
    size_t m = pad_arena;
    for (size_t s : slot_sizes) m = std::max(m, s);
    pad_arena = m;
    for (size_t& s : slot_sizes) s = m;
  }

  plan.param_count = expected;
  plan.report_pair = pair_max;
  plan.report_input =
      static_cast<long long>(cfg.in_h) * cfg.in_w * cfg.in_c;
  plan.report_max_hw = max_hw;
  plan.arena_scalars = arena;
  plan.pad_scalars = pad_arena;
  plan.slot_scalars = slot_sizes;

  plan.arena_[0].assign(arena, 0.0f);
  plan.arena_[1].assign(arena, 0.0f);
  plan.pad_arena_.assign(pad_arena, 0.0f);
  plan.slots_.resize(slot_sizes.size());
  for (size_t i = 0; i < slot_sizes.size(); ++i) {
    plan.slots_[i].assign(slot_sizes[i], 0.0f);
  }
  plan.qarena_[0].assign(arena, 0);
  plan.qarena_[1].assign(arena, 0);
  plan.qpad_arena_.assign(pad_arena, 0);
  plan.qslots_.resize(slot_sizes.size());
  for (size_t i = 0; i < slot_sizes.size(); ++i) {
    plan.qslots_[i].assign(slot_sizes[i], 0);
  }
  return plan;
}

ModelPlan load_model(const std::string& config_path,
                     const std::string& weight_path) {
  const ModelConfig cfg = parse_config_file(config_path);
  const std::vector<float> w = load_weights(weight_path);
  // The uint8 stream mirrors the float weights so both paths bind; quantized
  // inference from float files quantizes per the weight QuantParams.
  std::vector<uint8_t> qw(w.size());
  const QuantParams wq{kWeightScale, kWeightZeroPoint};
  for (size_t i = 0; i < w.size(); ++i) qw[i] = quantize_value(w[i], wq);
  return bind_model(cfg, w, qw);
}

ModelPlan load_model_seeded(const std::string& config_path, uint64_t seed) {
  const ModelConfig cfg = parse_config_file(config_path);
  const long long n = count_model_params(cfg);
  return bind_model(cfg, generate_weights(seed, static_cast<size_t>(n)),
                    generate_weights_u8(seed, static_cast<size_t>(n)));
}

ModelPlan load_model_quantized(const std::string& config_path,
                               const std::string& qweight_path) {
  const ModelConfig cfg = parse_config_file(config_path);
  // Per-layer payload lengths come from a dry bind of the config.
  ShapeState cur{cfg.in_h, cfg.in_w, cfg.in_c};
  std::map<std::string, ShapeState> slots;
  std::vector<size_t> counts;
  int idx = 0;
  for (const auto& e : cfg.entries) {
    const long long n = bind_entry(e, cur, slots, idx++).weight_count;
    if (n > 0) counts.push_back(static_cast<size_t>(n));
  }
  const auto blobs = load_quantized_weights(qweight_path, counts);
  std::vector<uint8_t> qw;
  std::vector<QuantParams> wq;
  for (const auto& b : blobs) {
    qw.insert(qw.end(), b.data.begin(), b.data.end());
    wq.push_back(b.q);
  }
  std::vector<float> w(qw.size());
  size_t pos = 0;
  for (const auto& b : blobs) {
    for (uint8_t v : b.data) w[pos++] = dequantize_value(v, b.q);
  }
  return bind_model(cfg, w, qw, &wq);
}

QuantParams ModelPlan::input_qparams() const {
  return QuantParams{kActScale, kActZeroPoint};
}

QuantParams ModelPlan::output_qparams() const {
  return layers.empty() ? input_qparams() : layers.back().out_q;
}

MemoryBreakdown memory_report(const ModelPlan& plan, DType dtype) {
  MemoryBreakdown m;
  m.param_scalars = plan.param_count;
  m.intermediate_scalars = plan.report_pair;
  m.input_scalars = plan.report_input;
  m.max_intermediate_hw = plan.report_max_hw;
  if (dtype == DType::kFloat32) {
    m.total_bytes =
        4 * (m.param_scalars + m.intermediate_scalars + m.input_scalars);
  } else {
    m.total_bytes = m.param_scalars + m.intermediate_scalars +
                    m.input_scalars + 4 * m.max_intermediate_hw;
  }
  const int elem = dtype == DType::kFloat32 ? 4 : 1;
  long long runtime = 2 * static_cast<long long>(plan.arena_scalars) +
                      static_cast<long long>(plan.pad_scalars);
  for (size_t s : plan.slot_scalars) runtime += static_cast<long long>(s);
  m.runtime_buffer_bytes = runtime * elem;
  return m;
}

namespace {

template <typename T>
BlockedTensor<T> make_view(std::vector<T>& storage, int h, int w, int c,
                           int c_b) {
  return BlockedTensor<T>::view(h, w, c, c_b, storage.data());
}

}  // namespace

PlainTensor<float> ModelPlan::infer(const PlainTensor<float>& input,
                                    int p_max) {
  if (input.height != in_h || input.width != in_w || input.channels != in_c) {
    throw ModelError("input shape mismatch");
  }
  int cur_idx = 0;
  BlockedTensor<float> cur = make_view(arena_[0], in_h, in_w, in_c, c_b);
  pack_activations_into(input, cur);

  for (const PlanLayer& L : layers) {
    if (L.kind == LayerKind::kCheckpoint) {
      BlockedTensor<float> slot =
          make_view(slots_[L.slot], L.in_h, L.in_w, L.in_c, c_b);
      for (size_t i = 0; i < cur.size(); ++i) slot.data[i] = cur.data[i];
      continue;
    }
    BlockedTensor<float> src_store;
    const BlockedTensor<float>* src = &cur;
    std::vector<float>& in_store = L.on_checkpoint ? slots_[L.slot]
                                                   : arena_[cur_idx];
    if (L.on_checkpoint) {
      src_store = make_view(slots_[L.slot], L.in_h, L.in_w, L.in_c, c_b);
      src = &src_store;
    }
    BlockedTensor<float> padded;
    if (L.params.has_padding()) {
      padded = make_view(pad_arena_, L.in_h + L.params.pad_top +
                                         L.params.pad_bottom,
                         L.in_w + L.params.pad_left + L.params.pad_right,
                         L.in_c, c_b);
      pad_spatial_into(*src, padded, L.params.pad_top, L.params.pad_left,
                       L.pad_fill);
      src = &padded;
    }

    BlockedTensor<float> out;
    if (L.in_place) {
      out = make_view(in_store, L.out_h, L.out_w, L.out_c, c_b);
    } else if (L.on_checkpoint) {
      out = make_view(pad_arena_, L.out_h, L.out_w, L.out_c, c_b);
    } else {
      out = make_view(arena_[1 - cur_idx], L.out_h, L.out_w, L.out_c, c_b);
    }

    BlockedTensor<float> second_store;
    const BlockedTensor<float>* second = nullptr;
    if (L.kind == LayerKind::kAdd) {
      second_store = make_view(slots_[L.slot], L.in_h, L.in_w, L.in_c, c_b);
      second = &second_store;
    }
    AffineVectors affine;
    const AffineVectors* affine_ptr = nullptr;
    if (L.kind == LayerKind::kAffine) {
      affine.scale = L.affine_scale.data();
      affine.shift = L.affine_shift.data();
      affine_ptr = &affine;
    }

    run_layer(L.run_params, L.op, L.args, *src,
              L.op == ReductionOp::kFma ? &L.weights : nullptr, second,
              affine_ptr, L.cfg, out, p_max, prefer_vectorized);

    if (L.on_checkpoint) {
      std::swap(slots_[L.slot], pad_arena_);
    } else if (!L.in_place) {
      cur_idx = 1 - cur_idx;
      cur = make_view(arena_[cur_idx], L.out_h, L.out_w, L.out_c, c_b);
    } else {
      cur = make_view(arena_[cur_idx], L.out_h, L.out_w, L.out_c, c_b);
    }
  }
  return unpack_activations(cur);
}

PlainTensor<uint8_t> ModelPlan::infer_quantized(
    const PlainTensor<uint8_t>& input, int p_max) {
  if (input.height != in_h || input.width != in_w || input.channels != in_c) {
    throw ModelError("input shape mismatch");
  }
  int cur_idx = 0;
  BlockedTensor<uint8_t> cur = make_view(qarena_[0], in_h, in_w, in_c, c_b);
  pack_activations_into(input, cur);

  for (const PlanLayer& L : layers) {
    if (L.kind == LayerKind::kCheckpoint) {
      BlockedTensor<uint8_t> slot =
          make_view(qslots_[L.slot], L.in_h, L.in_w, L.in_c, c_b);
      for (size_t i = 0; i < cur.size(); ++i) slot.data[i] = cur.data[i];
      continue;
    }
    BlockedTensor<uint8_t> src_store;
    const BlockedTensor<uint8_t>* src = &cur;
    std::vector<uint8_t>& in_store = L.on_checkpoint ? qslots_[L.slot]
                                                     : qarena_[cur_idx];
    if (L.on_checkpoint) {
      src_store = make_view(qslots_[L.slot], L.in_h, L.in_w, L.in_c, c_b);
      src = &src_store;
    }
    BlockedTensor<uint8_t> padded;
    if (L.params.has_padding()) {
      padded = make_view(qpad_arena_, L.in_h + L.params.pad_top +
                                          L.params.pad_bottom,
                         L.in_w + L.params.pad_left + L.params.pad_right,
                         L.in_c, c_b);
      // Zero-valued cells in quantized space sit at the zero point.
      const uint8_t fill = L.op == ReductionOp::kMax
                               ? L.pad_fill_u8
                               : static_cast<uint8_t>(L.in_q.zero_point);
      pad_spatial_into(*src, padded, L.params.pad_top, L.params.pad_left,
                       fill);
      src = &padded;
    }

    BlockedTensor<uint8_t> out;
    if (L.in_place) {
      out = make_view(in_store, L.out_h, L.out_w, L.out_c, c_b);
    } else if (L.on_checkpoint) {
      out = make_view(qpad_arena_, L.out_h, L.out_w, L.out_c, c_b);
    } else {
      out = make_view(qarena_[1 - cur_idx], L.out_h, L.out_w, L.out_c, c_b);
    }

    QuantLayerOperands ops;
    ops.in_q = L.in_q;
    ops.w_q = L.w_q;
    ops.out_q = L.out_q;
    ops.second_q = L.in_q;
    BlockedTensor<uint8_t> second_store;
    if (L.kind == LayerKind::kAdd) {
      second_store = make_view(qslots_[L.slot], L.in_h, L.in_w, L.in_c, c_b);
      ops.second = &second_store;
    }
    if (L.op == ReductionOp::kFma) ops.weights = &L.qweights;
    if (L.kind == LayerKind::kAffine) {
      ops.affine_scale = L.qaffine_scale.data();
      ops.affine_shift = L.qaffine_shift.data();
    }

    run_layer_quantized(L.run_params, L.op, L.args, *src, ops, L.cfg, out,
                        p_max);

    if (L.on_checkpoint) {
      std::swap(qslots_[L.slot], qpad_arena_);
    } else if (!L.in_place) {
      cur_idx = 1 - cur_idx;
      cur = make_view(qarena_[cur_idx], L.out_h, L.out_w, L.out_c, c_b);
    } else {
      cur = make_view(qarena_[cur_idx], L.out_h, L.out_w, L.out_c, c_b);
    }
  }
  return unpack_activations(cur);
}

}  // namespace uninest
