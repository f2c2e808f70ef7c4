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
#include "uninest/tensor_io.hpp"

#include <cstring>
#include <fstream>

namespace uninest {
namespace {

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& os, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(os, bits);
}

float get_f32(std::istream& is) {
  const uint32_t bits = get_u32(is);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void put_f64(std::ostream& os, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u32(os, static_cast<uint32_t>(bits));
  put_u32(os, static_cast<uint32_t>(bits >> 32));
}

double get_f64(std::istream& is) {
  const uint64_t lo = get_u32(is);
  const uint64_t hi = get_u32(is);
  const uint64_t bits = lo | (hi << 32);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  return is;
}

}  // namespace

void save_tensor(const std::string& path, const PlainTensor<float>& t) {
  auto os = open_out(path);
  put_u32(os, static_cast<uint32_t>(t.height));
  put_u32(os, static_cast<uint32_t>(t.width));
  put_u32(os, static_cast<uint32_t>(t.channels));
  for (float v : t.data) put_f32(os, v);
  if (!os) throw IoError("write failed: " + path);
}

PlainTensor<float> load_tensor(const std::string& path) {
  auto is = open_in(path);
  const uint32_t h = get_u32(is);
  const uint32_t w = get_u32(is);
  const uint32_t c = get_u32(is);
  if (!is) throw IoError("truncated tensor header: " + path);
  PlainTensor<float> t(static_cast<int>(h), static_cast<int>(w),
                       static_cast<int>(c));
  for (auto& v : t.data) v = get_f32(is);
  if (!is) throw IoError("truncated tensor payload: " + path);
  return t;
}

void save_weights(const std::string& path, const std::vector<float>& w) {
  auto os = open_out(path);
  for (float v : w) put_f32(os, v);
  if (!os) throw IoError("write failed: " + path);
}

std::vector<float> load_weights(const std::string& path) {
  auto is = open_in(path);
  is.seekg(0, std::ios::end);
  const std::streamoff bytes = is.tellg();
  is.seekg(0);
  if (bytes % 4 != 0) throw IoError("weight file is not float32-aligned: " + path);
  std::vector<float> w(static_cast<size_t>(bytes / 4));
  for (auto& v : w) v = get_f32(is);
  if (!is) throw IoError("truncated weight payload: " + path);
  return w;
}

void save_quantized_weights(const std::string& path,
                            const std::vector<QuantTensorBlob>& tensors) {
  auto os = open_out(path);
  for (const auto& t : tensors) {
    put_f64(os, t.q.scale);
    const unsigned char zp = static_cast<unsigned char>(t.q.zero_point);
    os.write(reinterpret_cast<const char*>(&zp), 1);
    os.write(reinterpret_cast<const char*>(t.data.data()),
             static_cast<std::streamsize>(t.data.size()));
  }
  if (!os) throw IoError("write failed: " + path);
}

std::vector<QuantTensorBlob> load_quantized_weights(
    const std::string& path, const std::vector<size_t>& counts) {
  auto is = open_in(path);
  std::vector<QuantTensorBlob> out;
  out.reserve(counts.size());
  for (size_t n : counts) {
    QuantTensorBlob t;
    t.q.scale = get_f64(is);
    unsigned char zp = 0;
    is.read(reinterpret_cast<char*>(&zp), 1);
    t.q.zero_point = zp;
    t.data.resize(n);
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(n));
    if (!is) throw IoError("truncated quantized weights: " + path);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace uninest
