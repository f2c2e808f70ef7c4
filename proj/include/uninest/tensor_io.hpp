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
#ifndef UNINEST_TENSOR_IO_HPP_
#define UNINEST_TENSOR_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "uninest/quantized.hpp"
#include "uninest/tensor.hpp"

namespace uninest {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Plain tensor file: three little-endian uint32 dims (H, W, C) followed by
// H*W*C little-endian float32 values in row-major [H][W][C] order.
void save_tensor(const std::string& path, const PlainTensor<float>& t);
PlainTensor<float> load_tensor(const std::string& path);

// Float weight file: little-endian float32 values in [G][K][F_C][F_H][F_W]
// order, concatenated per layer in model order. The caller knows the counts.
void save_weights(const std::string& path, const std::vector<float>& w);
std::vector<float> load_weights(const std::string& path);

// Quantized weight file: per tensor, a little-endian float64 scale, one
// unsigned zero-point byte, then the uint8 payload in the same dimension
// order. Tensors are concatenated in model order.
struct QuantTensorBlob {
  QuantParams q;
  std::vector<uint8_t> data;
};
void save_quantized_weights(const std::string& path,
                            const std::vector<QuantTensorBlob>& tensors);
// `counts` gives the payload length of each tensor in file order.
std::vector<QuantTensorBlob> load_quantized_weights(
    const std::string& path, const std::vector<size_t>& counts);

}  // namespace uninest

#endif  // UNINEST_TENSOR_IO_HPP_
