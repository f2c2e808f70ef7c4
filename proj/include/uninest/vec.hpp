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
#ifndef UNINEST_VEC_HPP_
#define UNINEST_VEC_HPP_

#include <cstring>

namespace uninest {

// Fixed-width vector abstraction for the vectorized kernels, built on the
// GNU vector extensions so one kernel body serves SSE/AVX/NEON builds. The
// lane width is selected at build time; retargeting changes only this header
// and the kernel tiling parameters.
#if defined(UNINEST_LANES)
inline constexpr int kVecLanes = UNINEST_LANES;
#elif defined(__AVX512F__)
inline constexpr int kVecLanes = 16;
#elif defined(__AVX__) || defined(__AVX2__)
inline constexpr int kVecLanes = 8;
#else
inline constexpr int kVecLanes = 4;
#endif

typedef float vfloat
    __attribute__((vector_size(kVecLanes * sizeof(float))));
// Unaligned, aliasing-safe view used for loads and stores.
typedef float vfloat_u __attribute__((
    vector_size(kVecLanes * sizeof(float)), aligned(4), may_alias));

inline vfloat vload(const float* p) {
  return *reinterpret_cast<const vfloat_u*>(p);
}

inline void vstore(float* p, vfloat v) {
  *reinterpret_cast<vfloat_u*>(p) = v;
}

inline vfloat vsplat(float x) { return (vfloat){} + x; }

inline vfloat vmax(vfloat a, vfloat b) { return a > b ? a : b; }

}  // namespace uninest

#endif  // UNINEST_VEC_HPP_
