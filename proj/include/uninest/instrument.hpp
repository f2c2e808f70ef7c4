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
#ifndef UNINEST_INSTRUMENT_HPP_
#define UNINEST_INSTRUMENT_HPP_

#include <atomic>
#include <cstdint>

namespace uninest {

// Dispatch routes chosen by the loop-nest driver. Exposed so tests can assert
// structural properties (e.g. relu and maxpool share the max kernel).
enum class KernelTag : int {
  kNone = 0,
  kFmaBroadcast,
  kFmaLanewise,
  kMaxLanewise,
  kPointwiseAdd,
  kAffine,
  kUpsample,
  kGeneric,
};

// Global instrumentation counters. Cheap enough to keep always-on for the
// one-shot events (pack/unpack, driver entries); the per-kernel MAC counter
// is gated by count_macs because it sits on the hot path.
struct Counters {
  std::atomic<long long> pack_calls{0};
  std::atomic<long long> unpack_calls{0};
  std::atomic<long long> driver_entries{0};
  std::atomic<long long> fma_macs{0};
  bool count_macs = false;
  // Last route the driver dispatched. Written after the (single-threaded)
  // route decision, not from workers.
  KernelTag last_tag = KernelTag::kNone;

  void reset() {
    pack_calls = 0;
    unpack_calls = 0;
    driver_entries = 0;
    fma_macs = 0;
    last_tag = KernelTag::kNone;
  }
};

Counters& counters();

}  // namespace uninest

#endif  // UNINEST_INSTRUMENT_HPP_
