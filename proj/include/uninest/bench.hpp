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
#ifndef UNINEST_BENCH_HPP_
#define UNINEST_BENCH_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <vector>

namespace uninest {

struct BenchResult {
  double min_seconds = 0.0;
  double median_seconds = 0.0;
  uint64_t min_cycles = 0; // 0 when the platform exposes no counter
  int trials = 0;
};

inline uint64_t read_cycle_counter() {
#if defined(__x86_64__) || defined(__i386__)
  uint32_t lo, hi;
  __asm__ __volatile__("rdtsc" : "=a"(lo), "=d"(hi));
  return (static_cast<uint64_t>(hi) << 32) | lo;
#else
  return 0;
#endif
}

inline bool has_cycle_counter() {
#if defined(__x86_64__) || defined(__i386__)
  return true;
#else
  return false;
#endif
}

// Runs `fn` warmup + trials times; reports minimum and median wall time over
// the measured trials (warm-up excluded) plus the minimum cycle count where
// available.
inline BenchResult measure(const std::function<void()>& fn, int trials,
                           int warmup = 3) {
  for (int i = 0; i < warmup; ++i) fn();
  std::vector<double> times;
  times.reserve(trials);
  uint64_t min_cycles = ~0ull;
  for (int i = 0; i < trials; ++i) {
    const uint64_t c0 = read_cycle_counter();
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    const uint64_t c1 = read_cycle_counter();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
    min_cycles = std::min(min_cycles, c1 - c0);
  }
  std::sort(times.begin(), times.end());
  BenchResult r;
  r.trials = trials;
  r.min_seconds = times.front();
  r.median_seconds = times[times.size() / 2];
  r.min_cycles = has_cycle_counter() ? min_cycles : 0;
  return r;
}

}  // namespace uninest

#endif  // UNINEST_BENCH_HPP_
