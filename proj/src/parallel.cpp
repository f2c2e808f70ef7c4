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
#include "uninest/parallel.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

namespace uninest {
namespace {

// Persistent worker pool. Workers claim part indices from a shared counter;
// a worker that wakes late for a finished run sees a null body and re-waits,
// and runs are serialized, so a stale worker can never claim parts of a
// newer run.
class WorkerPool {
 public:
  static WorkerPool& instance() {
    static WorkerPool pool;
    return pool;
  }

  void run(int parts, const std::function<void(int)>& body) {
    if (parts <= 1 || max_threads_ == 0) {
      for (int t = 0; t < parts; ++t) body(t);
      return;
    }
    std::unique_lock<std::mutex> run_lock(run_mutex_);
    ensure_threads(std::min(parts - 1, max_threads_));
    {
      std::lock_guard<std::mutex> lk(m_);
      body_ = &body;
      parts_ = parts;
      taken_.store(0, std::memory_order_relaxed);
      finished_.store(0, std::memory_order_relaxed);
      ++generation_;
    }
    cv_.notify_all();
    claim(body, parts);
    std::unique_lock<std::mutex> lk(m_);
    done_cv_.wait(lk, [&] {
      return finished_.load(std::memory_order_acquire) == parts_ &&
             active_.load(std::memory_order_acquire) == 0;
    });
    body_ = nullptr;
  }

 private:
  WorkerPool() {
    const unsigned hw = std::thread::hardware_concurrency();
    max_threads_ = hw > 1 ? static_cast<int>(hw) - 1 : 0;
  }
  ~WorkerPool() {
    {
      std::lock_guard<std::mutex> lk(m_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void ensure_threads(int n) {
    while (static_cast<int>(threads_.size()) < n) {
      threads_.emplace_back([this] { worker(); });
    }
  }

  void claim(const std::function<void(int)>& body, int parts) {
    while (true) {
      const int t = taken_.fetch_add(1, std::memory_order_relaxed);
      if (t >= parts) break;
      body(t);
      if (finished_.fetch_add(1, std::memory_order_release) + 1 == parts) {
        std::lock_guard<std::mutex> lk(m_);
        done_cv_.notify_all();
      }
    }
  }

  void worker() {
    uint64_t seen = 0;
    while (true) {
      const std::function<void(int)>* body;
      int parts;
      {
        std::unique_lock<std::mutex> lk(m_);
        cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        body = body_;
        parts = parts_;
        if (!body) continue;
        active_.fetch_add(1, std::memory_order_acq_rel);
      }
      claim(*body, parts);
      if (active_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
        std::lock_guard<std::mutex> lk(m_);
        done_cv_.notify_all();
      }
    }
  }

  std::mutex run_mutex_; // serializes whole runs
  std::mutex m_;
  std::condition_variable cv_, done_cv_;
  std::vector<std::thread> threads_;
  const std::function<void(int)>* body_ = nullptr;
  int parts_ = 0;
  uint64_t generation_ = 0;
  bool stop_ = false;
  int max_threads_ = 0;
  std::atomic<int> taken_{0};
  std::atomic<int> finished_{0};
  std::atomic<int> active_{0};
};

}  // namespace

void parallel_run(int parts, const std::function<void(int)>& body) {
  WorkerPool::instance().run(parts, body);
}

}  // namespace uninest
