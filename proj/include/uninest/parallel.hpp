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
#ifndef UNINEST_PARALLEL_HPP_
#define UNINEST_PARALLEL_HPP_

#include <functional>

namespace uninest {

// Executes body(t) for every t in [0, parts), on up to `parts` workers
// including the caller, and returns when all parts completed. Which worker
// runs a part never affects results; partitioning is the caller's job.
// Backed by a persistent pool, so per-layer parallelism does not pay thread
// creation costs. Concurrent calls serialize.
void parallel_run(int parts, const std::function<void(int)>& body);

}  // namespace uninest

#endif  // UNINEST_PARALLEL_HPP_
