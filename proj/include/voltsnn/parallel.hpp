/*
 *    Copyright 2026 The voltsnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VOLTSNN_PARALLEL_HPP
#define VOLTSNN_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace voltsnn
{

/// Worker count: VOLTSNN_THREADS if set and positive, else hardware concurrency.
unsigned worker_threads();

/// Runs body(i) for i in [0, n) over up to `threads` workers (0 = worker_threads()).
/// Iterations must be independent; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

} // namespace voltsnn

#endif
